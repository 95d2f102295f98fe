// SPDX-License-Identifier: Apache-2.0
//
// Per-slot robust passive beamforming: the eavesdropper-SNR bound becomes an
// S-Procedure LMI, the unit-modulus phases are relaxed to a unit-diagonal PSD
// Gram matrix, one SCA step linearizes the leakage penalty, and Gaussian
// randomization recovers unit-modulus phases. The DL and UL programs of one
// slot are independent and solved separately.

#ifndef SECURIS_BEAMFORMING_HPP
#define SECURIS_BEAMFORMING_HPP

#include "securis/conic/solver.hpp"
#include "securis/conic/verify.hpp"
#include "securis/csi.hpp"

#include <functional>
#include <optional>

namespace securis {

struct PhaseSchedule {
    std::vector<CVec> dl; // v^d[n], length M+1, unit modulus, last entry 1
    std::vector<CVec> ul; // v^u[n]

    static PhaseSchedule identity(int slots, int m) {
        PhaseSchedule p;
        p.dl.assign(slots, CVec::Ones(m + 1));
        p.ul.assign(slots, CVec::Ones(m + 1));
        return p;
    }
};

// One link direction of one slot, reduced to the data the cone program needs.
struct BeamSide {
    CVec legit;    // weight vector of the legitimate quadratic form
    CVec eve_diag; // diagonal of the eavesdropper channel matrix
    CVec eve_est;  // estimated eavesdropper composite
    double gamma0 = 0.0; // transmit power over noise
    double eps = 0.0;    // uncertainty radius
};

inline BeamSide dl_side(const ChannelRealization& r, const SlotChannels& ch, double power,
                        const Scenario& sc, double eps1) {
    BeamSide s;
    s.legit = ch.g1_stack.cwiseProduct(ch.g1_diag.conjugate());
    s.eve_diag = ch.e1_diag;
    s.eve_est = r.est_e1;
    s.gamma0 = power / sc.noise_power;
    s.eps = eps1;
    return s;
}

inline BeamSide ul_side(const ChannelRealization& r, const SlotChannels& ch, double power,
                        const Scenario& sc, double eps2) {
    BeamSide s;
    s.legit = ch.g2_stack.cwiseProduct(ch.g2_diag.conjugate());
    s.eve_diag = ch.e2_diag;
    s.eve_est = r.est_e2;
    s.gamma0 = power / sc.noise_power;
    s.eps = eps2;
    return s;
}

// S-Procedure blocks evaluated at a candidate (V, xi, eta); the robust SNR
// bound holds iff U1 - U2 is PSD.
struct LmiBlocks {
    CMat u1, u2;
};

inline LmiBlocks build_lmi_blocks(const BeamSide& side, const CMat& v_gram, double xi,
                                  double eta) {
    const int k = static_cast<int>(side.eve_est.size());
    const CMat w =
        side.gamma0 * side.eve_diag.asDiagonal() * v_gram * side.eve_diag.conjugate().asDiagonal();
    LmiBlocks b;
    b.u1 = CMat::Zero(k + 1, k + 1);
    b.u1.topLeftCorner(k, k) = eta * CMat::Identity(k, k);
    b.u1(k, k) = -eta * side.eps * side.eps + xi;
    b.u2 = CMat::Zero(k + 1, k + 1);
    b.u2.topLeftCorner(k, k) = w;
    b.u2.block(0, k, k, 1) = w * side.eve_est;
    b.u2.block(k, 0, 1, k) = side.eve_est.adjoint() * w;
    b.u2(k, k) = (side.eve_est.adjoint() * w * side.eve_est)(0).real();
    return b;
}

struct SideSdpResult {
    CMat v_gram;       // Hermitian, unit diagonal
    double xi = 0.0;   // eavesdropper-SNR slack
    double eta = 0.0;  // S-Procedure multiplier
    double surrogate = 0.0; // log-legit term minus linearized leakage penalty
    conic::SolveStatus status = conic::SolveStatus::failed;
};

namespace detail {

// real quadratic form sum_ij conj(w_i) V_ij w_j as an affine expression over
// the off-diagonal variables of a unit-diagonal Hermitian matrix
inline conic::LinExpr herm_quadform(const CVec& wvec, const std::vector<int>& re_idx,
                                    const std::vector<int>& im_idx, int k) {
    conic::LinExpr acc;
    double diag = 0.0;
    for (int i = 0; i < k; ++i) diag += std::norm(wvec(i));
    acc += conic::LinExpr(diag);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const cxd c = 2.0 * std::conj(wvec(i)) * wvec(j); // pairs (i,j) and (j,i)
            acc += conic::LinExpr::variable(re_idx[i * k + j], c.real());
            acc -= conic::LinExpr::variable(im_idx[i * k + j], c.imag());
        }
    return acc;
}

} // namespace detail

// Relaxed program for one side of one slot: maximize
//   log2(1 + gamma0 * legit^H V legit) - xi / (ln2 (1 + xi0))
// over V >= 0 with unit diagonal, the robust leakage LMI, and xi, eta >= 0.
// A zero uncertainty radius replaces the LMI with the nominal linear bound.
inline SideSdpResult solve_side_sdp(const BeamSide& side, double xi0,
                                    const conic::SolveOptions& opt = {},
                                    conic::SolverState* warm = nullptr) {
    using conic::CxExpr;
    using conic::LinExpr;
    const int k = static_cast<int>(side.eve_est.size());
    conic::ProgramBuilder pb;
    std::vector<int> re_idx(k * k, -1), im_idx(k * k, -1);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            re_idx[i * k + j] = pb.add_var();
            im_idx[i * k + j] = pb.add_var();
        }
    const int xi = pb.add_var();
    pb.add_nonneg(LinExpr::variable(xi));
    pb.maximize(xi, -1.0 / (std::numbers::ln2_v<double> * (1.0 + xi0)));

    auto v_entry = [&](int i, int j) -> CxExpr {
        if (i == j) return CxExpr(cxd(1.0, 0.0));
        const bool flip = i > j;
        if (flip) std::swap(i, j);
        CxExpr e{LinExpr::variable(re_idx[i * k + j]), LinExpr::variable(im_idx[i * k + j])};
        return flip ? e.conj() : e;
    };
    pb.add_psd_hermitian(k, v_entry);

    int eta = -1;
    if (side.eps > 0.0) {
        eta = pb.add_var();
        pb.add_nonneg(LinExpr::variable(eta));
        // U1 - U2 as one Hermitian block of side k+1
        const CVec& d = side.eve_diag;
        const CVec& h = side.eve_est;
        auto w_entry = [&](int i, int j) -> CxExpr {
            return (side.gamma0 * d(i) * std::conj(d(j))) * v_entry(i, j);
        };
        auto lmi_entry = [&](int i, int j) -> CxExpr {
            if (i < k && j < k) {
                CxExpr e = cxd(-1.0, 0.0) * w_entry(i, j);
                if (i == j) e += CxExpr{LinExpr::variable(eta), LinExpr()};
                return e;
            }
            if (i < k && j == k) {
                CxExpr acc;
                for (int l = 0; l < k; ++l) acc += (-h(l)) * w_entry(i, l);
                return acc;
            }
            // (k, k) corner: xi - eta*eps^2 - h^H W h
            CxExpr acc{LinExpr::variable(xi) -
                           LinExpr::variable(eta, side.eps * side.eps),
                       LinExpr()};
            for (int i2 = 0; i2 < k; ++i2)
                for (int j2 = 0; j2 < k; ++j2)
                    acc += (-std::conj(h(i2)) * h(j2)) * w_entry(i2, j2);
            return acc;
        };
        pb.add_psd_hermitian(k + 1, lmi_entry);
    } else {
        // perfect CSI: xi >= gamma0 * |est^H diag(d) v|^2 is linear in V
        const CVec u = side.eve_est.cwiseProduct(side.eve_diag.conjugate());
        pb.add_nonneg(LinExpr::variable(xi) -
                      side.gamma0 * detail::herm_quadform(u, re_idx, im_idx, k));
    }

    int t_epi = -1;
    if (side.gamma0 > 0.0) {
        t_epi = pb.add_var();
        pb.maximize(t_epi, 1.0);
        LinExpr legit_arg =
            LinExpr(1.0) + side.gamma0 * detail::herm_quadform(side.legit, re_idx, im_idx, k);
        pb.add_exp(LinExpr::variable(t_epi, std::numbers::ln2_v<double>), LinExpr(1.0),
                   legit_arg);
    }

    const conic::ConicProgram prog = pb.build();
    const conic::ConicSolution sol = conic::solve(prog, opt, warm);
    SideSdpResult out;
    out.status = sol.status;
    if (sol.status != conic::SolveStatus::optimal &&
        sol.status != conic::SolveStatus::near_optimal)
        return out;
    out.v_gram = CMat::Identity(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            out.v_gram(i, j) = cxd(sol.x(re_idx[i * k + j]), sol.x(im_idx[i * k + j]));
            out.v_gram(j, i) = std::conj(out.v_gram(i, j));
        }
    out.xi = sol.x(xi);
    out.eta = eta >= 0 ? sol.x(eta) : 0.0;
    out.surrogate = sol.objective;
    return out;
}

// Worst-case eavesdropper SNR of a unit-modulus candidate.
inline double side_leak_snr(const BeamSide& side, const CVec& v) {
    return side.gamma0 * worst_case_error(side.eve_est, side.eve_diag, v, side.eps).attained_gain;
}

// Surrogate objective of a unit-modulus candidate: exact legitimate log term
// minus the linearized leakage penalty at xi0.
inline double side_score(const BeamSide& side, double xi0, const CVec& v) {
    cxd acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::conj(side.legit(i)) * v(i);
    const double legit = log2p1(side.gamma0 * std::norm(acc));
    return legit - side_leak_snr(side, v) / (std::numbers::ln2_v<double> * (1.0 + xi0));
}

// Entrywise phase projection, normalized so the last entry is 1.
inline CVec phase_project(const CVec& x) {
    const Eigen::Index k = x.size();
    CVec v(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double mag = std::abs(x(i));
        v(i) = mag > 0.0 ? x(i) / mag : cxd(1.0, 0.0);
    }
    const cxd last = v(k - 1);
    v *= std::conj(last);
    v(k - 1) = 1.0; // exact
    return v;
}

// Rank-one recovery: the principal-eigenvector projection is always candidate 0,
// optional extra candidates (e.g. the previous iterate) follow, then `count`
// Gaussian draws with covariance V. Returns the best candidate under `score`.
inline CVec gaussian_randomization(const CMat& v_gram, int count,
                                   const std::function<double(const CVec&)>& score, Rng& rng,
                                   const std::vector<CVec>& extra = {}) {
    if (count < 1) throw contract_error("gaussian_randomization: count must be >= 1");
    const int k = static_cast<int>(v_gram.rows());
    Eigen::SelfAdjointEigenSolver<CMat> eig(v_gram);
    CVec best = phase_project(eig.eigenvectors().col(k - 1));
    double best_score = score(best);
    auto consider = [&](const CVec& cand) {
        const double s = score(cand);
        if (s > best_score) {
            best_score = s;
            best = cand;
        }
    };
    for (const CVec& v : extra) consider(v);
    CMat half = CMat::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        const double lam = std::max(eig.eigenvalues()(i), 0.0);
        half += std::sqrt(lam) * eig.eigenvectors().col(i) * eig.eigenvectors().col(i).adjoint();
    }
    for (int c = 0; c < count; ++c) consider(phase_project(half * rng.cgaussian_vec(k)));
    return best;
}

} // namespace securis

#endif
