// SPDX-License-Identifier: Apache-2.0
//
// One SCA iteration of the joint-slot trajectory program. Channels that depend
// non-linearly on the UAV position (array response, worst-case eavesdropper
// composite) are frozen at the previous trajectory; distance powers get slack
// variables with exact power-cone or linearized representations.

#ifndef SECURIS_TRAJECTORY_HPP
#define SECURIS_TRAJECTORY_HPP

#include "securis/beamforming.hpp"
#include "securis/power.hpp"

namespace securis {

// Per-slot quadratic-form data built from the previous iteration's trajectory.
struct FrozenChannelData {
    std::vector<CVec> hur_prev;              // UAV-RIS small-scale, DL
    std::vector<CVec> hru_prev;              // RIS-UAV small-scale, UL
    std::vector<CVec> he1_op;                // worst-case DL eavesdropper composite
    std::vector<Eigen::Matrix2cd> h_qg;      // legitimate DL form
    std::vector<Eigen::Matrix2cd> h_gq;      // legitimate UL form
    std::vector<Eigen::Matrix2cd> h_qe;      // worst-case DL leakage form
};

inline FrozenChannelData freeze_channels(const ChannelRealization& r, const TrajectoryPlan& prev,
                                         const std::vector<CVec>& v_dl,
                                         const std::vector<CVec>& v_ul, const Scenario& sc,
                                         double eps1) {
    const int n = prev.num_slots();
    const int m = sc.num_elements();
    const double drg = dist_ris_ground(sc.user_pos, sc);
    const double dre = dist_ris_ground(sc.eve_pos, sc);
    const double wrg = std::sqrt(std::pow(drg, -sc.alpha));
    const double wre = std::sqrt(std::pow(dre, -sc.alpha));
    FrozenChannelData f;
    f.hur_prev.resize(n);
    f.hru_prev.resize(n);
    f.he1_op.resize(n);
    f.h_qg.resize(n);
    f.h_gq.resize(n);
    f.h_qe.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 q = prev.pos[i];
        f.hur_prev[i] = h_uav_ris(r, q, sc);
        f.hru_prev[i] = h_ris_uav(r, q, sc);
        const SlotChannels ch = composite_channels(r, q, sc);
        const WorstCaseError wc = worst_case_error(r.est_e1, ch.e1_diag, v_dl[i], eps1);
        f.he1_op[i] = r.est_e1 + wc.delta;

        cxd refl_g(0.0, 0.0), refl_u(0.0, 0.0), refl_e(0.0, 0.0);
        for (int l = 0; l < m; ++l) {
            refl_g += std::conj(r.h_rg(l)) * v_dl[i](l) * f.hur_prev[i](l);
            refl_u += std::conj(f.hru_prev[i](l)) * v_ul[i](l) * r.h_gr(l);
            refl_e += std::conj(f.he1_op[i](l)) * v_dl[i](l) * f.hur_prev[i](l);
        }
        Eigen::Vector2cd zg, zu, ze;
        zg << r.h_ug, wrg * refl_g;
        zu << r.h_gu, wrg * refl_u;
        ze << std::conj(f.he1_op[i](m)), wre * refl_e;
        f.h_qg[i] = zg * zg.adjoint();
        f.h_gq[i] = zu * zu.adjoint();
        f.h_qe[i] = ze * ze.adjoint();
    }
    return f;
}

// Slack values and linearization points of the trajectory program.
struct TrajectorySlacks {
    Vec u, e, s, t; // distance-power slacks
    Vec zeta;       // worst-case leakage SNR
    Vec rd, ru;     // legitimate quadratic-form slacks
};

// Tight slack values induced by a trajectory under the given frozen data.
inline TrajectorySlacks induce_slacks(const FrozenChannelData& f, const TrajectoryPlan& plan,
                                      const Vec& p_dl, const Scenario& sc) {
    const int n = plan.num_slots();
    TrajectorySlacks ts;
    ts.u.resize(n);
    ts.e.resize(n);
    ts.s.resize(n);
    ts.t.resize(n);
    ts.zeta.resize(n);
    ts.rd.resize(n);
    ts.ru.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 q = plan.pos[i];
        const double dug = dist_uav_ground(q, sc.user_pos, sc);
        const double due = dist_uav_ground(q, sc.eve_pos, sc);
        const double dur = dist_uav_ris(q, sc);
        ts.u(i) = std::pow(dug, -sc.kappa / 2.0);
        ts.e(i) = std::pow(dur, -sc.alpha / 2.0);
        ts.s(i) = std::pow(due, -sc.kappa / 2.0);
        ts.t(i) = std::pow(dur, -sc.alpha / 2.0);
        Eigen::Vector2d hue(ts.u(i), ts.e(i));
        Eigen::Vector2d hst(ts.s(i), ts.t(i));
        ts.rd(i) = (hue.transpose() * f.h_qg[i].real() * hue)(0);
        ts.ru(i) = (hue.transpose() * f.h_gq[i].real() * hue)(0);
        const double gamma0 = p_dl(i) / sc.noise_power;
        ts.zeta(i) = sc.ref_gain * gamma0 * (hst.transpose() * f.h_qe[i].real() * hst)(0);
    }
    return ts;
}

// Surrogate objective value at a trajectory with tight slacks, using the
// linearized leakage penalty at zeta0.
inline double trajectory_surrogate(const FrozenChannelData& f, const TrajectoryPlan& plan,
                                   const Vec& p_dl, const Vec& p_ul, const Vec& zeta0,
                                   const Scenario& sc) {
    const TrajectorySlacks ts = induce_slacks(f, plan, p_dl, sc);
    const int n = plan.num_slots();
    const double w = sc.dl_weight;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g0 = sc.ref_gain * p_dl(i) / sc.noise_power;
        const double g1 = sc.ref_gain * p_ul(i) / sc.noise_power;
        acc += w * (log2p1(g0 * ts.rd(i)) -
                    ts.zeta(i) / (std::numbers::ln2_v<double> * (1.0 + zeta0(i))));
        acc += (1.0 - w) * log2p1(g1 * ts.ru(i));
    }
    return acc / n;
}

struct TrajectoryProgram {
    conic::ConicProgram program;
    // variable layout (index -1 when the variable is not created); every
    // variable is expressed relative to its reference scale
    std::vector<int> x, y, u, e, s, t, zeta, rd, ru;
    double pos_scale = 1.0;
    Vec u_ref, e_ref, s_ref, t_ref, zeta_ref, rd_ref, ru_ref;
    int n = 0;
};

// Convex surrogate program around (prev plan, slack points). Slot 0 is pinned
// to the start position and enters as constants. All variables are normalized
// by their linearization-point values so the program data is O(1).
inline TrajectoryProgram build_trajectory_program(const FrozenChannelData& f,
                                                  const TrajectoryPlan& prev,
                                                  const TrajectorySlacks& pts, const Vec& p_dl,
                                                  const Vec& p_ul, const Scenario& sc) {
    using conic::LinExpr;
    const int n = prev.num_slots();
    const double w = sc.dl_weight;
    const double ln2 = std::numbers::ln2_v<double>;
    const double kap = sc.kappa, alp = sc.alpha;
    const double zu2 = sc.uav_alt * sc.uav_alt;
    const double zur2 = (sc.uav_alt - sc.ris_alt) * (sc.uav_alt - sc.ris_alt);
    const double s_max = std::pow(sc.uav_alt, -kap / 2.0);
    const double t_max = std::pow(sc.uav_alt - sc.ris_alt, -alp / 2.0);

    TrajectoryProgram tp;
    tp.n = n;
    double ll = std::max({sc.uav_alt, sc.start_pos.norm(), sc.final_pos.norm(),
                          sc.user_pos.norm(), sc.eve_pos.norm(), sc.ris_pos.norm()});
    for (int i = 0; i < n; ++i) ll = std::max(ll, prev.pos[i].norm());
    tp.pos_scale = ll;
    tp.u_ref = pts.u;
    tp.e_ref = pts.e;
    tp.s_ref = pts.s;
    tp.t_ref = pts.t;
    tp.rd_ref = pts.rd.cwiseMax(1e-30);
    tp.ru_ref = pts.ru.cwiseMax(1e-30);
    tp.zeta_ref = pts.zeta.cwiseMax(1e-12);

    conic::ProgramBuilder pb;
    auto idx_all = [&](std::vector<int>& dst) {
        dst.assign(n, -1);
        for (int i = 0; i < n; ++i) dst[i] = pb.add_var();
    };
    tp.x.assign(n, -1);
    tp.y.assign(n, -1);
    for (int i = 1; i < n; ++i) {
        tp.x[i] = pb.add_var();
        tp.y[i] = pb.add_var();
    }
    idx_all(tp.u);
    idx_all(tp.e);
    idx_all(tp.s);
    idx_all(tp.t);
    idx_all(tp.zeta);
    idx_all(tp.rd);
    idx_all(tp.ru);

    // positions in units of pos_scale
    const double il = 1.0 / tp.pos_scale;
    auto xe = [&](int i) {
        return tp.x[i] >= 0 ? LinExpr::variable(tp.x[i]) : LinExpr(sc.start_pos.x() * il);
    };
    auto ye = [&](int i) {
        return tp.y[i] >= 0 ? LinExpr::variable(tp.y[i]) : LinExpr(sc.start_pos.y() * il);
    };

    // mobility: per-step second-order cones, final endpoint ball
    const double dmax = sc.max_step() * il;
    for (int i = 0; i + 1 < n; ++i)
        pb.add_soc(LinExpr(dmax), {xe(i + 1) - xe(i), ye(i + 1) - ye(i)});
    pb.add_soc(LinExpr(dmax), {LinExpr(sc.final_pos.x() * il) - xe(n - 1),
                               LinExpr(sc.final_pos.y() * il) - ye(n - 1)});

    const double l2 = tp.pos_scale * tp.pos_scale;
    for (int i = 0; i < n; ++i) {
        const double x0 = prev.pos[i].x(), y0 = prev.pos[i].y();
        const double g0 = sc.ref_gain * p_dl(i) / sc.noise_power;
        const double g1 = sc.ref_gain * p_ul(i) / sc.noise_power;
        const LinExpr xi = xe(i), yi = ye(i); // normalized coordinates

        pb.add_nonneg(LinExpr::variable(tp.u[i]));
        pb.add_nonneg(LinExpr::variable(tp.e[i]));
        pb.add_nonneg(LinExpr::variable(tp.zeta[i]));
        pb.add_nonneg(LinExpr::variable(tp.rd[i]));
        pb.add_nonneg(LinExpr::variable(tp.ru[i]));
        pb.add_nonneg(LinExpr(s_max / tp.s_ref(i)) - LinExpr::variable(tp.s[i]));
        pb.add_nonneg(LinExpr(t_max / tp.t_ref(i)) - LinExpr::variable(tp.t[i]));

        // legitimate distance slacks: x^2+y^2 <= sigma/l2 with the distance
        // power linearized at the slack point (normalized: sigma tilde)
        const double u0 = pts.u(i), e0 = pts.e(i);
        {
            LinExpr sigma = (2.0 * sc.user_pos.x() * il) * xi + (2.0 * sc.user_pos.y() * il) * yi;
            sigma += LinExpr(((1.0 + 4.0 / kap) * std::pow(u0, -4.0 / kap) -
                              sc.user_pos.squaredNorm() - zu2) /
                             l2);
            sigma -= LinExpr::variable(
                tp.u[i], (4.0 / kap) * std::pow(u0, -4.0 / kap) * tp.u_ref(i) / (u0 * l2));
            pb.add_rsoc(sigma, LinExpr(0.5), {xi, yi});
        }
        {
            LinExpr sigma = (2.0 * sc.ris_pos.x() * il) * xi + (2.0 * sc.ris_pos.y() * il) * yi;
            sigma += LinExpr(((1.0 + 4.0 / alp) * std::pow(e0, -4.0 / alp) -
                              sc.ris_pos.squaredNorm() - zur2) /
                             l2);
            sigma -= LinExpr::variable(
                tp.e[i], (4.0 / alp) * std::pow(e0, -4.0 / alp) * tp.e_ref(i) / (e0 * l2));
            pb.add_rsoc(sigma, LinExpr(0.5), {xi, yi});
        }

        // eavesdropper-side slacks: s^(-4/kappa) <= sigma via a power cone with
        // tight-point normalization, -x^2 linearized at the previous trajectory
        {
            const double ref = std::pow(tp.s_ref(i), -4.0 / kap); // sigma at tightness
            LinExpr sigma = (2.0 * (x0 - sc.eve_pos.x()) * tp.pos_scale / ref) * xi +
                            (2.0 * (y0 - sc.eve_pos.y()) * tp.pos_scale / ref) * yi;
            sigma += LinExpr((zu2 + sc.eve_pos.squaredNorm() - x0 * x0 - y0 * y0) / ref);
            pb.add_pow(sigma, LinExpr::variable(tp.s[i]), LinExpr(1.0), kap / (kap + 4.0));
        }
        {
            const double ref = std::pow(tp.t_ref(i), -4.0 / alp);
            LinExpr sigma = (2.0 * (x0 - sc.ris_pos.x()) * tp.pos_scale / ref) * xi +
                            (2.0 * (y0 - sc.ris_pos.y()) * tp.pos_scale / ref) * yi;
            sigma += LinExpr((zur2 + sc.ris_pos.squaredNorm() - x0 * x0 - y0 * y0) / ref);
            pb.add_pow(sigma, LinExpr::variable(tp.t[i]), LinExpr(1.0), alp / (alp + 4.0));
        }

        // worst-case leakage bound: rho*gamma0*|z^H (s,t)|^2 <= zeta
        if (g0 > 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(f.h_qe[i]);
            const Eigen::Vector2cd z =
                std::sqrt(std::max(eig.eigenvalues()(1), 0.0)) * eig.eigenvectors().col(1);
            const double scale = std::sqrt(g0 / tp.zeta_ref(i));
            LinExpr re_part =
                LinExpr::variable(tp.s[i], scale * tp.s_ref(i) * z(0).real()) +
                LinExpr::variable(tp.t[i], scale * tp.t_ref(i) * z(1).real());
            LinExpr im_part =
                LinExpr::variable(tp.s[i], -scale * tp.s_ref(i) * z(0).imag()) +
                LinExpr::variable(tp.t[i], -scale * tp.t_ref(i) * z(1).imag());
            pb.add_rsoc(LinExpr::variable(tp.zeta[i]), LinExpr(0.5), {re_part, im_part});
        }

        // legitimate quadratic forms linearized at (u0, e0); at the reference
        // the bound reads rd_hat <= 2 Re[...] - 1
        const Eigen::Vector2d hue0(u0, e0);
        {
            const Eigen::Vector2d grad = 2.0 * (f.h_qg[i].real() * hue0);
            const double c0 = (hue0.transpose() * f.h_qg[i].real() * hue0)(0);
            const double ref = tp.rd_ref(i);
            pb.add_nonneg(LinExpr::variable(tp.u[i], grad(0) * tp.u_ref(i) / ref) +
                          LinExpr::variable(tp.e[i], grad(1) * tp.e_ref(i) / ref) -
                          LinExpr(c0 / ref) - LinExpr::variable(tp.rd[i]));
        }
        {
            const Eigen::Vector2d grad = 2.0 * (f.h_gq[i].real() * hue0);
            const double c0 = (hue0.transpose() * f.h_gq[i].real() * hue0)(0);
            const double ref = tp.ru_ref(i);
            pb.add_nonneg(LinExpr::variable(tp.u[i], grad(0) * tp.u_ref(i) / ref) +
                          LinExpr::variable(tp.e[i], grad(1) * tp.e_ref(i) / ref) -
                          LinExpr(c0 / ref) - LinExpr::variable(tp.ru[i]));
        }

        // objective: w*(log2(1+g0*rd) - zeta/(ln2(1+zeta0))) + (1-w)*log2(1+g1*ru)
        // epigraph arguments normalized by their value at the reference point
        if (w > 0.0) {
            pb.maximize(tp.zeta[i], -w * tp.zeta_ref(i) / (n * ln2 * (1.0 + pts.zeta(i))));
            if (g0 > 0.0) {
                const int td = pb.add_var();
                pb.maximize(td, w / n);
                const double arg0 = 1.0 + g0 * tp.rd_ref(i);
                pb.add_exp(LinExpr::variable(td, ln2) - LinExpr(std::log(arg0)), LinExpr(1.0),
                           LinExpr(1.0 / arg0) +
                               LinExpr::variable(tp.rd[i], g0 * tp.rd_ref(i) / arg0));
            }
        }
        if (w < 1.0 && g1 > 0.0) {
            const int tu = pb.add_var();
            pb.maximize(tu, (1.0 - w) / n);
            const double arg0 = 1.0 + g1 * tp.ru_ref(i);
            pb.add_exp(LinExpr::variable(tu, ln2) - LinExpr(std::log(arg0)), LinExpr(1.0),
                       LinExpr(1.0 / arg0) +
                           LinExpr::variable(tp.ru[i], g1 * tp.ru_ref(i) / arg0));
        }
    }

    tp.program = pb.build();
    return tp;
}

struct TrajectoryResult {
    TrajectoryPlan plan;
    TrajectorySlacks slacks;
    conic::SolveStatus status = conic::SolveStatus::failed;
    double surrogate = 0.0; // solver objective value
};

// Solve the surrogate program and project sub-micrometer mobility overshoots.
inline TrajectoryResult solve_trajectory(const TrajectoryProgram& tp, const Scenario& sc,
                                         const conic::SolveOptions& opt = {},
                                         conic::SolverState* warm = nullptr) {
    TrajectoryResult out;
    const conic::ConicSolution sol = conic::solve(tp.program, opt, warm);
    out.status = sol.status;
    if (sol.status != conic::SolveStatus::optimal &&
        sol.status != conic::SolveStatus::near_optimal)
        return out;
    const int n = tp.n;
    out.plan.pos.resize(n);
    out.plan.pos[0] = sc.start_pos;
    for (int i = 1; i < n; ++i)
        out.plan.pos[i] =
            Vec2(sol.x(tp.x[i]) * tp.pos_scale, sol.x(tp.y[i]) * tp.pos_scale);

    const double overshoot = mobility_violation(out.plan, sc);
    if (overshoot > 0.05 * sc.max_step())
        throw contract_error("solve_trajectory: mobility violation beyond tolerance: " +
                             std::to_string(overshoot));
    // clip steps onto the mobility ball, alternating with the endpoint ball;
    // the shrink factor forces strict progress so the sweep terminates
    const double dmax = sc.max_step();
    const double snap = dmax * (1.0 - 1e-12);
    for (int pass = 0; pass < 200 && mobility_violation(out.plan, sc) > 0.0; ++pass) {
        for (int i = 0; i + 1 < n; ++i) {
            const Vec2 step = out.plan.pos[i + 1] - out.plan.pos[i];
            const double len = step.norm();
            if (len > dmax) out.plan.pos[i + 1] = out.plan.pos[i] + step * (snap / len);
        }
        const Vec2 back = out.plan.pos[n - 1] - sc.final_pos;
        if (back.norm() > dmax)
            out.plan.pos[n - 1] = sc.final_pos + back * (snap / back.norm());
        for (int i = n - 1; i > 1; --i) {
            const Vec2 step = out.plan.pos[i - 1] - out.plan.pos[i];
            const double len = step.norm();
            if (len > dmax) out.plan.pos[i - 1] = out.plan.pos[i] + step * (snap / len);
        }
    }

    auto grab = [&](const std::vector<int>& idx, const Vec& ref) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = sol.x(idx[i]) * ref(i);
        return v;
    };
    out.slacks.u = grab(tp.u, tp.u_ref);
    out.slacks.e = grab(tp.e, tp.e_ref);
    out.slacks.s = grab(tp.s, tp.s_ref);
    out.slacks.t = grab(tp.t, tp.t_ref);
    out.slacks.zeta = grab(tp.zeta, tp.zeta_ref);
    out.slacks.rd = grab(tp.rd, tp.rd_ref);
    out.slacks.ru = grab(tp.ru, tp.ru_ref);
    out.surrogate = sol.objective;
    return out;
}

} // namespace securis

#endif
