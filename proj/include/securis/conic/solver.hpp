// SPDX-License-Identifier: Apache-2.0
//
// First-order conic solver: operator splitting on the homogeneous self-dual
// embedding, with Ruiz equilibration and over-relaxation. Deterministic for
// fixed inputs and options.

#ifndef SECURIS_CONIC_SOLVER_HPP
#define SECURIS_CONIC_SOLVER_HPP

#include "securis/conic/cones.hpp"

#include <Eigen/SparseCholesky>
#include <limits>

namespace securis::conic {

enum class SolveStatus { optimal, near_optimal, infeasible, unbounded, failed };

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::near_optimal: return "near-optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::failed: return "failed";
    }
    return "?";
}

struct SolveOptions {
    double eps = 1e-8;        // target for feasibility residuals and relative gap
    int max_iters = 200000;
    double relax = 1.5;       // over-relaxation parameter
    int check_every = 25;
    bool equilibrate = true;
    int ruiz_passes = 10;
    double primal_weight = 1.0; // scales b against c in the embedding
};

struct ConicSolution {
    Vec x;                 // primal values (program variables)
    Vec s;                 // cone slacks, F x + g scale
    Vec y;                 // dual values per constraint row
    SolveStatus status = SolveStatus::failed;
    double primal_res = std::numeric_limits<double>::infinity();
    double dual_res = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    double objective = 0.0; // value of the maximized objective
    int iters = 0;
    std::string message;
};

// Opaque warm-start state; reusing it across related solves of identically
// shaped programs shortens convergence considerably.
struct SolverState {
    Vec u, v;
    double balance = 1.0; // learned primal/dual rescaling
    bool valid = false;
};

namespace detail {

struct Scaling {
    Vec row;   // D
    Vec col;   // E
    double sb = 1.0, sc = 1.0;
};

// Block-aware Ruiz equilibration; rows of a non-separable cone block share a
// single scale so the cone is preserved.
inline Scaling equilibrate(Eigen::SparseMatrix<double>& a, const std::vector<ConeBlock>& blocks,
                           int passes) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Scaling sc;
    sc.row = Vec::Ones(m);
    sc.col = Vec::Ones(n);
    for (int pass = 0; pass < passes; ++pass) {
        Vec rmax = Vec::Zero(m), cmax = Vec::Zero(n);
        for (int j = 0; j < a.outerSize(); ++j)
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it) {
                const double v = std::abs(it.value());
                rmax(it.row()) = std::max(rmax(it.row()), v);
                cmax(it.col()) = std::max(cmax(it.col()), v);
            }
        // unify scales within multi-row cone blocks (geometric mean of extremes)
        int r0 = 0;
        for (const auto& b : blocks) {
            if (b.cone != Cone::zero && b.cone != Cone::nonneg && b.rows > 1) {
                double mx = 0.0;
                for (int r = r0; r < r0 + b.rows; ++r) mx = std::max(mx, rmax(r));
                for (int r = r0; r < r0 + b.rows; ++r) rmax(r) = mx;
            }
            r0 += b.rows;
        }
        Vec rs(m), cs(n);
        for (int i = 0; i < m; ++i) rs(i) = rmax(i) > 0.0 ? 1.0 / std::sqrt(rmax(i)) : 1.0;
        for (int j = 0; j < n; ++j) cs(j) = cmax(j) > 0.0 ? 1.0 / std::sqrt(cmax(j)) : 1.0;
        for (int j = 0; j < a.outerSize(); ++j)
            for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it)
                it.valueRef() *= rs(it.row()) * cs(it.col());
        sc.row.array() *= rs.array();
        sc.col.array() *= cs.array();
    }
    return sc;
}

} // namespace detail

inline ConicSolution solve(const ConicProgram& prog, const SolveOptions& opt = {},
                           SolverState* warm = nullptr) {
    const int n = prog.num_vars;
    const int m = prog.num_rows();
    ConicSolution sol;
    if (n == 0 || m == 0) {
        sol.status = SolveStatus::failed;
        sol.message = "empty program";
        return sol;
    }

    // minimize c'x s.t. Ax + s = b with A = -F, b = g
    Eigen::SparseMatrix<double> a = (-prog.F).eval();
    Vec b = prog.g;
    Vec c = -prog.objective;

    detail::Scaling scal;
    if (opt.equilibrate) {
        scal = detail::equilibrate(a, prog.blocks, opt.ruiz_passes);
        b.array() *= scal.row.array();
        c.array() *= scal.col.array();
    } else {
        scal.row = Vec::Ones(m);
        scal.col = Vec::Ones(n);
    }
    double balance = opt.primal_weight;
    if (warm != nullptr && warm->valid && warm->balance > 0.0) balance = warm->balance;
    scal.sb = balance / std::max(b.norm(), 1e-6);
    scal.sc = 1.0 / std::max(c.norm(), 1e-6);
    b *= scal.sb;
    c *= scal.sc;

    const Eigen::SparseMatrix<double> at = a.transpose();

    // factor I + A'A once
    Eigen::SparseMatrix<double> gram = (at * a).pruned();
    Eigen::SparseMatrix<double> eye(n, n);
    eye.setIdentity();
    gram = (gram + eye).eval();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(gram);
    if (chol.info() != Eigen::Success) {
        sol.status = SolveStatus::failed;
        sol.message = "factorization failed";
        return sol;
    }
    auto solve_m = [&](const Vec& w1, const Vec& w2, Vec& z1, Vec& z2) {
        z1 = chol.solve(w1 - at * w2);
        z2 = w2 + a * z1;
    };
    Vec gx(n), gy(m);
    solve_m(c, b, gx, gy);                   // M^-1 [c; b]
    double hg = c.dot(gx) + b.dot(gy);       // h' M^-1 h  (> 0)

    const int dim = n + m + 1;
    Vec u = Vec::Zero(dim), v = Vec::Zero(dim);
    if (warm != nullptr && warm->valid && warm->u.size() == dim) {
        u = warm->u;
        v = warm->v;
    } else {
        u(dim - 1) = 1.0;
        v(dim - 1) = 1.0;
    }

    // precompute block row offsets
    std::vector<int> offs;
    offs.reserve(prog.blocks.size());
    {
        int r0 = 0;
        for (const auto& bl : prog.blocks) {
            offs.push_back(r0);
            r0 += bl.rows;
        }
    }

    const double bnorm_orig = prog.g.norm();
    const double cnorm_orig = prog.objective.norm();

    Vec ut(dim), w(dim), p1(n), p2(m), diff(dim);
    Vec proj_hints = Vec::Constant(static_cast<int>(prog.blocks.size()), -1.0);
    Vec best_x, best_y, best_s;
    double best_err = std::numeric_limits<double>::infinity();
    double best_pr = 0, best_dr = 0, best_gap = 0, best_obj = 0;
    int it = 0;
    int last_rebalance = 0;
    for (it = 1; it <= opt.max_iters; ++it) {
        // ut = (I+Q)^-1 (u+v)
        w = u + v;
        solve_m(w.head(n), w.segment(n, m), p1, p2);
        const double ztau = (w(dim - 1) + c.dot(p1) + b.dot(p2)) / (1.0 + hg);
        ut.head(n) = p1 - ztau * gx;
        ut.segment(n, m) = p2 - ztau * gy;
        ut(dim - 1) = ztau;

        // over-relaxation, then project u onto R^n x K* x R+
        ut = opt.relax * ut + (1.0 - opt.relax) * u;
        diff = ut - v; // projection input; becomes the next u
        for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi)
            project_dual(prog.blocks[bi], diff.data() + n + offs[bi], &proj_hints(bi));
        diff(dim - 1) = std::max(diff(dim - 1), 0.0);
        v += diff - ut;
        u = diff;

        if (it % opt.check_every != 0 && it != opt.max_iters) continue;

        const double tau = u(dim - 1);
        const double kap = v(dim - 1);
        if (tau > 1e-12 * std::max(1.0, kap)) {
            // unscale candidate solution
            Vec x = scal.col.asDiagonal() * u.head(n) / (tau * scal.sb);
            Vec y = scal.row.asDiagonal() * u.segment(n, m) / (tau * scal.sc);
            Vec s = (v.segment(n, m).array() / scal.row.array()).matrix() / (tau * scal.sb);
            const double pres = (prog.g - s + prog.F * x).norm() / (1.0 + bnorm_orig);
            const double dres = (prog.F.transpose() * y + prog.objective).norm() /
                                (1.0 + cnorm_orig);
            const double pobj = prog.objective.dot(x); // maximized objective
            const double dobj_min = -prog.g.dot(y);    // dual of the min form
            const double gap =
                std::abs(-pobj - dobj_min) / (1.0 + std::abs(pobj) + std::abs(dobj_min));
            const double err = std::max({pres, dres, gap});
            if (err < best_err) {
                best_err = err;
                best_x = x;
                best_y = y;
                best_s = s;
                best_pr = pres;
                best_dr = dres;
                best_gap = gap;
                best_obj = pobj;
            }
            if (err <= opt.eps) break;
            // adaptive primal/dual rebalancing: rescale b when the residuals
            // drift apart, remap the iterates, refresh the cached solves
            if (it - last_rebalance >= 400 && it + 400 < opt.max_iters) {
                const double ratio = pres / std::max(dres, 1e-300);
                if (ratio > 8.0 || ratio < 0.125) {
                    const double f = std::clamp(std::sqrt(ratio), 0.2, 5.0);
                    b *= f;
                    scal.sb *= f;
                    balance *= f;
                    u.head(n) *= f;
                    v.segment(n, m) *= f;
                    solve_m(c, b, gx, gy);
                    hg = c.dot(gx) + b.dot(gy);
                    last_rebalance = it;
                }
            }
        } else {
            // certificate checks
            Vec yc = scal.row.asDiagonal() * u.segment(n, m);
            const double bty = prog.g.dot(yc);
            if (bty < -1e-12) {
                yc /= -bty;
                if (((-prog.F).transpose() * yc).norm() <= opt.eps) {
                    sol.status = SolveStatus::infeasible;
                    sol.message = "primal infeasibility certificate";
                    sol.iters = it;
                    if (warm != nullptr) warm->valid = false;
                    return sol;
                }
            }
            Vec xc = scal.col.asDiagonal() * u.head(n);
            const double ctx = -prog.objective.dot(xc);
            if (ctx < -1e-12) {
                xc /= -ctx;
                Vec sc2 = (v.segment(n, m).array() / scal.row.array()).matrix() / (-ctx);
                if (((-prog.F) * xc + sc2).norm() <= opt.eps) {
                    sol.status = SolveStatus::unbounded;
                    sol.message = "dual infeasibility certificate";
                    sol.iters = it;
                    if (warm != nullptr) warm->valid = false;
                    return sol;
                }
            }
        }
    }

    if (warm != nullptr) {
        warm->u = u;
        warm->v = v;
        warm->balance = balance;
        warm->valid = true;
    }

    sol.iters = std::min(it, opt.max_iters);
    if (!best_x.size()) {
        sol.status = SolveStatus::failed;
        sol.message = "no solution candidate (tau stayed near zero)";
        return sol;
    }
    sol.x = best_x;
    sol.y = best_y;
    sol.s = best_s;
    sol.primal_res = best_pr;
    sol.dual_res = best_dr;
    sol.gap = best_gap;
    sol.objective = best_obj;
    const double achieved = best_err;
    if (achieved <= opt.eps)
        sol.status = achieved <= 1e-7 ? SolveStatus::optimal : SolveStatus::near_optimal;
    else if (achieved <= 10.0 * opt.eps)
        sol.status = SolveStatus::near_optimal;
    else {
        sol.status = SolveStatus::failed;
        sol.message = "residual target missed: " + std::to_string(achieved);
    }
    return sol;
}

} // namespace securis::conic

#endif
