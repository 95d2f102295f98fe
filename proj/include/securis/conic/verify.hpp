// SPDX-License-Identifier: Apache-2.0
//
// Backend-independent residual verification: recompute every block's slack
// from the program data and measure its violation of the cone definition.

#ifndef SECURIS_CONIC_VERIFY_HPP
#define SECURIS_CONIC_VERIFY_HPP

#include "securis/conic/solver.hpp"

namespace securis::conic {

struct BlockReport {
    int index = 0;
    Cone cone = Cone::zero;
    double violation = 0.0; // natural-units distance estimate to the cone
};

struct VerifyReport {
    bool ok = true;
    double max_violation = 0.0;
    double objective = 0.0;
    std::vector<BlockReport> offending; // blocks beyond 10x tolerance
};

namespace detail {

inline double cone_violation(const ConeBlock& b, const double* s) {
    switch (b.cone) {
        case Cone::zero: {
            double w = 0.0;
            for (int i = 0; i < b.rows; ++i) w = std::max(w, std::abs(s[i]));
            return w;
        }
        case Cone::nonneg: {
            double w = 0.0;
            for (int i = 0; i < b.rows; ++i) w = std::max(w, -s[i]);
            return std::max(w, 0.0);
        }
        case Cone::soc: {
            double nu = 0.0;
            for (int i = 1; i < b.rows; ++i) nu += s[i] * s[i];
            return std::max(0.0, std::sqrt(nu) - s[0]);
        }
        case Cone::rsoc: {
            const double inv = 1.0 / sqrt2;
            std::vector<double> t(s, s + b.rows);
            const double a = t[0], c = t[1];
            t[0] = (a + c) * inv;
            t[1] = (a - c) * inv;
            double nu = 0.0;
            for (int i = 1; i < b.rows; ++i) nu += t[i] * t[i];
            return std::max(0.0, std::sqrt(nu) - t[0]);
        }
        case Cone::psd: {
            const int side = b.psd_side;
            Mat x(side, side);
            for (int j = 0; j < side; ++j)
                for (int i = 0; i <= j; ++i) {
                    const double val = s[svec_index(i, j)] * (i == j ? 1.0 : 1.0 / sqrt2);
                    x(i, j) = val;
                    x(j, i) = val;
                }
            Eigen::SelfAdjointEigenSolver<Mat> eig(x, Eigen::EigenvaluesOnly);
            return std::max(0.0, -eig.eigenvalues().minCoeff());
        }
        case Cone::exp3: {
            const double x = s[0], y = s[1], z = s[2];
            if (y <= 0.0) {
                double w = std::max(0.0, -y);
                w = std::max(w, std::max(0.0, x));
                w = std::max(w, std::max(0.0, -z));
                return w;
            }
            if (z <= 0.0) return std::max(-z, y * std::exp(std::min(x / y, 30.0)));
            return std::max(0.0, x - y * std::log(z / y));
        }
        case Cone::pow3: {
            const double x = s[0], y = s[1], z = s[2];
            double w = std::max(0.0, std::max(-x, -y));
            const double cap = std::pow(std::max(x, 0.0), b.exponent) *
                               std::pow(std::max(y, 0.0), 1.0 - b.exponent);
            return std::max(w, std::abs(z) - cap > 0.0 ? std::abs(z) - cap : 0.0);
        }
    }
    return 0.0;
}

} // namespace detail

inline VerifyReport verify(const ConicProgram& p, const ConicSolution& sol, double tol = 1e-7) {
    if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::near_optimal)
        throw contract_error("verify: solution is not optimal/near-optimal");
    VerifyReport rep;
    const Vec slack = p.F * sol.x + p.g;
    rep.objective = p.objective.dot(sol.x);
    int r0 = 0;
    int bi = 0;
    for (const auto& b : p.blocks) {
        const double v = detail::cone_violation(b, slack.data() + r0);
        rep.max_violation = std::max(rep.max_violation, v);
        if (v > 10.0 * tol) {
            rep.ok = false;
            rep.offending.push_back({bi, b.cone, v});
        }
        r0 += b.rows;
        ++bi;
    }
    return rep;
}

} // namespace securis::conic

#endif
