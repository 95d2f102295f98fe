// SPDX-License-Identifier: Apache-2.0
//
// Euclidean projections onto the supported cones and their duals. The
// exponential- and power-cone projections follow the univariate root-finding
// approach used by first-order conic solvers.

#ifndef SECURIS_CONIC_CONES_HPP
#define SECURIS_CONIC_CONES_HPP

#include "securis/conic/program.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace securis::conic {

namespace proj {

inline void nonneg(double* v, int n) {
    for (int i = 0; i < n; ++i) v[i] = std::max(v[i], 0.0);
}

inline void soc(double* v, int n) {
    const double t = v[0];
    double nu = 0.0;
    for (int i = 1; i < n; ++i) nu += v[i] * v[i];
    nu = std::sqrt(nu);
    if (nu <= t) return;
    if (nu <= -t) {
        for (int i = 0; i < n; ++i) v[i] = 0.0;
        return;
    }
    const double a = 0.5 * (t + nu);
    v[0] = a;
    const double scale = a / nu;
    for (int i = 1; i < n; ++i) v[i] *= scale;
}

// Rotate the rotated cone onto the standard cone with an orthogonal involution.
inline void rsoc(double* v, int n) {
    const double inv = 1.0 / sqrt2;
    const double a = v[0], b = v[1];
    v[0] = (a + b) * inv;
    v[1] = (a - b) * inv;
    soc(v, n);
    const double p = v[0], q = v[1];
    v[0] = (p + q) * inv;
    v[1] = (p - q) * inv;
}

// Symmetric PSD projection on an svec-packed block.
inline void psd(double* v, int side) {
    Mat x(side, side);
    for (int j = 0; j < side; ++j)
        for (int i = 0; i <= j; ++i) {
            const double val = v[svec_index(i, j)] * (i == j ? 1.0 : 1.0 / sqrt2);
            x(i, j) = val;
            x(j, i) = val;
        }
    Eigen::SelfAdjointEigenSolver<Mat> eig(x);
    const Vec& lam = eig.eigenvalues();
    const Mat& u = eig.eigenvectors();
    Mat out = Mat::Zero(side, side);
    for (int k = 0; k < side; ++k)
        if (lam(k) > 0.0) out.noalias() += lam(k) * u.col(k) * u.col(k).transpose();
    for (int j = 0; j < side; ++j)
        for (int i = 0; i <= j; ++i)
            v[svec_index(i, j)] = out(i, j) * (i == j ? 1.0 : sqrt2);
}

// PSD projection of a realified Hermitian block: project the complex matrix,
// which halves the eigendecomposition size.
inline void psd_hermitian(double* v, int side) {
    const int k = side / 2;
    const double unscale = 1.0 / sqrt2;
    auto at = [&](int i, int j) { // symmetric read of the packed block
        return (i <= j) ? v[svec_index(i, j)] * (i == j ? 1.0 : unscale)
                        : v[svec_index(j, i)] * (i == j ? 1.0 : unscale);
    };
    CMat h(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double re = 0.5 * (at(i, j) + at(i + k, j + k));
            const double im = 0.5 * (at(i + k, j) - at(i, j + k));
            h(i, j) = cxd(re, im);
        }
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> eig(h);
    const Vec& lam = eig.eigenvalues();
    const CMat& u = eig.eigenvectors();
    CMat out = CMat::Zero(k, k);
    for (int q = 0; q < k; ++q)
        if (lam(q) > 0.0) out.noalias() += lam(q) * u.col(q) * u.col(q).adjoint();
    auto put = [&](int i, int j, double val) {
        if (i > j) std::swap(i, j);
        v[svec_index(i, j)] = val * (i == j ? 1.0 : sqrt2);
    };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i <= j) {
                put(i, j, out(i, j).real());
                put(i + k, j + k, out(i, j).real());
            }
            put(i, j + k, -out(i, j).imag());
        }
}

namespace detail {

// Inner Newton step of the exponential-cone projection: finds the z-increment
// for a fixed dual variable rho.
inline double exp_newton_1d(double rho, double y_hat, double z_hat) {
    constexpr int iters = 40;
    double t = std::max(-z_hat, 1e-9);
    for (int i = 0; i < iters; ++i) {
        const double quad = t * (t + z_hat) / (rho * rho);
        const double f = quad - y_hat / rho + std::log(t / rho) + 1.0;
        const double fp = (2.0 * t + z_hat) / (rho * rho) + 1.0 / t;
        const double dt = f / fp;
        t -= dt;
        if (t <= -z_hat) return 0.0;
        if (t <= 0.0) return z_hat;
        const double fscale = std::abs(quad) + std::abs(y_hat / rho) + 1.0;
        if (std::abs(f) < 1e-12 * fscale || std::abs(dt) < 1e-13 * std::max(1.0, std::abs(t)))
            break;
    }
    return t + z_hat;
}

inline void exp_solve_fixed_rho(const double* v, double* x, double rho) {
    x[2] = exp_newton_1d(rho, v[1], v[2]);
    x[1] = (x[2] - v[2]) * x[2] / rho;
    x[0] = v[0] - rho;
}

inline double exp_grad(const double* v, double* x, double rho) {
    exp_solve_fixed_rho(v, x, rho);
    if (x[1] <= 1e-14) return x[0];
    return x[0] + x[1] * std::log(x[1] / x[2]);
}

} // namespace detail

// K_exp = cl{(x,y,z): y e^(x/y) <= z, y > 0}. `hint` caches the dual variable
// of the previous projection of this block; consecutive inputs are close, so
// a warm bracket cuts the root search to a few evaluations.
inline void exp3(double* v, double* hint = nullptr) {
    const double r = v[0], s = v[1], t = v[2];
    constexpr double thresh = 1e-12;
    // already in the cone
    if ((s > 0.0 && s * std::exp(r / s) - t <= thresh) || (r <= 0.0 && s == 0.0 && t >= 0.0))
        return;
    // -v in the dual cone: projection is the origin
    constexpr double euler_e = 2.718281828459045235;
    if ((r > 0.0 && r * std::exp(s / r) + euler_e * t <= thresh) ||
        (r == 0.0 && s <= 0.0 && t <= 0.0)) {
        v[0] = v[1] = v[2] = 0.0;
        return;
    }
    // both first coordinates negative: closed form on the boundary ray
    if (r < 0.0 && s < 0.0) {
        v[1] = 0.0;
        v[2] = std::max(v[2], 0.0);
        return;
    }
    double x[3] = {r, s, t};
    double lb = 0.0, ub = 0.125;
    double glb = 0.0, gub;
    if (hint != nullptr && *hint > 0.0) {
        // bracket around the cached dual variable
        lb = *hint * 0.95;
        ub = *hint * (1.0 / 0.95);
        glb = detail::exp_grad(v, x, lb);
        while (glb <= 0.0 && lb > 1e-300) {
            ub = lb;
            gub = glb;
            lb *= 0.5;
            glb = detail::exp_grad(v, x, lb);
        }
        if (lb <= 1e-300) lb = 0.0;
        gub = detail::exp_grad(v, x, ub);
        while (gub > 0.0) {
            lb = ub;
            glb = gub;
            ub *= 2.0;
            gub = detail::exp_grad(v, x, ub);
        }
    } else {
        gub = detail::exp_grad(v, x, ub);
        while (gub > 0.0) {
            lb = ub;
            glb = gub;
            ub *= 2.0;
            gub = detail::exp_grad(v, x, ub);
        }
    }
    if (lb == 0.0 && glb <= 0.0) glb = std::max(1.0, std::abs(gub)); // gradient diverges at 0
    const double gscale = 1.0 + std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2]);
    // Illinois false position on the decreasing gradient; lb keeps g > 0
    double rho = ub;
    for (int i = 0; i < 40 && ub - lb > 1e-10 * std::max(1.0, ub); ++i) {
        rho = (glb != gub) ? lb + (ub - lb) * glb / (glb - gub) : 0.5 * (lb + ub);
        rho = std::clamp(rho, lb + 1e-16 * std::max(1.0, lb), ub - 1e-16 * std::max(1.0, ub));
        if (!(rho > lb && rho < ub)) break;
        const double gr = detail::exp_grad(v, x, rho);
        if (std::abs(gr) < 1e-11 * gscale) break;
        if (gr > 0.0) {
            lb = rho;
            glb = gr;
            gub *= 0.5;
        } else {
            ub = rho;
            gub = gr;
            glb *= 0.5;
        }
    }
    detail::exp_solve_fixed_rho(v, x, rho);
    if (hint != nullptr) *hint = rho;
    v[0] = x[0];
    v[1] = x[1];
    v[2] = x[2];
}

namespace detail {

inline double pow_calc_x(double r, double xh, double rh, double a) {
    const double x = 0.5 * (xh + std::sqrt(xh * xh + 4.0 * a * (rh - r) * r));
    return std::max(x, 1e-12);
}

} // namespace detail

// K_a = {(x,y,z): x^a y^(1-a) >= |z|, x,y >= 0}
inline void pow3(double* v, double a) {
    const double xh = v[0], yh = v[1], zh = v[2];
    const double rh = std::abs(zh);
    constexpr double thresh = 1e-12;
    if (xh >= 0.0 && yh >= 0.0 &&
        thresh + std::pow(xh, a) * std::pow(yh, 1.0 - a) >= rh)
        return;
    if (xh <= 0.0 && yh <= 0.0 &&
        thresh + std::pow(-xh, a) * std::pow(-yh, 1.0 - a) >=
            rh * std::pow(a, a) * std::pow(1.0 - a, 1.0 - a)) {
        v[0] = v[1] = v[2] = 0.0;
        return;
    }
    double r = rh / 2.0, x = 0.0, y = 0.0;
    for (int i = 0; i < 60; ++i) {
        x = detail::pow_calc_x(r, xh, rh, a);
        y = detail::pow_calc_x(r, yh, rh, 1.0 - a);
        const double f = std::pow(x, a) * std::pow(y, 1.0 - a) - r;
        if (std::abs(f) < 1e-11 * std::max(1.0, rh)) break;
        const double dxdr = a * (rh - 2.0 * r) / (2.0 * x - xh);
        const double dydr = (1.0 - a) * (rh - 2.0 * r) / (2.0 * y - yh);
        const double fp = (f + r) * (a * dxdr / x + (1.0 - a) * dydr / y) - 1.0;
        r = std::clamp(r - f / fp, 0.0, rh);
    }
    v[0] = x;
    v[1] = y;
    v[2] = (zh < 0.0) ? -r : r;
}

} // namespace proj

// Projection onto the primal cone of one block (in place). `hint` is an
// optional warm-start slot for the iterative projections.
inline void project_primal(const ConeBlock& b, double* v, double* hint = nullptr) {
    switch (b.cone) {
        case Cone::zero:
            for (int i = 0; i < b.rows; ++i) v[i] = 0.0;
            return;
        case Cone::nonneg: proj::nonneg(v, b.rows); return;
        case Cone::soc: proj::soc(v, b.rows); return;
        case Cone::rsoc: proj::rsoc(v, b.rows); return;
        case Cone::psd:
            if (b.hermitian_pair)
                proj::psd_hermitian(v, b.psd_side);
            else
                proj::psd(v, b.psd_side);
            return;
        case Cone::exp3: proj::exp3(v, hint); return;
        case Cone::pow3: proj::pow3(v, b.exponent); return;
    }
}

// Projection onto the dual cone. Self-dual blocks reuse the primal projection;
// the rest go through the Moreau identity Pi_K*(v) = v + Pi_K(-v).
inline void project_dual(const ConeBlock& b, double* v, double* hint = nullptr) {
    switch (b.cone) {
        case Cone::zero: return; // dual of {0} is everything
        case Cone::nonneg:
        case Cone::soc:
        case Cone::rsoc:
        case Cone::psd: project_primal(b, v); return;
        case Cone::exp3:
        case Cone::pow3: {
            double neg[3] = {-v[0], -v[1], -v[2]};
            project_primal(b, neg, hint);
            v[0] += neg[0];
            v[1] += neg[1];
            v[2] += neg[2];
            return;
        }
    }
}

} // namespace securis::conic

#endif
