// SPDX-License-Identifier: Apache-2.0
//
// Solver-agnostic standard-form cone program: maximize obj'x subject to
// F x + g lying in a product of cones. Hermitian PSD constraints are realified
// to symmetric blocks via the [Re, -Im; Im, Re] embedding at build time.

#ifndef SECURIS_CONIC_PROGRAM_HPP
#define SECURIS_CONIC_PROGRAM_HPP

#include "securis/common.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <sstream>
#include <vector>

namespace securis::conic {

enum class Cone {
    zero,     // {0}
    nonneg,   // componentwise >= 0
    soc,      // (t, u): ||u|| <= t
    rsoc,     // (a, b, u): 2ab >= ||u||^2, a,b >= 0
    psd,      // svec of a real symmetric PSD matrix
    exp3,     // (x, y, z): y e^(x/y) <= z  (closure)
    pow3,     // (x, y, z): x^a y^(1-a) >= |z|, x,y >= 0
};

struct ConeBlock {
    Cone cone;
    int rows = 0;
    int psd_side = 0;            // side of the symmetric matrix for psd blocks
    bool hermitian_pair = false; // psd block is a realified Hermitian matrix
    double exponent = 0.0;       // a for pow3 blocks
};

struct ConicProgram {
    int num_vars = 0;
    Vec objective; // maximized
    Eigen::SparseMatrix<double> F;
    Vec g;
    std::vector<ConeBlock> blocks;

    int num_rows() const { return static_cast<int>(g.size()); }
};

inline int svec_len(int side) { return side * (side + 1) / 2; }
inline int svec_index(int i, int j) { return j * (j + 1) / 2 + i; } // requires i <= j

inline const double sqrt2 = std::sqrt(2.0);

// Affine scalar expression over program variables.
class LinExpr {
  public:
    LinExpr() = default;
    /*implicit*/ LinExpr(double constant) : constant_(constant) {}
    static LinExpr variable(int idx, double coef = 1.0) {
        LinExpr e;
        e.terms_.emplace_back(idx, coef);
        return e;
    }

    LinExpr& operator+=(const LinExpr& o) {
        constant_ += o.constant_;
        terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
        return *this;
    }
    LinExpr& operator-=(const LinExpr& o) {
        constant_ -= o.constant_;
        for (const auto& [i, c] : o.terms_) terms_.emplace_back(i, -c);
        return *this;
    }
    LinExpr& operator*=(double k) {
        constant_ *= k;
        for (auto& [i, c] : terms_) c *= k;
        return *this;
    }
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(double k, LinExpr a) { return a *= k; }
    friend LinExpr operator-(LinExpr a) { return a *= -1.0; }

    double constant() const { return constant_; }
    const std::vector<std::pair<int, double>>& terms() const { return terms_; }

  private:
    std::vector<std::pair<int, double>> terms_;
    double constant_ = 0.0;
};

// Complex affine expression, a (real, imag) pair of LinExpr.
struct CxExpr {
    LinExpr re, im;

    CxExpr() = default;
    /*implicit*/ CxExpr(cxd constant) : re(constant.real()), im(constant.imag()) {}
    CxExpr(LinExpr r, LinExpr i) : re(std::move(r)), im(std::move(i)) {}

    CxExpr conj() const { return {re, -im}; }
    CxExpr& operator+=(const CxExpr& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    friend CxExpr operator+(CxExpr a, const CxExpr& b) { return a += b; }
    friend CxExpr operator*(cxd k, const CxExpr& a) {
        return {k.real() * a.re - k.imag() * a.im, k.real() * a.im + k.imag() * a.re};
    }
};

class ProgramBuilder {
  public:
    int add_var() { return num_vars_++; }
    std::vector<int> add_vars(int k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = add_var();
        return idx;
    }

    void maximize(int var, double coef) { obj_.emplace_back(var, coef); }

    void add_zero(const LinExpr& e) { push_block({Cone::zero, 1}, {e}); }
    void add_nonneg(const LinExpr& e) { push_block({Cone::nonneg, 1}, {e}); }
    // ||u|| <= t
    void add_soc(const LinExpr& t, const std::vector<LinExpr>& u) {
        std::vector<LinExpr> rows{t};
        rows.insert(rows.end(), u.begin(), u.end());
        push_block({Cone::soc, static_cast<int>(rows.size())}, rows);
    }
    // ||u||^2 <= 2ab, a,b >= 0
    void add_rsoc(const LinExpr& a, const LinExpr& b, const std::vector<LinExpr>& u) {
        std::vector<LinExpr> rows{a, b};
        rows.insert(rows.end(), u.begin(), u.end());
        push_block({Cone::rsoc, static_cast<int>(rows.size())}, rows);
    }
    // y e^(x/y) <= z
    void add_exp(const LinExpr& x, const LinExpr& y, const LinExpr& z) {
        push_block({Cone::exp3, 3}, {x, y, z});
    }
    // x^a y^(1-a) >= |z|
    void add_pow(const LinExpr& x, const LinExpr& y, const LinExpr& z, double a) {
        ConeBlock b{Cone::pow3, 3};
        b.exponent = a;
        push_block(b, {x, y, z});
    }

    // Real symmetric PSD block; mat is a dense side x side matrix of entries
    // (row-major), of which the upper triangle is used.
    void add_psd(int side, const std::vector<LinExpr>& mat, bool hermitian_pair = false) {
        std::vector<LinExpr> rows(svec_len(side));
        for (int j = 0; j < side; ++j)
            for (int i = 0; i <= j; ++i) {
                LinExpr e = mat[i * side + j];
                if (i != j) e *= sqrt2;
                rows[svec_index(i, j)] = std::move(e);
            }
        ConeBlock b{Cone::psd, static_cast<int>(rows.size())};
        b.psd_side = side;
        b.hermitian_pair = hermitian_pair;
        push_block(b, rows);
    }

    // Hermitian PSD block of complex side k, realified to side 2k. entry(i,j)
    // must return the (i,j) element for i <= j; the conjugate transpose is filled in.
    void add_psd_hermitian(int k, const std::function<CxExpr(int, int)>& entry) {
        const int side = 2 * k;
        std::vector<LinExpr> mat(side * side);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                const CxExpr e = entry(i, j);
                mat[i * side + j] = e.re;                              // Re block
                mat[(i + k) * side + (j + k)] = e.re;                  // Re block copy
                mat[i * side + (j + k)] = -e.im;                       // -Im
                if (i != j) mat[j * side + (i + k)] = e.im;            // -Im(j,i) = Im(i,j)
            }
        add_psd(side, mat, true);
    }

    ConicProgram build() const {
        ConicProgram p;
        p.num_vars = num_vars_;
        p.objective = Vec::Zero(num_vars_);
        for (const auto& [i, c] : obj_) p.objective(i) += c;
        const int m = static_cast<int>(rows_.size());
        p.g.resize(m);
        std::vector<Eigen::Triplet<double>> trips;
        for (int r = 0; r < m; ++r) {
            p.g(r) = rows_[r].constant();
            for (const auto& [i, c] : rows_[r].terms())
                if (c != 0.0) trips.emplace_back(r, i, c);
        }
        p.F.resize(m, num_vars_);
        p.F.setFromTriplets(trips.begin(), trips.end());
        p.F.makeCompressed();
        p.blocks = blocks_;
        return p;
    }

  private:
    void push_block(ConeBlock b, const std::vector<LinExpr>& rows) {
        b.rows = static_cast<int>(rows.size());
        blocks_.push_back(b);
        rows_.insert(rows_.end(), rows.begin(), rows.end());
    }

    int num_vars_ = 0;
    std::vector<std::pair<int, double>> obj_;
    std::vector<LinExpr> rows_;
    std::vector<ConeBlock> blocks_;
};

inline const char* cone_name(Cone c) {
    switch (c) {
        case Cone::zero: return "zero";
        case Cone::nonneg: return "nonneg";
        case Cone::soc: return "soc";
        case Cone::rsoc: return "rsoc";
        case Cone::psd: return "psd";
        case Cone::exp3: return "exp";
        case Cone::pow3: return "pow";
    }
    return "?";
}

// Plain-text standard-form listing, one constraint block per line.
inline std::string dump(const ConicProgram& p) {
    std::ostringstream os;
    os << "maximize";
    for (int i = 0; i < p.num_vars; ++i)
        if (p.objective(i) != 0.0) os << " " << p.objective(i) << "*x" << i;
    os << "\n";
    Mat dense = Mat(p.F);
    int row = 0;
    for (const auto& b : p.blocks) {
        os << cone_name(b.cone);
        if (b.cone == Cone::pow3) os << "(" << b.exponent << ")";
        if (b.cone == Cone::psd) os << "(side=" << b.psd_side << ")";
        os << ":";
        for (int r = row; r < row + b.rows; ++r) {
            os << " [" << p.g(r);
            for (int i = 0; i < p.num_vars; ++i)
                if (dense(r, i) != 0.0) os << (dense(r, i) >= 0 ? " +" : " ") << dense(r, i) << "*x" << i;
            os << "]";
        }
        os << "\n";
        row += b.rows;
    }
    return os.str();
}

} // namespace securis::conic

#endif
