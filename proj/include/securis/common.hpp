// SPDX-License-Identifier: Apache-2.0
//
// securis -- RIS-assisted UAV secure-link simulation and optimization toolkit

#ifndef SECURIS_COMMON_HPP
#define SECURIS_COMMON_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace securis {

using cxd = std::complex<double>;
using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm2watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double log2p1(double x) { return std::log2(1.0 + x); }

// Numeric-contract violations (bad dimensions, invalid arguments).
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Deterministic random stream. Gaussian variates go through an explicit
// Box-Muller transform so sequences are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_mix_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0, 1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * pi * u2);
    }

    // CN(0,1): unit-variance circularly-symmetric complex Gaussian
    cxd cgaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(1.0 - u1));
        return {r * std::cos(2.0 * pi * u2), r * std::sin(2.0 * pi * u2)};
    }

    CVec cgaussian_vec(int n) {
        CVec v(n);
        for (int i = 0; i < n; ++i) v(i) = cgaussian();
        return v;
    }

    // Independent substream derived from this stream's seed and a stream tag.
    Rng fork(std::uint64_t stream) const {
        std::uint64_t z = seed_mix_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

  private:
    std::mt19937_64 gen_;
    std::uint64_t seed_mix_ = 0;
};

} // namespace securis

#endif
