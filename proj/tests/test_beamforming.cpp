// SPDX-License-Identifier: Apache-2.0

#include "securis/beamforming.hpp"

#include <catch2/catch.hpp>

using namespace securis;

namespace {

Scenario small_scenario() {
    Scenario sc;
    sc.ris_nx = 2;
    sc.ris_nz = 1;
    sc.flight_period = 0.4;
    sc.slot_len = 0.4;
    sc.validate();
    return sc;
}

BeamSide make_dl(const Scenario& sc, std::uint64_t seed, double power, double delta_a) {
    const ChannelRealization r = sample_realization(sc, seed);
    const SlotChannels ch = composite_channels(r, Vec2(-40.0, 35.0), sc);
    const UncertaintyModel u = uncertainty_model(r, delta_a);
    return dl_side(r, ch, power, sc, u.eps1);
}

// exhaustive search over the phase grid (M = 2)
std::pair<double, CVec> grid_best(const BeamSide& side, double xi0, int steps) {
    double best = -1e18;
    CVec best_v(3);
    CVec v(3);
    v(2) = 1.0;
    for (int i = 0; i < steps; ++i) {
        v(0) = std::exp(cxd(0.0, 2.0 * pi * i / steps));
        for (int j = 0; j < steps; ++j) {
            v(1) = std::exp(cxd(0.0, 2.0 * pi * j / steps));
            const double s = side_score(side, xi0, v);
            if (s > best) {
                best = s;
                best_v = v;
            }
        }
    }
    return {best, best_v};
}

} // namespace

TEST_CASE("lmi blocks are hermitian and certify the robust bound", "[beamforming]") {
    const Scenario sc = small_scenario();
    const BeamSide side = make_dl(sc, 3, 0.1, 0.7);
    Rng rng(4);
    CVec v(3);
    for (int i = 0; i < 2; ++i) v(i) = std::exp(cxd(0.0, 2.0 * pi * rng.uniform()));
    v(2) = 1.0;
    const CMat vg = v * v.adjoint();
    const double xi_tight = side_leak_snr(side, v);

    // Hermitian by construction
    const LmiBlocks lb = build_lmi_blocks(side, vg, xi_tight * 1.05, 1.0);
    CHECK((lb.u2 - lb.u2.adjoint()).norm() < 1e-12 * std::max(1.0, lb.u2.norm()));

    // a multiplier certifying xi slightly above the worst case must exist
    bool feasible = false;
    for (double eta = 1e-4; eta < 1e6; eta *= 1.6) {
        const LmiBlocks b = build_lmi_blocks(side, vg, xi_tight * 1.05, eta);
        Eigen::SelfAdjointEigenSolver<CMat> eig(b.u1 - b.u2, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() >= -1e-12) {
            feasible = true;
            break;
        }
    }
    CHECK(feasible);

    // no multiplier can certify xi strictly below the worst case
    for (double eta = 1e-4; eta < 1e6; eta *= 1.6) {
        const LmiBlocks b = build_lmi_blocks(side, vg, xi_tight * 0.95, eta);
        Eigen::SelfAdjointEigenSolver<CMat> eig(b.u1 - b.u2, Eigen::EigenvaluesOnly);
        REQUIRE(eig.eigenvalues().minCoeff() < 0.0);
    }
}

TEST_CASE("zero power makes the lmi trivially feasible", "[beamforming]") {
    const Scenario sc = small_scenario();
    const BeamSide side = make_dl(sc, 5, 0.0, 0.7);
    const CMat vg = CMat::Identity(3, 3);
    const LmiBlocks b = build_lmi_blocks(side, vg, 0.0, 0.0);
    CHECK(b.u2.norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<CMat> eig(b.u1 - b.u2, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("slot sdp with randomization approaches the exhaustive optimum", "[beamforming]") {
    const Scenario sc = small_scenario();
    std::vector<double> gaps;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const BeamSide side = make_dl(sc, seed, 0.08, 0.0); // perfect CSI instance
        CVec v0 = CVec::Ones(3);
        const double xi0 = side_leak_snr(side, v0);
        conic::SolveOptions opt;
        opt.eps = 1e-8;
        const SideSdpResult res = solve_side_sdp(side, xi0, opt);
        REQUIRE(res.status == conic::SolveStatus::optimal);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(res.v_gram(i, i).real() - 1.0) <= 1e-6);
        Eigen::SelfAdjointEigenSolver<CMat> eig(res.v_gram, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-7);

        Rng rng(seed * 97);
        auto score = [&](const CVec& v) { return side_score(side, xi0, v); };
        const CVec v = gaussian_randomization(res.v_gram, 100, score, rng);
        const auto [gbest, gv] = grid_best(side, xi0, 256);
        // the continuous solution may top the discrete grid by its resolution
        CHECK(score(v) <= gbest + 1e-3);
        gaps.push_back((gbest - score(v)) / std::max(1e-12, std::abs(gbest)));
    }
    std::sort(gaps.begin(), gaps.end());
    CHECK(gaps[gaps.size() / 2] <= 0.02); // median relative gap within 2%
}

TEST_CASE("robust sdp: lmi residual of the solution is psd", "[beamforming]") {
    const Scenario sc = small_scenario();
    for (std::uint64_t seed = 21; seed <= 24; ++seed) {
        const BeamSide side = make_dl(sc, seed, 0.1, 0.7);
        const double xi0 = side_leak_snr(side, CVec::Ones(3));
        const SideSdpResult res = solve_side_sdp(side, xi0);
        REQUIRE((res.status == conic::SolveStatus::optimal ||
                 res.status == conic::SolveStatus::near_optimal));
        const LmiBlocks b = build_lmi_blocks(side, res.v_gram, res.xi, res.eta);
        Eigen::SelfAdjointEigenSolver<CMat> eig(b.u1 - b.u2, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-7);
        CHECK(res.eta >= -1e-12);
        CHECK(res.xi >= -1e-12);

        // the xi slack upper-bounds the worst-case SNR of the randomized phases
        // up to randomization loss
        Rng rng(seed);
        auto score = [&](const CVec& v) { return side_score(side, xi0, v); };
        const CVec v = gaussian_randomization(res.v_gram, 100, score, rng);
        CHECK(side_leak_snr(side, v) <= res.xi * 1.1 + 1e-9);
    }
}

TEST_CASE("rank-one input is recovered exactly", "[beamforming]") {
    Rng rng(31);
    CVec v(4);
    for (int i = 0; i < 3; ++i) v(i) = std::exp(cxd(0.0, 2.0 * pi * rng.uniform()));
    v(3) = 1.0;
    const CMat vg = v * v.adjoint();
    auto score = [&](const CVec& cand) { return -(cand - v).norm(); };
    Rng rng2(32);
    const CVec rec = gaussian_randomization(vg, 5, score, rng2);
    CHECK((rec - v).norm() < 1e-9);
}

TEST_CASE("randomization rejects a bad candidate count", "[beamforming]") {
    const CMat vg = CMat::Identity(3, 3);
    Rng rng(1);
    CHECK_THROWS_AS(gaussian_randomization(vg, 0, [](const CVec&) { return 0.0; }, rng),
                    contract_error);
}

TEST_CASE("sdp surrogate never falls below the previous feasible point", "[beamforming]") {
    const Scenario sc = small_scenario();
    for (std::uint64_t seed = 41; seed <= 44; ++seed) {
        const BeamSide side = make_dl(sc, seed, 0.1, 0.5);
        Rng rng(seed);
        CVec prev(3);
        for (int i = 0; i < 2; ++i) prev(i) = std::exp(cxd(0.0, 2.0 * pi * rng.uniform()));
        prev(2) = 1.0;
        const double xi0 = side_leak_snr(side, prev);
        const SideSdpResult res = solve_side_sdp(side, xi0);
        REQUIRE((res.status == conic::SolveStatus::optimal ||
                 res.status == conic::SolveStatus::near_optimal));
        // the previous point is feasible for the relaxation, so the relaxed
        // optimum cannot be worse than its surrogate value
        CHECK(res.surrogate >= side_score(side, xi0, prev) - 1e-6);

        auto score = [&](const CVec& v) { return side_score(side, xi0, v); };
        const CVec v = gaussian_randomization(res.v_gram, 100, score, rng, {prev});
        CHECK(score(v) >= score(prev) - 1e-12);
    }
}
