// SPDX-License-Identifier: Apache-2.0

#include "securis/ao.hpp"

#include <catch2/catch.hpp>

using namespace securis;

namespace {

Scenario ao_scenario(int slots = 10) {
    Scenario sc;
    sc.start_pos = Vec2(-30.0, 20.0);
    sc.final_pos = Vec2(30.0, 20.0);
    sc.user_pos = Vec2(0.0, 25.0); // keeps the heuristic reachable at small N
    sc.flight_period = slots * 0.4;
    sc.slot_len = 0.4;
    sc.ris_nx = 2;
    sc.ris_nz = 1;
    sc.j_max = 6;
    sc.validate();
    return sc;
}

AoOptions fast_options() {
    AoOptions opt;
    opt.sdp.eps = 1e-6;
    opt.traj.eps = 1e-6;
    opt.traj.max_iters = 120000;
    opt.randomization_count = 50;
    return opt;
}

} // namespace

TEST_CASE("heuristic trajectory shape", "[ao]") {
    const Scenario sc = ao_scenario(20);
    const TrajectoryPlan plan = heuristic_trajectory(sc);
    REQUIRE(plan.num_slots() == 20);
    CHECK(mobility_violation(plan, sc) <= 1e-12);
    CHECK((plan.pos.front() - sc.start_pos).norm() == 0.0);
    CHECK((plan.pos.back() - sc.final_pos).norm() == 0.0);

    // travel slot count equals an independent step-by-step path simulation
    const double d = sc.max_step();
    const double d1 = (sc.user_pos - sc.start_pos).norm();
    int sim_steps = 0;
    double walked = 0.0;
    while (walked + 1e-12 < d1) {
        walked = std::min(d1, walked + d);
        ++sim_steps;
    }
    int arrival = -1;
    for (int i = 0; i < plan.num_slots(); ++i)
        if ((plan.pos[i] - sc.user_pos).norm() < 1e-9) {
            arrival = i;
            break;
        }
    REQUIRE(arrival >= 0);
    CHECK(arrival == sim_steps);

    // hover block in the middle
    int hover = 0;
    for (const auto& q : plan.pos)
        if ((q - sc.user_pos).norm() < 1e-9) ++hover;
    CHECK(hover >= 1);
}

TEST_CASE("degenerate heuristic cases", "[ao]") {
    Scenario sc = ao_scenario(4);
    sc.start_pos = sc.user_pos;
    sc.final_pos = sc.user_pos;
    sc.validate();
    const TrajectoryPlan plan = heuristic_trajectory(sc);
    for (const auto& q : plan.pos) CHECK((q - sc.user_pos).norm() == 0.0);

    Scenario bad = ao_scenario(4);
    bad.start_pos = Vec2(-4000.0, 0.0);
    bad.validate();
    CHECK_THROWS_AS(heuristic_trajectory(bad), scenario_error);
}

TEST_CASE("evaluate_secrecy basics", "[ao]") {
    const int n = 8;
    const Scenario sc = ao_scenario(n);
    const ChannelRealization real = sample_realization(sc, 3);
    Design d;
    d.trajectory = heuristic_trajectory(sc);
    d.phases = PhaseSchedule::identity(n, sc.num_elements());
    d.powers.dl = Vec::Zero(n);
    d.powers.ul = Vec::Zero(n);
    const SecrecySlice zero = evaluate_secrecy(real, d, sc, sc.delta_a);
    CHECK(zero.average == 0.0);

    d.powers.dl = Vec::Constant(n, sc.p_avg);
    d.powers.ul = Vec::Constant(n, sc.g_avg);
    const SecrecySlice on = evaluate_secrecy(real, d, sc, sc.delta_a);
    CHECK(on.average >= 0.0);
    CHECK(on.dl.minCoeff() >= 0.0);

    // independent end-to-end evaluation of one slot
    const int i = 1;
    const SlotChannels ch = composite_channels(real, d.trajectory.pos[i], sc);
    const UncertaintyModel u = uncertainty_model(real, sc.delta_a);
    const double rug =
        log2p1(d.powers.dl(i) * std::norm(composite_gain(ch.g1_stack, ch.g1_diag, d.phases.dl[i])) /
               sc.noise_power);
    const WorstCaseError wc = worst_case_error(real.est_e1, ch.e1_diag, d.phases.dl[i], u.eps1);
    const double rue = log2p1(d.powers.dl(i) * wc.attained_gain / sc.noise_power);
    CHECK(on.dl(i) == Approx(std::max(rug - rue, 0.0)).epsilon(1e-10));

    // perfect CSI collapse
    const SecrecySlice exact = evaluate_secrecy(real, d, sc, 0.0);
    CHECK(exact.average >= on.average - 1e-12);
}

TEST_CASE("jo run converges with a monotone trace", "[ao]") {
    const Scenario sc = ao_scenario(10);
    const ChannelRealization real = sample_realization(sc, 11);
    const AoResult res = run_jo(sc, real, Algorithm::jo, 11, fast_options());
    REQUIRE(res.report.trace.size() >= 2);
    for (std::size_t j = 1; j < res.report.trace.size(); ++j)
        CHECK(res.report.trace[j] >= res.report.trace[j - 1] - 0.02);
    CHECK(res.report.secrecy_rate == Approx(res.report.trace.back()).margin(1e-12));
    CHECK(mobility_violation(res.design.trajectory, sc) <= 1e-9);
    for (const CVec& v : res.design.phases.dl) {
        for (int i = 0; i < v.size(); ++i) CHECK(std::abs(std::abs(v(i)) - 1.0) < 1e-12);
        CHECK(v(v.size() - 1) == cxd(1.0, 0.0));
    }
    CHECK(res.design.powers.dl.mean() <= sc.p_avg + 1e-9);
    CHECK(res.design.powers.dl.maxCoeff() <= sc.p_peak + 1e-12);
}

TEST_CASE("runs are deterministic", "[ao]") {
    const Scenario sc = ao_scenario(8);
    const ChannelRealization real = sample_realization(sc, 5);
    const AoOptions opt = fast_options();
    const AoResult a = run_jo(sc, real, Algorithm::jo, 5, opt);
    const AoResult b = run_jo(sc, real, Algorithm::jo, 5, opt);
    REQUIRE(a.report.trace.size() == b.report.trace.size());
    for (std::size_t j = 0; j < a.report.trace.size(); ++j)
        CHECK(a.report.trace[j] == b.report.trace[j]);
    for (int i = 0; i < 6; ++i)
        CHECK((a.design.trajectory.pos[i] - b.design.trajectory.pos[i]).norm() == 0.0);

    // thread count must not change results
    AoOptions two = opt;
    two.threads = 2;
    const AoResult c = run_jo(sc, real, Algorithm::jo, 5, two);
    for (std::size_t j = 0; j < a.report.trace.size(); ++j)
        CHECK(a.report.trace[j] == c.report.trace[j]);
}

TEST_CASE("zero power budget terminates immediately", "[ao]") {
    Scenario sc = ao_scenario(8);
    sc.p_avg = 0.0;
    sc.p_peak = 0.0;
    sc.g_avg = 0.0;
    sc.g_peak = 0.0;
    sc.validate();
    const ChannelRealization real = sample_realization(sc, 2);
    const AoResult res = run_jo(sc, real, Algorithm::jo, 2, fast_options());
    CHECK(res.report.iterations == 1);
    CHECK(res.report.converged);
    CHECK(res.report.secrecy_rate == 0.0);
    for (double v : res.report.trace) CHECK(v == 0.0);
}

TEST_CASE("benchmark variants respect their freezes", "[ao]") {
    const Scenario sc = ao_scenario(8);
    const ChannelRealization real = sample_realization(sc, 7);
    const AoOptions opt = fast_options();

    const AoResult ht = run_benchmark(Algorithm::jo_ht, sc, real, 7, opt);
    const TrajectoryPlan heur = heuristic_trajectory(sc);
    for (int i = 0; i < 8; ++i)
        CHECK((ht.design.trajectory.pos[i] - heur.pos[i]).norm() == 0.0);

    const AoResult npb = run_benchmark(Algorithm::jo_npb, sc, real, 7, opt);
    for (const CVec& v : npb.design.phases.dl)
        CHECK((v - CVec::Ones(v.size())).norm() == 0.0);
}

TEST_CASE("zero uncertainty makes jo and jo_nr identical", "[ao]") {
    Scenario sc = ao_scenario(8);
    sc.delta_a = 0.0;
    sc.validate();
    const ChannelRealization real = sample_realization(sc, 13);
    const AoOptions opt = fast_options();
    const AoResult a = run_jo(sc, real, Algorithm::jo, 13, opt);
    const AoResult b = run_benchmark(Algorithm::jo_nr, sc, real, 13, opt);
    REQUIRE(a.report.trace.size() == b.report.trace.size());
    for (std::size_t j = 0; j < a.report.trace.size(); ++j)
        CHECK(a.report.trace[j] == b.report.trace[j]);
    CHECK(a.report.secrecy_rate == b.report.secrecy_rate);
}
