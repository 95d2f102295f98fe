// SPDX-License-Identifier: Apache-2.0
//
// Alternating-optimization driver: per iteration the trajectory program, the
// per-slot beamforming programs, and the closed-form power control run in
// sequence, linearization points refresh after each stage, and the loop stops
// on a secrecy-rate plateau or the iteration cap. Includes the benchmark
// variants with frozen phases, a frozen heuristic trajectory, and a
// perfect-CSI design evaluated against the true uncertainty.

#ifndef SECURIS_AO_HPP
#define SECURIS_AO_HPP

#include "securis/trajectory.hpp"

#include <atomic>
#include <thread>

namespace securis {

struct solver_failure : std::runtime_error {
    std::string stage;
    int iteration = 0;
    int slot = -1;
    solver_failure(std::string stage_, int iteration_, int slot_, const std::string& detail)
        : std::runtime_error("solver failure in " + stage_ + " at iteration " +
                             std::to_string(iteration_) +
                             (slot_ >= 0 ? " slot " + std::to_string(slot_) : "") + ": " +
                             detail),
          stage(std::move(stage_)), iteration(iteration_), slot(slot_) {}
};

// The full decision triple.
struct Design {
    TrajectoryPlan trajectory;
    PhaseSchedule phases;
    PowerSchedule powers;
};

struct SecrecyReport {
    Vec per_slot_dl;                // worst-case secrecy rate per slot, final design
    Vec per_slot_ul;
    std::vector<double> trace;      // per-iteration objective, trace[0] = initial design
    int iterations = 0;
    bool converged = false;
    double secrecy_rate = 0.0;      // final design at the scenario's true uncertainty
};

enum class Algorithm { jo, jo_npb, jo_ht, jo_nr };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::jo: return "JO";
        case Algorithm::jo_npb: return "JO_NPB";
        case Algorithm::jo_ht: return "JO_HT";
        case Algorithm::jo_nr: return "JO_NR";
    }
    return "?";
}

inline std::optional<Algorithm> algorithm_from_name(const std::string& s) {
    if (s == "JO") return Algorithm::jo;
    if (s == "JO_NPB") return Algorithm::jo_npb;
    if (s == "JO_HT") return Algorithm::jo_ht;
    if (s == "JO_NR") return Algorithm::jo_nr;
    return std::nullopt;
}

struct AoOptions {
    conic::SolveOptions sdp{.eps = 1e-6, .max_iters = 100000};
    conic::SolveOptions traj{.eps = 1e-6, .max_iters = 150000};
    int randomization_count = 100;
    int threads = 1;
};

// Average worst-case secrecy rate of a design, clamped per slot.
struct SecrecySlice {
    Vec dl, ul;
    double average = 0.0;
};

inline SecrecySlice evaluate_secrecy(const ChannelRealization& r, const Design& d,
                                     const Scenario& sc, double delta_a) {
    const int n = d.trajectory.num_slots();
    const UncertaintyModel un = uncertainty_model(r, delta_a);
    SecrecySlice out;
    out.dl.resize(n);
    out.ul.resize(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const SlotChannels ch = composite_channels(r, d.trajectory.pos[i], sc);
        const double r_ug =
            link_rate(composite_gain(ch.g1_stack, ch.g1_diag, d.phases.dl[i]), d.powers.dl(i),
                      sc.noise_power);
        const double r_ue = worst_case_rate(r.est_e1, ch.e1_diag, d.phases.dl[i], un.eps1,
                                            d.powers.dl(i), sc.noise_power);
        const double r_gu =
            link_rate(composite_gain(ch.g2_stack, ch.g2_diag, d.phases.ul[i]), d.powers.ul(i),
                      sc.noise_power);
        const double r_ge = worst_case_rate(r.est_e2, ch.e2_diag, d.phases.ul[i], un.eps2,
                                            d.powers.ul(i), sc.noise_power);
        out.dl(i) = std::max(r_ug - r_ue, 0.0);
        out.ul(i) = std::max(r_gu - r_ge, 0.0);
        acc += sc.dl_weight * out.dl(i) + (1.0 - sc.dl_weight) * out.ul(i);
    }
    out.average = acc / n;
    return out;
}

// Preset trajectory: fly straight to the user at full speed, hover, leave just
// in time to reach the final position at full speed.
inline TrajectoryPlan heuristic_trajectory(const Scenario& sc) {
    const int n = sc.num_slots();
    const double d = sc.max_step();
    const Vec2 q0 = sc.start_pos, qf = sc.final_pos, wg = sc.user_pos;
    const double d1 = (wg - q0).norm();
    const double d2 = (qf - wg).norm();
    const int n1 = static_cast<int>(std::ceil(d1 / d - 1e-12));
    const int n2 = static_cast<int>(std::ceil(d2 / d - 1e-12));
    if (n1 + n2 > n - 1)
        throw scenario_error("heuristic_trajectory: user not reachable within the flight period");
    TrajectoryPlan plan;
    plan.pos.assign(n, wg);
    plan.pos[0] = q0;
    const Vec2 dir1 = d1 > 0.0 ? Vec2((wg - q0) / d1) : Vec2(0.0, 0.0);
    for (int i = 1; i <= n1; ++i) plan.pos[i] = q0 + dir1 * std::min(i * d, d1);
    const Vec2 dir2 = d2 > 0.0 ? Vec2((qf - wg) / d2) : Vec2(0.0, 0.0);
    for (int i = 0; i <= n2; ++i)
        plan.pos[n - 1 - i] = qf - dir2 * std::min(i * d, d2);
    return plan;
}

namespace detail {

// chunked deterministic parallel-for
template <typename F>
void parallel_slots(int n, int threads, F&& body) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    const int count = std::min(threads, n);
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace detail

struct AoResult {
    Design design;
    SecrecyReport report;
};

// Algorithm driver. `seed` only feeds the Gaussian-randomization streams; the
// channel realization is sampled by the caller.
inline AoResult run_jo(const Scenario& sc, const ChannelRealization& real, Algorithm alg,
                       std::uint64_t seed, const AoOptions& opt = {}) {
    const int n = sc.num_slots();
    const int m = sc.num_elements();
    const bool opt_traj = alg != Algorithm::jo_ht;
    const bool opt_phase = alg != Algorithm::jo_npb;
    const double design_delta = alg == Algorithm::jo_nr ? 0.0 : sc.delta_a;
    const UncertaintyModel un = uncertainty_model(real, design_delta);
    const Rng stream_root(seed);

    Design d;
    d.trajectory = heuristic_trajectory(sc);
    d.phases = PhaseSchedule::identity(n, m);
    d.powers.dl = Vec::Constant(n, sc.p_avg);
    d.powers.ul = Vec::Constant(n, sc.g_avg);

    SecrecyReport rep;
    rep.trace.push_back(evaluate_secrecy(real, d, sc, design_delta).average);

    // beamforming linearization points: tight leakage SNRs of the current design
    Vec xi1_pts(n), xi2_pts(n);
    auto refresh_xi = [&]() {
        for (int i = 0; i < n; ++i) {
            const SlotChannels ch = composite_channels(real, d.trajectory.pos[i], sc);
            xi1_pts(i) = side_leak_snr(dl_side(real, ch, d.powers.dl(i), sc, un.eps1),
                                       d.phases.dl[i]);
            xi2_pts(i) = side_leak_snr(ul_side(real, ch, d.powers.ul(i), sc, un.eps2),
                                       d.phases.ul[i]);
        }
    };
    refresh_xi();

    // per-slot warm-start states
    std::vector<conic::SolverState> warm_dl(n), warm_ul(n);
    conic::SolverState warm_traj;

    bool converged = false;
    int j = 0;
    while (j < sc.j_max && !converged) {
        ++j;
        // --- trajectory stage ---
        if (opt_traj && n > 1) {
            const FrozenChannelData frozen =
                freeze_channels(real, d.trajectory, d.phases.dl, d.phases.ul, sc, un.eps1);
            const TrajectorySlacks pts = induce_slacks(frozen, d.trajectory, d.powers.dl, sc);
            const TrajectoryProgram tp =
                build_trajectory_program(frozen, d.trajectory, pts, d.powers.dl, d.powers.ul, sc);
            TrajectoryResult tr;
            try {
                tr = solve_trajectory(tp, sc, opt.traj, &warm_traj);
            } catch (const contract_error& e) {
                throw solver_failure("trajectory", j, -1, e.what());
            }
            if (tr.status != conic::SolveStatus::optimal &&
                tr.status != conic::SolveStatus::near_optimal)
                throw solver_failure("trajectory", j, -1, "status " +
                                     std::string(conic::status_name(tr.status)));
            // SCA ascent guard: keep the previous plan if the surrogate regressed
            const double before = trajectory_surrogate(frozen, d.trajectory, d.powers.dl,
                                                       d.powers.ul, pts.zeta, sc);
            const double after = trajectory_surrogate(frozen, tr.plan, d.powers.dl, d.powers.ul,
                                                      pts.zeta, sc);
            if (after >= before - 1e-9) d.trajectory = tr.plan;
        }

        // --- beamforming stage ---
        if (opt_phase) {
            std::vector<std::string> slot_errors(n);
            detail::parallel_slots(n, opt.threads, [&](int i) {
                const SlotChannels ch = composite_channels(real, d.trajectory.pos[i], sc);
                struct SideRef {
                    BeamSide side;
                    CVec* v;
                    double* xi_pt;
                    conic::SolverState* warm;
                    std::uint64_t tag;
                };
                SideRef sides[2] = {
                    {dl_side(real, ch, d.powers.dl(i), sc, un.eps1), &d.phases.dl[i],
                     &xi1_pts(i), &warm_dl[i], 0},
                    {ul_side(real, ch, d.powers.ul(i), sc, un.eps2), &d.phases.ul[i],
                     &xi2_pts(i), &warm_ul[i], 1},
                };
                for (auto& sr : sides) {
                    if (sr.side.gamma0 <= 0.0) {
                        *sr.xi_pt = 0.0;
                        continue; // nothing transmitted; keep the previous phases
                    }
                    const SideSdpResult res =
                        solve_side_sdp(sr.side, *sr.xi_pt, opt.sdp, sr.warm);
                    if (res.status != conic::SolveStatus::optimal &&
                        res.status != conic::SolveStatus::near_optimal) {
                        slot_errors[i] = std::string("status ") + conic::status_name(res.status);
                        return;
                    }
                    Rng rng = stream_root.fork((static_cast<std::uint64_t>(j) << 24) ^
                                               (static_cast<std::uint64_t>(i) << 1) ^ sr.tag);
                    auto score = [&](const CVec& v) { return side_score(sr.side, *sr.xi_pt, v); };
                    const CVec v_new = gaussian_randomization(res.v_gram, opt.randomization_count,
                                                              score, rng, {*sr.v});
                    *sr.v = v_new;
                    *sr.xi_pt = side_leak_snr(sr.side, v_new);
                }
            });
            for (int i = 0; i < n; ++i)
                if (!slot_errors[i].empty()) throw solver_failure("beamforming", j, i, slot_errors[i]);
        }

        // --- power stage ---
        const SlotGains gains =
            effective_gains(real, d.trajectory, d.phases.dl, d.phases.ul, sc, design_delta);
        d.powers = solve_power(gains, sc);

        const double r_now = evaluate_secrecy(real, d, sc, design_delta).average;
        rep.trace.push_back(r_now);
        converged = std::abs(r_now - rep.trace[rep.trace.size() - 2]) <= sc.eps_conv;
    }

    rep.iterations = j;
    rep.converged = converged;
    const SecrecySlice final_eval = evaluate_secrecy(real, d, sc, sc.delta_a);
    rep.per_slot_dl = final_eval.dl;
    rep.per_slot_ul = final_eval.ul;
    rep.secrecy_rate = final_eval.average;
    return {std::move(d), std::move(rep)};
}

inline AoResult run_benchmark(Algorithm alg, const Scenario& sc, const ChannelRealization& real,
                              std::uint64_t seed, const AoOptions& opt = {}) {
    return run_jo(sc, real, alg, seed, opt);
}

} // namespace securis

#endif
