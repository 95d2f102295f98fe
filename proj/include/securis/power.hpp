// SPDX-License-Identifier: Apache-2.0
//
// Closed-form per-slot transmit-power control under average and peak limits,
// with a dual bisection enforcing the average-power constraint.

#ifndef SECURIS_POWER_HPP
#define SECURIS_POWER_HPP

#include "securis/csi.hpp"

#include <algorithm>
#include <numbers>
#include <utility>

namespace securis {

struct PowerSchedule {
    Vec dl;             // p[n], W
    Vec ul;             // g[n], W
    double mu_dl = 0.0; // dual multiplier of the DL average constraint
    double mu_ul = 0.0; // dual multiplier of the UL average constraint
};

// Normalized power gains per slot: a = |legitimate composite|^2 / sigma^2,
// b = worst-case eavesdropper gain / sigma^2.
struct SlotGains {
    Vec a1, b1; // DL
    Vec a2, b2; // UL
};

inline SlotGains effective_gains(const ChannelRealization& r, const TrajectoryPlan& plan,
                                 const std::vector<CVec>& v_dl, const std::vector<CVec>& v_ul,
                                 const Scenario& sc, double delta_a) {
    const int n = plan.num_slots();
    const UncertaintyModel u = uncertainty_model(r, delta_a);
    SlotGains g;
    g.a1.resize(n);
    g.b1.resize(n);
    g.a2.resize(n);
    g.b2.resize(n);
    const double s2 = sc.noise_power;
    for (int i = 0; i < n; ++i) {
        const SlotChannels ch = composite_channels(r, plan.pos[i], sc);
        g.a1(i) = std::norm(composite_gain(ch.g1_stack, ch.g1_diag, v_dl[i])) / s2;
        g.b1(i) = worst_case_error(r.est_e1, ch.e1_diag, v_dl[i], u.eps1).attained_gain / s2;
        g.a2(i) = std::norm(composite_gain(ch.g2_stack, ch.g2_diag, v_ul[i])) / s2;
        g.b2(i) = worst_case_error(r.est_e2, ch.e2_diag, v_ul[i], u.eps2).attained_gain / s2;
    }
    return g;
}

// Maximizer of log2(1+p*a) - log2(1+p*b) - varpi*p over [0, peak].
// Evaluated in a cancellation-free form; a zero eavesdropper gain is floored
// so the expression stays finite and reproduces the water-filling limit.
inline double closed_form_power(double a, double b, double varpi, double peak) {
    if (!(varpi > 0.0)) throw contract_error("closed_form_power: varpi must be > 0");
    if (a < 0.0 || b < 0.0) throw contract_error("closed_form_power: gains must be >= 0");
    if (a <= b) return 0.0;
    b = std::max(b, 1e-30);
    const double y = 0.5 / b - 0.5 / a;
    const double e = (1.0 / b - 1.0 / a) / (varpi * std::numbers::ln2_v<double>);
    // sqrt(y^2 + e) - y - 1/a, rationalized
    const double p = e / (std::sqrt(y * y + e) + y) - 1.0 / a;
    return std::clamp(p, 0.0, peak);
}

namespace detail {

// One link direction: per-slot powers for a given dual multiplier, varpi -> 0+
// meaning peak power on every profitable slot.
inline Vec powers_at(const Vec& a, const Vec& b, double varpi, double peak) {
    Vec p(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) <= b(i))
            p(i) = 0.0;
        else if (varpi <= 0.0)
            p(i) = peak;
        else
            p(i) = closed_form_power(a(i), b(i), varpi, peak);
    }
    return p;
}

inline std::pair<Vec, double> solve_one_direction(const Vec& a, const Vec& b, double avg_cap,
                                                  double peak) {
    Vec p = powers_at(a, b, 0.0, peak);
    if (p.mean() <= avg_cap) return {p, 0.0};
    // bracket: grow the multiplier until the average constraint is met
    double hi = 1.0;
    for (int k = 0; k < 200 && powers_at(a, b, hi, peak).mean() > avg_cap; ++k) hi *= 2.0;
    double lo = 0.0;
    Vec p_hi = powers_at(a, b, hi, peak);
    // bisect keeping avg(lo) > cap >= avg(hi); the returned schedule is the
    // feasible endpoint, active to within 1e-8 of the cap
    for (int k = 0; k < 300; ++k) {
        if (avg_cap - p_hi.mean() <= 1e-8 * avg_cap) break;
        if (hi - lo < 1e-12) break;
        const double mid = 0.5 * (lo + hi);
        Vec pm = powers_at(a, b, mid, peak);
        if (pm.mean() > avg_cap) {
            lo = mid;
        } else {
            hi = mid;
            p_hi = std::move(pm);
        }
    }
    return {p_hi, hi};
}

} // namespace detail

// DL and UL schedules are decoupled and solved independently.
inline PowerSchedule solve_power(const SlotGains& g, const Scenario& sc) {
    PowerSchedule ps;
    auto [pd, mu1] = detail::solve_one_direction(g.a1, g.b1, sc.p_avg, sc.p_peak);
    auto [pu, mu2] = detail::solve_one_direction(g.a2, g.b2, sc.g_avg, sc.g_peak);
    ps.dl = std::move(pd);
    ps.ul = std::move(pu);
    ps.mu_dl = mu1;
    ps.mu_ul = mu2;
    return ps;
}

} // namespace securis

#endif
