// SPDX-License-Identifier: Apache-2.0

#ifndef SECURIS_SCENARIO_HPP
#define SECURIS_SCENARIO_HPP

#include "securis/common.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace securis {

struct scenario_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full experiment configuration: geometry, radio constants, fading factors,
// power budgets, CSI uncertainty, and algorithm controls.
struct Scenario {
    // geometry (m)
    Vec2 user_pos{0.0, 120.0};   // ground user, horizontal
    Vec2 eve_pos{200.0, 150.0};  // eavesdropper, horizontal
    Vec2 ris_pos{0.0, 0.0};      // RIS, horizontal (array in the x-z plane)
    double uav_alt = 100.0;      // UAV flight altitude
    double ris_alt = 40.0;       // RIS mounting altitude

    // flight
    Vec2 start_pos{-500.0, 20.0};
    Vec2 final_pos{500.0, 20.0};
    double flight_period = 124.0; // s
    double slot_len = 0.4;        // s
    double v_max = 30.0;          // m/s

    // RIS array
    int ris_nx = 6;
    int ris_nz = 5;
    double elem_spacing = 0.5; // antenna separation over wavelength

    // radio
    double ref_gain = 1e-3;     // path loss at 1 m, linear (-30 dB)
    double alpha = 2.2;         // exponent, reflected links
    double kappa = 3.3;         // exponent, UAV direct links
    double varsigma = 3.4;      // exponent, ground-ground link
    double noise_power = 1e-11; // W (-80 dBm)

    // transmit power (W); peak = 4x average by default
    double p_avg = 0.1;
    double p_peak = 0.4;
    double g_avg = 0.1;
    double g_peak = 0.4;

    double dl_weight = 0.5; // DL/UL slot split in [0,1]

    // Rician factors, linear (10 dB for UAV direct links, 3 dB otherwise)
    double rice_ur = 1.9952623149688795;
    double rice_rg = 1.9952623149688795;
    double rice_re = 1.9952623149688795;
    double rice_ug = 10.0;
    double rice_ue = 10.0;
    double rice_gu = 10.0;
    double rice_ru = 1.9952623149688795;
    double rice_gr = 1.9952623149688795;
    double rice_ge = 1.9952623149688795; // G-E link itself is Rayleigh; kept for config compatibility

    // CSI uncertainty: maximum normalized estimation error
    double delta_a = 0.70710678118654752; // delta_a^2 = 0.5

    // alternating-optimization controls
    double eps_conv = 1e-3;
    int j_max = 40;

    int num_elements() const { return ris_nx * ris_nz; }
    int num_slots() const { return static_cast<int>(std::lround(flight_period / slot_len)); }
    double max_step() const { return v_max * slot_len; }

    // Collects every violated invariant; throws with all offending fields named.
    void validate() const {
        std::vector<std::string> bad;
        auto chk = [&bad](bool ok, const char* field, const char* why) {
            if (!ok) bad.push_back(std::string(field) + ": " + why);
        };
        chk(slot_len > 0.0, "slot_len", "must be > 0");
        chk(flight_period > 0.0, "flight_period", "must be > 0");
        if (slot_len > 0.0 && flight_period > 0.0)
            chk(num_slots() >= 1, "flight_period", "must cover at least one slot");
        chk(v_max > 0.0, "v_max", "must be > 0");
        chk(dl_weight >= 0.0 && dl_weight <= 1.0, "dl_weight", "must lie in [0,1]");
        chk(p_avg >= 0.0, "p_avg", "must be >= 0");
        chk(g_avg >= 0.0, "g_avg", "must be >= 0");
        chk(p_peak >= p_avg, "p_peak", "must be >= p_avg");
        chk(g_peak >= g_avg, "g_peak", "must be >= g_avg");
        chk(ref_gain > 0.0, "ref_gain", "must be > 0");
        chk(noise_power > 0.0, "noise_power", "must be > 0");
        chk(uav_alt > ris_alt, "uav_alt", "UAV must fly above the RIS");
        chk(ris_alt > 0.0, "ris_alt", "must be > 0");
        chk(ris_nx >= 1, "ris_nx", "must be >= 1");
        chk(ris_nz >= 1, "ris_nz", "must be >= 1");
        chk(elem_spacing > 0.0, "elem_spacing", "must be > 0");
        chk(alpha > 0.0, "alpha", "must be > 0");
        chk(kappa > 0.0, "kappa", "must be > 0");
        chk(varsigma > 0.0, "varsigma", "must be > 0");
        chk(delta_a >= 0.0, "delta_a", "must be >= 0");
        chk(eps_conv > 0.0, "eps_conv", "must be > 0");
        chk(j_max >= 1, "j_max", "must be >= 1");
        chk((user_pos - eve_pos).norm() > 0.0, "eve_pos", "must not coincide with user_pos");
        for (double f : {rice_ur, rice_rg, rice_re, rice_ug, rice_ue, rice_gu, rice_ru, rice_gr, rice_ge})
            if (!(f >= 0.0)) {
                bad.push_back("rician factors: all must be >= 0");
                break;
            }
        if (!bad.empty()) {
            std::ostringstream os;
            os << "invalid scenario:";
            for (const auto& b : bad) os << "\n  " << b;
            throw scenario_error(os.str());
        }
    }
};

// UAV horizontal waypoints, one per slot.
struct TrajectoryPlan {
    std::vector<Vec2> pos;

    int num_slots() const { return static_cast<int>(pos.size()); }
};

// Largest violation of the mobility constraints (step bound, endpoint ball,
// initial-point pin), in meters.
inline double mobility_violation(const TrajectoryPlan& plan, const Scenario& sc) {
    const double d = sc.max_step();
    double worst = (plan.pos.front() - sc.start_pos).norm();
    for (std::size_t n = 0; n + 1 < plan.pos.size(); ++n)
        worst = std::max(worst, (plan.pos[n + 1] - plan.pos[n]).norm() - d);
    worst = std::max(worst, (plan.pos.back() - sc.final_pos).norm() - d);
    return worst;
}

} // namespace securis

#endif
