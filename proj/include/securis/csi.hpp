// SPDX-License-Identifier: Apache-2.0
//
// Bounded deterministic CSI-uncertainty model for the eavesdropping links and
// the closed-form worst-case error that maximizes the eavesdropper's SNR.

#ifndef SECURIS_CSI_HPP
#define SECURIS_CSI_HPP

#include "securis/channel.hpp"

namespace securis {

// Norm-ball radii around the estimated eavesdropper composites, derived from
// the maximum normalized estimation error.
struct UncertaintyModel {
    double delta_a = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
};

inline UncertaintyModel uncertainty_model(const ChannelRealization& r, double delta_a) {
    UncertaintyModel u;
    u.delta_a = delta_a;
    u.eps1 = delta_a * r.est_e1.norm();
    u.eps2 = delta_a * r.est_e2.norm();
    return u;
}

struct WorstCaseError {
    CVec delta;          // error vector on the ball boundary (zero if the channel vanishes)
    double attained_gain; // |(h_est + delta)^H diag(d) v|^2 at the worst error
};

// Worst estimation error inside the radius-eps ball: each error entry aligns
// coherently with c = diag(chan_diag) * v, magnitudes proportional to |c|.
// The attained composite gain is (|h_est^H c| + eps*||c||)^2.
inline WorstCaseError worst_case_error(const CVec& h_est, const CVec& chan_diag,
                                       const CVec& v, double eps) {
    if (h_est.size() != chan_diag.size() || h_est.size() != v.size())
        throw contract_error("worst_case_error: dimension mismatch");
    if (eps < 0.0) throw contract_error("worst_case_error: eps must be >= 0");
    const Eigen::Index k = h_est.size();
    CVec c(k);
    for (Eigen::Index i = 0; i < k; ++i) c(i) = chan_diag(i) * v(i);
    const double cnorm = c.norm();
    WorstCaseError out;
    out.delta = CVec::Zero(k);
    cxd nominal(0.0, 0.0);
    for (Eigen::Index i = 0; i < k; ++i) nominal += std::conj(h_est(i)) * c(i);
    if (cnorm == 0.0 || eps == 0.0) {
        // degenerate channel or zero radius: any error attains the nominal gain
        out.attained_gain = std::norm(nominal);
        return out;
    }
    const double base = std::arg(nominal);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double tau = std::arg(c(i)) - base;
        const double mag = eps * std::abs(c(i)) / cnorm;
        out.delta(i) = mag * cxd(std::cos(tau), std::sin(tau));
    }
    const double amp = std::abs(nominal) + eps * cnorm;
    out.attained_gain = amp * amp;
    return out;
}

inline double worst_case_rate(const CVec& h_est, const CVec& chan_diag, const CVec& v,
                              double eps, double power, double noise) {
    const WorstCaseError wc = worst_case_error(h_est, chan_diag, v, eps);
    return log2p1(power * wc.attained_gain / noise);
}

// Per-slot worst-case eavesdropper rates for a complete design.
struct WorstCaseRates {
    Vec dl; // rate leaked to the eavesdropper during DL, worst error
    Vec ul; // rate leaked to the eavesdropper during UL, worst error
};

inline WorstCaseRates worst_case_rates(const ChannelRealization& r, const TrajectoryPlan& plan,
                                       const std::vector<CVec>& v_dl, const std::vector<CVec>& v_ul,
                                       const Vec& p_dl, const Vec& p_ul, const Scenario& sc,
                                       double delta_a) {
    const int n = plan.num_slots();
    const UncertaintyModel u = uncertainty_model(r, delta_a);
    WorstCaseRates out;
    out.dl.resize(n);
    out.ul.resize(n);
    for (int i = 0; i < n; ++i) {
        const SlotChannels ch = composite_channels(r, plan.pos[i], sc);
        out.dl(i) = worst_case_rate(r.est_e1, ch.e1_diag, v_dl[i], u.eps1, p_dl(i), sc.noise_power);
        out.ul(i) = worst_case_rate(r.est_e2, ch.e2_diag, v_ul[i], u.eps2, p_ul(i), sc.noise_power);
    }
    return out;
}

} // namespace securis

#endif
