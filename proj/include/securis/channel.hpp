// SPDX-License-Identifier: Apache-2.0
//
// Geometry, path loss, URA steering, Rician small-scale synthesis, and
// composite channel / SNR / rate evaluation for the eight links of the
// RIS-assisted UAV uplink/downlink scenario.

#ifndef SECURIS_CHANNEL_HPP
#define SECURIS_CHANNEL_HPP

#include "securis/common.hpp"
#include "securis/scenario.hpp"

namespace securis {

// Response of the Mx-by-Mz rectangular array for given direction cosines
// along the array's x and z axes: kron(a_z, a_x), every entry unit modulus.
inline CVec ura_steering(double cos_x, double cos_z, int mx, int mz, double spacing) {
    CVec ax(mx), az(mz);
    for (int m = 0; m < mx; ++m) {
        const double ph = -2.0 * pi * spacing * m * cos_x;
        ax(m) = cxd(std::cos(ph), std::sin(ph));
    }
    for (int m = 0; m < mz; ++m) {
        const double ph = -2.0 * pi * spacing * m * cos_z;
        az(m) = cxd(std::cos(ph), std::sin(ph));
    }
    CVec v(mx * mz);
    for (int j = 0; j < mz; ++j)
        for (int i = 0; i < mx; ++i) v(j * mx + i) = az(j) * ax(i);
    return v;
}

inline double dist_uav_ris(const Vec2& q, const Scenario& sc) {
    const double dz = sc.uav_alt - sc.ris_alt;
    return std::sqrt(dz * dz + (q - sc.ris_pos).squaredNorm());
}

inline double dist_ris_ground(const Vec2& ground, const Scenario& sc) {
    return std::sqrt(sc.ris_alt * sc.ris_alt + (sc.ris_pos - ground).squaredNorm());
}

inline double dist_uav_ground(const Vec2& q, const Vec2& ground, const Scenario& sc) {
    return std::sqrt(sc.uav_alt * sc.uav_alt + (q - ground).squaredNorm());
}

// LoS array response of the UAV-RIS link for UAV position q.
inline CVec steering_vector(const Vec2& q, const Scenario& sc) {
    const double d = dist_uav_ris(q, sc);
    const double cos_x = (sc.ris_pos.x() - q.x()) / d;
    const double cos_z = (sc.uav_alt - sc.ris_alt) / d;
    return ura_steering(cos_x, cos_z, sc.ris_nx, sc.ris_nz, sc.elem_spacing);
}

// Amplitude path-loss gains of all distance-dependent links.
struct PathLosses {
    double urg; // UAV-RIS-user, per slot
    double ure; // UAV-RIS-eavesdropper, per slot
    double ug;  // UAV-user direct (also used for the user-UAV uplink)
    double ue;  // UAV-eavesdropper direct
    double ge;  // user-eavesdropper ground link
    double gre; // user-RIS-eavesdropper
};

inline PathLosses path_losses(const Vec2& q, const Scenario& sc) {
    const double rho = sc.ref_gain;
    const double dur = dist_uav_ris(q, sc);
    const double drg = dist_ris_ground(sc.user_pos, sc);
    const double dre = dist_ris_ground(sc.eve_pos, sc);
    PathLosses L;
    L.urg = std::sqrt(rho * std::pow(dur * drg, -sc.alpha));
    L.ure = std::sqrt(rho * std::pow(dur * dre, -sc.alpha));
    L.ug = std::sqrt(rho * std::pow(dist_uav_ground(q, sc.user_pos, sc), -sc.kappa));
    L.ue = std::sqrt(rho * std::pow(dist_uav_ground(q, sc.eve_pos, sc), -sc.kappa));
    L.ge = std::sqrt(rho * std::pow((sc.user_pos - sc.eve_pos).norm(), -sc.varsigma));
    L.gre = std::sqrt(rho * std::pow(drg * dre, -sc.alpha));
    return L;
}

// One Monte-Carlo draw of every small-scale fading component. NLoS parts are
// drawn once and held fixed over all slots; trajectory-dependent LoS parts are
// recomputed per slot. Immutable after creation.
struct ChannelRealization {
    cxd h_ug, h_ue, h_gu; // Rician direct-link coefficients (unit LoS phase)
    cxd h_ge;             // Rayleigh user-eavesdropper coefficient
    CVec h_rg, h_re;      // RIS-side vectors, DL reflection (length M)
    CVec h_gr;            // user-RIS vector, UL reflection (length M)
    CVec nlos_ur;         // NLoS of the UAV-RIS link, DL
    CVec nlos_ru;         // NLoS of the RIS-UAV link, UL (independent draw)
    CVec est_e1;          // estimated [h_re; conj(h_ue)] eavesdropper composite
    CVec est_e2;          // estimated [h_re; conj(h_ge)] eavesdropper composite
};

namespace detail {

inline cxd rician_scalar(double factor, Rng& rng) {
    // unit LoS phase; relative phase is absorbed by the RIS phase variables
    const double wlos = std::sqrt(factor / (1.0 + factor));
    const double wnlos = std::sqrt(1.0 / (1.0 + factor));
    return wlos + wnlos * rng.cgaussian();
}

inline CVec rician_vector(double factor, const CVec& los, Rng& rng) {
    const double wlos = std::sqrt(factor / (1.0 + factor));
    const double wnlos = std::sqrt(1.0 / (1.0 + factor));
    return wlos * los + wnlos * rng.cgaussian_vec(static_cast<int>(los.size()));
}

// RIS array response seen from a ground node (node below the RIS).
inline CVec ris_ground_steering(const Vec2& ground, const Scenario& sc) {
    const double d = dist_ris_ground(ground, sc);
    const double cos_x = (sc.ris_pos.x() - ground.x()) / d;
    const double cos_z = -sc.ris_alt / d;
    return ura_steering(cos_x, cos_z, sc.ris_nx, sc.ris_nz, sc.elem_spacing);
}

} // namespace detail

inline ChannelRealization sample_realization(const Scenario& sc, std::uint64_t seed) {
    Rng rng(seed);
    ChannelRealization r;
    r.h_ug = detail::rician_scalar(sc.rice_ug, rng);
    r.h_ue = detail::rician_scalar(sc.rice_ue, rng);
    r.h_gu = detail::rician_scalar(sc.rice_gu, rng);
    r.h_ge = rng.cgaussian();
    const CVec to_user = detail::ris_ground_steering(sc.user_pos, sc);
    const CVec to_eve = detail::ris_ground_steering(sc.eve_pos, sc);
    r.h_rg = detail::rician_vector(sc.rice_rg, to_user, rng);
    r.h_re = detail::rician_vector(sc.rice_re, to_eve, rng);
    r.h_gr = detail::rician_vector(sc.rice_gr, to_user, rng);
    const int m = sc.num_elements();
    r.nlos_ur = rng.cgaussian_vec(m);
    r.nlos_ru = rng.cgaussian_vec(m);
    r.est_e1.resize(m + 1);
    r.est_e1 << r.h_re, std::conj(r.h_ue);
    r.est_e2.resize(m + 1);
    r.est_e2 << r.h_re, std::conj(r.h_ge);
    return r;
}

// UAV-RIS small-scale vector in a slot: per-slot LoS mixed with the frozen NLoS.
inline CVec h_uav_ris(const ChannelRealization& r, const Vec2& q, const Scenario& sc) {
    const double b = sc.rice_ur;
    return std::sqrt(b / (1.0 + b)) * steering_vector(q, sc) +
           std::sqrt(1.0 / (1.0 + b)) * r.nlos_ur;
}

inline CVec h_ris_uav(const ChannelRealization& r, const Vec2& q, const Scenario& sc) {
    const double b = sc.rice_ru;
    return std::sqrt(b / (1.0 + b)) * steering_vector(q, sc) +
           std::sqrt(1.0 / (1.0 + b)) * r.nlos_ru;
}

// Composite channels of one slot in stacked diagonal form. Each link is the
// pair (stack, diag): the effective scalar is stack^H * diag(diag) * v with v
// the extended phase vector whose last entry is 1. The stack's last entry
// holds the conjugated direct-link coefficient so the Hermitian form
// reproduces the explicit sum expression exactly.
struct SlotChannels {
    CVec g1_stack, g1_diag; // UAV -> user
    CVec e1_diag;           // UAV -> eavesdropper (stack = realization estimate + error)
    CVec g2_stack, g2_diag; // user -> UAV
    CVec e2_diag;           // user -> eavesdropper
};

inline SlotChannels composite_channels(const ChannelRealization& r, const Vec2& q,
                                       const Scenario& sc) {
    const int m = sc.num_elements();
    const PathLosses L = path_losses(q, sc);
    const CVec hur = h_uav_ris(r, q, sc);
    const CVec hru = h_ris_uav(r, q, sc);
    SlotChannels c;
    c.g1_stack.resize(m + 1);
    c.g1_stack << r.h_rg, std::conj(r.h_ug);
    c.g1_diag.resize(m + 1);
    c.g1_diag << L.urg * hur, cxd(L.ug, 0.0);
    c.e1_diag.resize(m + 1);
    c.e1_diag << L.ure * hur, cxd(L.ue, 0.0);
    c.g2_stack.resize(m + 1);
    c.g2_stack << hru, std::conj(r.h_gu);
    c.g2_diag.resize(m + 1);
    c.g2_diag << L.urg * r.h_gr, cxd(L.ug, 0.0);
    c.e2_diag.resize(m + 1);
    c.e2_diag << L.gre * r.h_gr, cxd(L.ge, 0.0);
    return c;
}

// stack^H diag(d) v
inline cxd composite_gain(const CVec& stack, const CVec& diag, const CVec& v) {
    if (stack.size() != diag.size() || stack.size() != v.size())
        throw contract_error("composite_gain: dimension mismatch");
    cxd acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < stack.size(); ++i)
        acc += std::conj(stack(i)) * diag(i) * v(i);
    return acc;
}

// log2(1 + power * |gain|^2 / noise)
inline double link_rate(cxd gain, double power, double noise) {
    return log2p1(power * std::norm(gain) / noise);
}

} // namespace securis

#endif
