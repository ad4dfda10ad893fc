#pragma once

#include "vfc/config.hpp"
#include "vfc/units.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vfc {

enum class LinkKind : std::uint8_t { V2I, V2V };
enum class Visibility : std::uint8_t { LoS, NLoS };

struct LinkClass {
    LinkKind kind;
    Visibility visibility;
};

/// 3GPP LoS probability for a V2I link: 1 for d <= 18 m, otherwise
/// 18/d + exp(-d/36) * (1 - 18/d).
inline double los_probability_v2i(double horizontal_distance_m) {
    const double d = horizontal_distance_m;
    if (d <= 18.0) return 1.0;
    return 18.0 / d + std::exp(-d / 36.0) * (1.0 - 18.0 / d);
}

/// V2V LoS probability: min{1, 1.05 * exp(-0.014 d)}.
inline double los_probability_v2v(double distance_m) {
    return std::min(1.0, 1.05 * std::exp(-0.014 * distance_m));
}

/// Breakpoint distance d' = 4 * H_k * H_n * f_c / c.
inline double breakpoint_distance_m(double h_rsu_m, double h_vehicle_m, double carrier_hz) {
    return 4.0 * h_rsu_m * h_vehicle_m * carrier_hz / kLightSpeedMps;
}

/// Geometry of one link. V2I uses the 3-D distance through the antenna
/// heights; V2V uses the planar distance.
struct LinkGeometry {
    double horizontal_distance_m = 0.0;
    double distance_3d_m = 0.0;
};

inline LinkGeometry v2i_geometry(double horizontal_distance_m, const ScenarioConfig& cfg) {
    const double dh = horizontal_distance_m;
    const double dz = cfg.h_rsu_m - cfg.h_vehicle_m;
    return {dh, std::sqrt(dh * dh + dz * dz)};
}

inline LinkGeometry v2v_geometry(double distance_m) { return {distance_m, distance_m}; }

/// Path loss in dB. The carrier frequency enters the log10 terms in GHz,
/// following the TR 38.901 coefficient convention. The shadow term is the
/// caller-supplied draw for the slot and is applied to the V2I LoS branch.
/// Distances below each formula's validity range are clamped.
inline double large_scale_db(LinkClass link, double distance_3d_m, double horizontal_distance_m,
                             const ScenarioConfig& cfg, double shadow_draw_db = 0.0) {
    const double f_ghz = cfg.carrier_hz / 1e9;
    if (link.kind == LinkKind::V2I) {
        const double dh = std::max(10.0, std::min(horizontal_distance_m, 5000.0));
        const double dz = cfg.h_rsu_m - cfg.h_vehicle_m;
        const double d3 = std::sqrt(dh * dh + dz * dz);
        const double dbp = breakpoint_distance_m(cfg.h_rsu_m, cfg.h_vehicle_m, cfg.carrier_hz);
        double los;
        if (dh <= dbp) {
            los = 32.4 + 21.0 * std::log10(d3) + 20.0 * std::log10(f_ghz) + shadow_draw_db;
        } else {
            los = 32.4 + 40.0 * std::log10(d3) + 20.0 * std::log10(f_ghz) -
                  9.5 * std::log10(dbp * dbp + dz * dz) + shadow_draw_db;
        }
        if (link.visibility == Visibility::LoS) return los;
        const double nlos = 35.3 * std::log10(d3) + 22.4 + 21.3 * std::log10(f_ghz) -
                            0.3 * (cfg.h_vehicle_m - 1.5);
        return std::max(los, nlos);
    }
    const double d = std::max(1.0, distance_3d_m);
    if (link.visibility == Visibility::LoS)
        return 38.77 + 16.7 * std::log10(d) + 18.2 * std::log10(f_ghz);
    return 36.85 + 30.0 * std::log10(d) + 18.9 * std::log10(f_ghz);
}

/// Nakagami-m fading amplitude. amplitude^2 ~ Gamma(shape=m, scale=mean_power/m),
/// so E[amplitude^2] = mean_power.
template <typename Rng>
double sample_nakagami(double m_param, double mean_power, Rng& rng) {
    std::gamma_distribution<double> power(m_param, mean_power / m_param);
    return std::sqrt(power(rng));
}

inline double nakagami_m_for(const ScenarioConfig& cfg, LinkClass link) {
    if (link.kind == LinkKind::V2I)
        return link.visibility == Visibility::LoS ? cfg.m_v2i_los : cfg.m_v2i_nlos;
    return link.visibility == Visibility::LoS ? cfg.m_v2v_los : cfg.m_v2v_nlos;
}

/// Linear power gain of one link for one slot, mixing the LoS and NLoS
/// branches by the LoS probability. Each branch composes an independent
/// Nakagami small-scale draw with the attenuating large-scale term
/// |h_sm|^2 * 10^(-La/10).
template <typename Rng>
double channel_gain(LinkKind kind, const LinkGeometry& geom, const ScenarioConfig& cfg, Rng& rng) {
    const double p_los = kind == LinkKind::V2I ? los_probability_v2i(geom.horizontal_distance_m)
                                               : los_probability_v2v(geom.distance_3d_m);
    std::normal_distribution<double> shadow(0.0, cfg.shadow_db);
    const double shadow_db = kind == LinkKind::V2I ? shadow(rng) : 0.0;

    auto branch = [&](Visibility vis) {
        const LinkClass link{kind, vis};
        const double la =
            large_scale_db(link, geom.distance_3d_m, geom.horizontal_distance_m, cfg, shadow_db);
        const double amp = sample_nakagami(nakagami_m_for(cfg, link), 1.0, rng);
        return amp * amp * db_to_linear(-la);
    };
    return p_los * branch(Visibility::LoS) + (1.0 - p_los) * branch(Visibility::NLoS);
}

/// Shannon rate B * log2(1 + p * h / N0) in bits/s.
inline double transmission_rate(double bandwidth_hz, double tx_power_w, double gain,
                                double noise_w) {
    return bandwidth_hz * std::log2(1.0 + tx_power_w * gain / noise_w);
}

}  // namespace vfc
