#pragma once

#include "vfc/types.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace vfc {

/// Gauss-Markov velocity update:
///   v' = alpha * v + (1 - alpha) * v_mean + sqrt(1 - alpha^2) * w,
/// with w drawn per axis from N(0, sigma^2) (sigma_y for the y axis).
template <typename Rng>
Vec2 step_velocity(const VehicleState& state, double alpha, double sigma_mps, double sigma_y_mps,
                   Rng& rng) {
    if (alpha < 0.0 || alpha > 1.0) throw std::domain_error("alpha must be in [0, 1]");
    std::normal_distribution<double> wx(0.0, sigma_mps);
    std::normal_distribution<double> wy(0.0, sigma_y_mps);
    const double noise_scale = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    Vec2 w(sigma_mps > 0 ? wx(rng) : 0.0, sigma_y_mps > 0 ? wy(rng) : 0.0);
    return alpha * state.velocity_mps + (1.0 - alpha) * state.mean_velocity_mps + noise_scale * w;
}

/// q' = q + v * tau, with x wrapped to [0, road_length).
inline Vec2 step_position(const VehicleState& state, double slot_s, double road_length_m) {
    if (slot_s <= 0.0) throw std::domain_error("slot_s must be positive");
    Vec2 q = state.position_m + state.velocity_mps * slot_s;
    q.x() = std::fmod(q.x(), road_length_m);
    if (q.x() < 0.0) q.x() += road_length_m;
    return q;
}

}  // namespace vfc
