#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace vfc {

using Vec2 = Eigen::Vector2d;

/// One slot's computation job. All fields are SI (bits, cycles, seconds).
struct Task {
    double input_bits = 0.0;
    double output_bits = 0.0;
    double cycles = 0.0;
    double deadline_s = 0.0;
};

enum class VehicleRole : std::uint8_t { Tv, Fv };

/// Position/velocity of a vehicle under Gauss-Markov dynamics.
struct VehicleState {
    int id = -1;
    Vec2 position_m = Vec2::Zero();
    Vec2 velocity_mps = Vec2::Zero();
    Vec2 mean_velocity_mps = Vec2::Zero();
    VehicleRole role = VehicleRole::Tv;
};

enum class ServerKind : std::uint8_t { Rsu, Fv };

/// An RSU or FV acting as a compute server.
struct ServerProfile {
    int id = -1;
    ServerKind kind = ServerKind::Rsu;
    Vec2 position_m = Vec2::Zero();  // RSU fixed; FV tracks its VehicleState
    double f_max_hz = 0.0;
    double e_max_j = 0.0;
    double kappa = 0.0;
    std::vector<int> hops_to;  // RSU only: hop count to every other RSU
    double sigma = 0.0;        // FV only: willingness to contribute resources
};

/// Exactly one destination per TV per slot.
struct OffloadDecision {
    enum class Kind : std::uint8_t { Local, Rsu, Fv };
    Kind kind = Kind::Local;
    int server = -1;  // index into the RSU or FV list, -1 for Local

    static OffloadDecision local() { return {Kind::Local, -1}; }
    static OffloadDecision rsu(int k) { return {Kind::Rsu, k}; }
    static OffloadDecision fv(int m) { return {Kind::Fv, m}; }

    bool is_local() const { return kind == Kind::Local; }
    bool operator==(const OffloadDecision&) const = default;
};

}  // namespace vfc
