#pragma once

#include "vfc/config.hpp"
#include "vfc/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace vfc {

/// Static per-TV attributes drawn once per scenario.
struct TvAttributes {
    double f_hz = 0.0;        // on-board CPU
    double tx_power_w = 0.0;
    double bandwidth_hz = 0.0;
};

/// A generated scenario: vehicles, servers, and the per-slot task stream.
/// tasks[t][n] is TV n's job in slot t.
struct Scenario {
    ScenarioConfig cfg;
    std::vector<VehicleState> tvs;
    std::vector<VehicleState> fvs;
    std::vector<TvAttributes> tv_attrs;
    std::vector<ServerProfile> rsus;
    std::vector<ServerProfile> fv_servers;  // parallel to fvs
    std::vector<std::vector<Task>> tasks;
};

/// Places vehicles uniformly on the road, RSUs at the centers of equal
/// road segments (coverage radius road/(2*n_rsus), non-overlapping), and
/// samples one task per TV per slot. All draws flow from one generator
/// seeded with cfg.rng_seed, so equal configs give identical scenarios.
inline Scenario generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Scenario sc;
    sc.cfg = cfg;
    std::mt19937_64 rng(cfg.rng_seed);

    std::uniform_real_distribution<double> on_road(0.0, cfg.road_length_m);
    auto uniform = [&rng](double lo, double hi) {
        if (hi <= lo) return lo;
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    for (int i = 0; i < cfg.n_tvs; ++i) {
        VehicleState v;
        v.id = i;
        v.role = VehicleRole::Tv;
        v.position_m = Vec2(on_road(rng), 0.0);
        v.mean_velocity_mps = Vec2(cfg.mean_velocity_mps, 0.0);
        v.velocity_mps = v.mean_velocity_mps;
        sc.tvs.push_back(v);

        TvAttributes a;
        a.f_hz = uniform(cfg.f_tv_hz_min, cfg.f_tv_hz_max);
        a.tx_power_w = uniform(cfg.tx_power_w_min, cfg.tx_power_w_max);
        a.bandwidth_hz = uniform(cfg.bandwidth_hz_min, cfg.bandwidth_hz_max);
        sc.tv_attrs.push_back(a);
    }

    for (int i = 0; i < cfg.n_fvs; ++i) {
        VehicleState v;
        v.id = i;
        v.role = VehicleRole::Fv;
        v.position_m = Vec2(on_road(rng), 0.0);
        v.mean_velocity_mps = Vec2(cfg.mean_velocity_mps, 0.0);
        v.velocity_mps = v.mean_velocity_mps;
        sc.fvs.push_back(v);

        ServerProfile p;
        p.id = i;
        p.kind = ServerKind::Fv;
        p.position_m = v.position_m;
        p.f_max_hz = uniform(cfg.f_fv_hz_min, cfg.f_fv_hz_max);
        p.e_max_j = cfg.e_max_fv_j;
        p.kappa = cfg.kappa_fv;
        p.sigma = uniform(cfg.sigma_min, cfg.sigma_max);
        sc.fv_servers.push_back(p);
    }

    const double segment = cfg.road_length_m / cfg.n_rsus;
    for (int k = 0; k < cfg.n_rsus; ++k) {
        ServerProfile p;
        p.id = k;
        p.kind = ServerKind::Rsu;
        p.position_m = Vec2(segment * (k + 0.5), 0.0);
        p.f_max_hz = cfg.f_rsu_hz;
        p.e_max_j = cfg.e_max_rsu_j;
        p.kappa = cfg.kappa_rsu;
        p.hops_to.resize(cfg.n_rsus);
        for (int j = 0; j < cfg.n_rsus; ++j) p.hops_to[j] = std::abs(k - j);
        sc.rsus.push_back(p);
    }

    sc.tasks.resize(cfg.horizon_slots);
    for (int t = 0; t < cfg.horizon_slots; ++t) {
        sc.tasks[t].resize(cfg.n_tvs);
        for (int n = 0; n < cfg.n_tvs; ++n) {
            Task& task = sc.tasks[t][n];
            task.input_bits = uniform(cfg.input_bits_min, cfg.input_bits_max);
            task.output_bits = uniform(cfg.output_bits_min, cfg.output_bits_max);
            task.cycles = uniform(cfg.cycles_min, cfg.cycles_max);
            task.deadline_s = uniform(cfg.deadline_s_min, cfg.deadline_s_max);
        }
    }
    return sc;
}

/// Index of the RSU whose coverage segment contains the vehicle (the
/// nearest RSU; ties go to the lower id).
inline int nearest_rsu(const Scenario& sc, const Vec2& position) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < sc.rsus.size(); ++k) {
        const double d = (sc.rsus[k].position_m - position).norm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

}  // namespace vfc
