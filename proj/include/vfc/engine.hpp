#pragma once

#include "vfc/metrics.hpp"
#include "vfc/mobility.hpp"
#include "vfc/policies.hpp"
#include "vfc/sim.hpp"

#include <random>
#include <vector>

namespace vfc {

struct RunOptions {
    bool audit = false;          // run the stability audit on every matching slot
    bool keep_slots = false;     // retain per-slot outcomes in the trace
};

struct RunTrace {
    RunMetrics metrics;
    long blocking_pairs = 0;     // audited blocking pairs over the whole run
    long violation_count = 0;    // budget-constraint violations over the whole run
    std::vector<SlotOutcome> slots;  // only when keep_slots
};

/// Algorithm core: per slot, draw the channel, invoke the policy, settle
/// allocations, evaluate delays/energies/constraints, then advance the
/// mobility model. The channel/mobility stream is seeded from the config,
/// so a (config, policy) pair is fully deterministic, and all policies see
/// identical scenarios and channel draws for a given config.
inline RunTrace run_trace(const ScenarioConfig& cfg, Policy policy, const RunOptions& opts = {}) {
    cfg.validate();
    Scenario sc = generate_scenario(cfg);
    TypeClassification classification;
    if (cfg.n_fvs > 0)
        classification = classify_types(sc.fv_servers, cfg.contract_levels, cfg.type_probs);

    // Decorrelated from the scenario-generation stream, which also starts
    // from cfg.rng_seed.
    std::mt19937_64 rng(cfg.rng_seed * 6364136223846793005ULL + 1442695040888963407ULL);

    RunTrace trace;
    RunMetrics& m = trace.metrics;
    std::vector<double> x_alloc(cfg.n_tvs, 0.0);  // per-TV cumulative resource
    double delay_sum = 0.0, energy_sum = 0.0, succ_bits = 0.0;
    long tasks_total = 0, tasks_succ = 0;

    for (int t = 0; t < cfg.horizon_slots; ++t) {
        SlotContext ctx = build_slot_context(sc, classification, t, rng);
        PolicyOutput decision = decide(policy, sc, ctx);
        SlotOutcome out = finalize_slot(sc, ctx, decision);

        if (opts.audit && decision.has_match) {
            // Re-derive the audit inputs exactly as the policy built them.
            const int n_servers = ctx.n_servers();
            Eigen::MatrixXd tv_value = Eigen::MatrixXd::Zero(cfg.n_tvs, n_servers);
            Eigen::MatrixXd server_value = Eigen::MatrixXd::Zero(cfg.n_tvs, n_servers);
            for (int n = 0; n < cfg.n_tvs; ++n)
                for (int s = 0; s < n_servers; ++s)
                    if (ctx.demand_hz(n, s) > 0.0) {
                        tv_value(n, s) = 1.0 / ctx.delay_s(n, s);
                        server_value(n, s) = 1.0 / std::max(ctx.energy_j(n, s), 1e-300);
                    }
            const auto prefs = build_preferences(tv_value, server_value);
            std::vector<double> quotas(n_servers);
            for (int s = 0; s < n_servers; ++s)
                quotas[s] = ctx.is_rsu_col(s) ? cfg.f_rsu_hz
                                              : sc.fv_servers[s - ctx.n_rsus].f_max_hz;
            trace.blocking_pairs += static_cast<long>(
                audit_stability(decision.match, prefs, quotas, ctx.demand_hz).size());
        }
        trace.violation_count += static_cast<long>(out.violations.size());

        double slot_delay = 0.0, slot_energy = 0.0, slot_bits = 0.0;
        long slot_succ = 0;
        std::vector<double> slot_alloc(cfg.n_tvs, 0.0);
        for (int n = 0; n < cfg.n_tvs; ++n) {
            const TvOutcome& o = out.tvs[n];
            slot_delay += o.delay_s;
            slot_energy += o.tv_energy_j + o.server_energy_j;
            if (o.success) {
                ++slot_succ;
                slot_bits += ctx.tasks[n].input_bits;
            }
            slot_alloc[n] = o.alloc_hz;
            x_alloc[n] += o.alloc_hz;
        }
        const double inv_n = cfg.n_tvs > 0 ? 1.0 / cfg.n_tvs : 0.0;
        m.slot_avg_delay_s.push_back(slot_delay * inv_n);
        m.slot_completion_ratio.push_back(slot_succ * inv_n);
        m.slot_throughput_bps.push_back(slot_bits / cfg.slot_s);
        m.slot_jain_fairness.push_back(jain_fairness(slot_alloc));
        m.slot_avg_energy_j.push_back(slot_energy * inv_n);
        delay_sum += slot_delay;
        energy_sum += slot_energy;
        succ_bits += slot_bits;
        tasks_total += cfg.n_tvs;
        tasks_succ += slot_succ;

        if (opts.keep_slots) trace.slots.push_back(std::move(out));

        // Advance the Gauss-Markov state; FV server positions track their
        // vehicles.
        for (auto& tv : sc.tvs) {
            tv.velocity_mps = step_velocity(tv, cfg.alpha, cfg.sigma_mps, cfg.sigma_y_mps, rng);
            tv.position_m = step_position(tv, cfg.slot_s, cfg.road_length_m);
        }
        for (int i = 0; i < cfg.n_fvs; ++i) {
            auto& fv = sc.fvs[i];
            fv.velocity_mps = step_velocity(fv, cfg.alpha, cfg.sigma_mps, cfg.sigma_y_mps, rng);
            fv.position_m = step_position(fv, cfg.slot_s, cfg.road_length_m);
            sc.fv_servers[i].position_m = fv.position_m;
        }
    }

    if (tasks_total > 0) {
        m.avg_delay_s = delay_sum / static_cast<double>(tasks_total);
        m.completion_ratio = static_cast<double>(tasks_succ) / static_cast<double>(tasks_total);
        m.avg_energy_j = energy_sum / static_cast<double>(tasks_total);
        m.throughput_bps = succ_bits / (cfg.horizon_slots * cfg.slot_s);
    }
    m.jain_fairness = jain_fairness(x_alloc);
    return trace;
}

inline RunMetrics run(const ScenarioConfig& cfg, Policy policy) {
    return run_trace(cfg, policy).metrics;
}

}  // namespace vfc
