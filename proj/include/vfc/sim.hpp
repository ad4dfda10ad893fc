#pragma once

#include "vfc/channel.hpp"
#include "vfc/compute_model.hpp"
#include "vfc/contract.hpp"
#include "vfc/matching.hpp"
#include "vfc/rsu_allocation.hpp"
#include "vfc/scenario.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace vfc {

/// Per-slot snapshot every policy works from: the slot's tasks, the
/// channel realization, single-task candidate allocations, and the
/// resulting pairwise delays/energies. Servers are indexed RSUs first
/// (0..K-1) then FVs (K..K+M-1).
struct SlotContext {
    int slot = 0;
    std::vector<Task> tasks;              // per TV
    std::vector<int> nearest_rsu_of;      // per TV
    std::vector<double> rate_v2i_bps;     // per TV, to its nearest RSU
    Eigen::MatrixXd rate_v2v_bps;         // N x M, 0 when out of range
    std::vector<double> local_delay_s;    // per TV
    std::vector<ContractMenu> menus;      // per TV (empty when no FVs)
    std::vector<int> fv_bucket;           // per FV, type bucket index

    Eigen::MatrixXd demand_hz;            // N x (K+M), 0 = infeasible pair
    Eigen::MatrixXd delay_s;              // N x (K+M), delay at demand_hz
    Eigen::MatrixXd energy_j;             // N x (K+M), server energy at demand_hz

    int n_rsus = 0;
    int n_fvs = 0;
    int n_servers() const { return n_rsus + n_fvs; }
    bool is_rsu_col(int s) const { return s < n_rsus; }

    /// Contract allocation FV m would dedicate to TV n's task.
    double fv_item_hz(int n, int m) const {
        return menus.empty() ? 0.0 : menus[n].items[fv_bucket[m]].f_hz;
    }
};

/// RSU hop count from TV n's covering RSU to serving RSU k.
inline int relay_hops(const Scenario& sc, const SlotContext& ctx, int n, int k) {
    return sc.rsus[ctx.nearest_rsu_of[n]].hops_to[k];
}

inline DelayBreakdown rsu_delay_at(const Scenario& sc, const SlotContext& ctx, int n, int k,
                                   double f_hz) {
    return rsu_offload_delay(ctx.tasks[n], ctx.rate_v2i_bps[n], relay_hops(sc, ctx, n, k),
                             sc.cfg.fiber_rate_bps, f_hz);
}

/// Draws the slot's channel realization and evaluates, for every TV and
/// every server, the candidate allocation (single-task RSU maximum or the
/// contract item) plus the delay and server energy it implies.
/// `classification` comes from classify_types over the scenario's FVs;
/// pass an empty one when there are no FVs.
template <typename Rng>
SlotContext build_slot_context(const Scenario& sc, const TypeClassification& classification,
                               int slot, Rng& rng) {
    const ScenarioConfig& cfg = sc.cfg;
    const int n_tvs = cfg.n_tvs;
    const int n_fvs = cfg.n_fvs;
    const int n_rsus = cfg.n_rsus;

    SlotContext ctx;
    ctx.slot = slot;
    ctx.tasks = sc.tasks[slot];
    ctx.n_rsus = n_rsus;
    ctx.n_fvs = n_fvs;
    ctx.nearest_rsu_of.resize(n_tvs);
    ctx.rate_v2i_bps.resize(n_tvs);
    ctx.rate_v2v_bps = Eigen::MatrixXd::Zero(n_tvs, n_fvs);
    ctx.local_delay_s.resize(n_tvs);
    ctx.fv_bucket = classification.bucket_of;

    for (int n = 0; n < n_tvs; ++n) {
        const auto& tv = sc.tvs[n];
        const auto& attr = sc.tv_attrs[n];
        const int k = nearest_rsu(sc, tv.position_m);
        ctx.nearest_rsu_of[n] = k;
        const double dh = (tv.position_m - sc.rsus[k].position_m).norm();
        const double g = channel_gain(LinkKind::V2I, v2i_geometry(dh, cfg), cfg, rng);
        ctx.rate_v2i_bps[n] = transmission_rate(attr.bandwidth_hz, attr.tx_power_w, g, cfg.noise_w);
        for (int m = 0; m < n_fvs; ++m) {
            const double d = (tv.position_m - sc.fvs[m].position_m).norm();
            if (d > cfg.tv_range_m) continue;
            const double gv = channel_gain(LinkKind::V2V, v2v_geometry(d), cfg, rng);
            ctx.rate_v2v_bps(n, m) =
                transmission_rate(attr.bandwidth_hz, attr.tx_power_w, gv, cfg.noise_w);
        }
        ctx.local_delay_s[n] = local_delay(ctx.tasks[n], attr.f_hz);
    }

    // Per-TV contract menus; the per-type caps additionally respect the FV
    // per-slot energy budget for this task's cycle count, so every menu
    // item is executable within the budget.
    if (n_fvs > 0) {
        ctx.menus.resize(n_tvs);
        for (int n = 0; n < n_tvs; ++n) {
            auto types = classification.types;
            const double f_energy =
                std::sqrt(cfg.e_max_fv_j / (cfg.kappa_fv * ctx.tasks[n].cycles));
            for (auto& ty : types) ty.f_cap_hz = std::min(ty.f_cap_hz, f_energy);
            ctx.menus[n] = solve_contract(types, ctx.tasks[n].cycles, cfg.unit_resource_price,
                                          cfg.unit_energy_cost, cfg.kappa_fv);
        }
    }

    const int n_servers = n_rsus + n_fvs;
    ctx.demand_hz = Eigen::MatrixXd::Zero(n_tvs, n_servers);
    ctx.delay_s = Eigen::MatrixXd::Constant(n_tvs, n_servers,
                                            std::numeric_limits<double>::infinity());
    ctx.energy_j = Eigen::MatrixXd::Zero(n_tvs, n_servers);
    // Contention-aware RSU demand estimate: each RSU's budgets are assumed
    // split across the TVs in its coverage segment, mirroring the convex
    // re-solve that settles the final accepted set. A TV asks for its fair
    // share unless the deadline needs more.
    std::vector<int> segment_load(n_rsus, 0);
    for (int n = 0; n < n_tvs; ++n)
        if (ctx.rate_v2i_bps[n] > 0.0) ++segment_load[ctx.nearest_rsu_of[n]];

    for (int n = 0; n < n_tvs; ++n) {
        const Task& task = ctx.tasks[n];
        if (ctx.rate_v2i_bps[n] > 0.0) {
            for (int k = 0; k < n_rsus; ++k) {
                const double upload = task.input_bits / ctx.rate_v2i_bps[n];
                const double relay =
                    relay_hops(sc, ctx, n, k) * task.input_bits / cfg.fiber_rate_bps;
                const double slack = task.deadline_s - upload - relay;
                const int load =
                    std::max(1, segment_load[k] + (ctx.nearest_rsu_of[n] == k ? 0 : 1));
                const double f_single = std::min(
                    std::sqrt(cfg.e_max_rsu_j / (cfg.kappa_rsu * task.cycles)), cfg.f_rsu_hz);
                const double f_fair = std::min(std::sqrt(cfg.e_max_rsu_j /
                                                         (load * cfg.kappa_rsu * task.cycles)),
                                               cfg.f_rsu_hz / load);
                if (slack <= 0.0 || task.cycles / slack > f_single) continue;
                const double f = std::min(std::max(task.cycles / slack, f_fair), f_single);
                ctx.demand_hz(n, k) = f;
                ctx.delay_s(n, k) = upload + relay + task.cycles / f;
                ctx.energy_j(n, k) = server_energy(task, f, cfg.kappa_rsu);
            }
        }
        for (int m = 0; m < n_fvs; ++m) {
            if (ctx.rate_v2v_bps(n, m) <= 0.0) continue;
            const double f = ctx.fv_item_hz(n, m);
            if (f <= 0.0) continue;
            const int s = n_rsus + m;
            ctx.demand_hz(n, s) = f;
            ctx.delay_s(n, s) = fv_offload_delay(task, ctx.rate_v2v_bps(n, m), f).total_s();
            ctx.energy_j(n, s) = server_energy(task, f, cfg.kappa_fv);
        }
    }
    return ctx;
}

/// A policy's answer for one slot. fv_via_rsu marks FV decisions whose
/// upload travels TV -> covering RSU -> fiber -> FV (the reverse-offloading
/// route) instead of the direct V2V link.
struct PolicyOutput {
    std::vector<OffloadDecision> decisions;
    std::vector<std::uint8_t> fv_via_rsu;
    MatchResult match;  // populated only by the matching-based policy
    bool has_match = false;
};

struct TvOutcome {
    OffloadDecision decision;
    double delay_s = 0.0;
    double tv_energy_j = 0.0;
    double server_energy_j = 0.0;
    double alloc_hz = 0.0;  // resource executing the task (local CPU or server share)
    bool success = false;
    bool via_rsu = false;
};

struct Violation {
    int slot = 0;
    std::string constraint;  // one_hot | tv_energy | fv_energy | rsu_energy |
                             // fv_capacity | rsu_capacity
    int index = -1;          // offending TV or server id
};

struct SlotOutcome {
    int slot = 0;
    std::vector<TvOutcome> tvs;
    std::vector<double> rsu_energy_j;
    std::vector<double> fv_energy_j;
    std::vector<Violation> violations;
};

/// Evaluates every budget constraint for a finished slot. Any violation is
/// returned (and the caller marks the touched tasks failed); a clean report
/// is the expected steady state because finalize_slot only admits
/// within-budget sets.
inline std::vector<Violation> check_constraints(const Scenario& sc, const SlotContext& ctx,
                                                SlotOutcome& out) {
    const ScenarioConfig& cfg = sc.cfg;
    std::vector<Violation> violations;
    const double tol = 1e-6;

    std::vector<double> rsu_f(ctx.n_rsus, 0.0), rsu_e(ctx.n_rsus, 0.0);
    std::vector<double> fv_f(ctx.n_fvs, 0.0), fv_e(ctx.n_fvs, 0.0);
    for (int n = 0; n < cfg.n_tvs; ++n) {
        const auto& o = out.tvs[n];
        if (o.tv_energy_j > cfg.e_max_tv_j * (1.0 + tol)) {
            violations.push_back({ctx.slot, "tv_energy", n});
            out.tvs[n].success = false;
        }
        if (o.decision.kind == OffloadDecision::Kind::Rsu) {
            rsu_f[o.decision.server] += o.alloc_hz;
            rsu_e[o.decision.server] += o.server_energy_j;
        } else if (o.decision.kind == OffloadDecision::Kind::Fv) {
            fv_f[o.decision.server] += o.alloc_hz;
            fv_e[o.decision.server] += o.server_energy_j;
        }
    }
    auto fail_on = [&](OffloadDecision::Kind kind, int server) {
        for (auto& o : out.tvs)
            if (o.decision.kind == kind && o.decision.server == server) o.success = false;
    };
    for (int k = 0; k < ctx.n_rsus; ++k) {
        if (rsu_f[k] > cfg.f_rsu_hz * (1.0 + tol)) {
            violations.push_back({ctx.slot, "rsu_capacity", k});
            fail_on(OffloadDecision::Kind::Rsu, k);
        }
        if (rsu_e[k] > cfg.e_max_rsu_j * (1.0 + tol)) {
            violations.push_back({ctx.slot, "rsu_energy", k});
            fail_on(OffloadDecision::Kind::Rsu, k);
        }
    }
    for (int m = 0; m < ctx.n_fvs; ++m) {
        if (fv_f[m] > sc.fv_servers[m].f_max_hz * (1.0 + tol)) {
            violations.push_back({ctx.slot, "fv_capacity", m});
            fail_on(OffloadDecision::Kind::Fv, m);
        }
        if (fv_e[m] > cfg.e_max_fv_j * (1.0 + tol)) {
            violations.push_back({ctx.slot, "fv_energy", m});
            fail_on(OffloadDecision::Kind::Fv, m);
        }
    }
    return violations;
}

/// Turns tentative decisions into a feasible slot outcome:
///  - unreachable destinations fall back to Local;
///  - each FV admits its assigned TVs in descending preference (ascending
///    server energy) while both its frequency and energy budgets hold;
///  - each RSU re-solves the convex allocation over its final accepted set
///    with the energy budget split evenly across them;
///  - everything rejected runs locally.
/// Delays, energies, and deadline success are then evaluated on the final
/// allocation, and the constraint checker is run over the result.
inline SlotOutcome finalize_slot(const Scenario& sc, const SlotContext& ctx,
                                 const PolicyOutput& policy_out) {
    const ScenarioConfig& cfg = sc.cfg;
    const int n_tvs = cfg.n_tvs;
    std::vector<OffloadDecision> decisions = policy_out.decisions;
    std::vector<std::uint8_t> via(n_tvs, 0);
    if (!policy_out.fv_via_rsu.empty()) via = policy_out.fv_via_rsu;

    auto fv_rate = [&](int n, int m) {
        return via[n] ? ctx.rate_v2i_bps[n] : ctx.rate_v2v_bps(n, m);
    };

    // Reachability fallback.
    for (int n = 0; n < n_tvs; ++n) {
        auto& d = decisions[n];
        if (d.kind == OffloadDecision::Kind::Rsu && ctx.rate_v2i_bps[n] <= 0.0)
            d = OffloadDecision::local();
        if (d.kind == OffloadDecision::Kind::Fv &&
            (fv_rate(n, d.server) <= 0.0 || ctx.fv_item_hz(n, d.server) <= 0.0))
            d = OffloadDecision::local();
    }

    std::vector<double> alloc(n_tvs, 0.0);

    // FV admission under the frequency and energy budgets.
    for (int m = 0; m < ctx.n_fvs; ++m) {
        std::vector<int> assigned;
        for (int n = 0; n < n_tvs; ++n)
            if (decisions[n] == OffloadDecision::fv(m)) assigned.push_back(n);
        if (assigned.empty()) continue;
        std::sort(assigned.begin(), assigned.end(), [&](int a, int b) {
            const double ea = server_energy(ctx.tasks[a], ctx.fv_item_hz(a, m), cfg.kappa_fv);
            const double eb = server_energy(ctx.tasks[b], ctx.fv_item_hz(b, m), cfg.kappa_fv);
            return ea != eb ? ea < eb : a < b;
        });
        double f_used = 0.0, e_used = 0.0;
        for (int n : assigned) {
            const double f = ctx.fv_item_hz(n, m);
            const double e = server_energy(ctx.tasks[n], f, cfg.kappa_fv);
            if (f_used + f <= sc.fv_servers[m].f_max_hz && e_used + e <= cfg.e_max_fv_j) {
                f_used += f;
                e_used += e;
                alloc[n] = f;
            } else {
                decisions[n] = OffloadDecision::local();
            }
        }
    }

    // RSU allocation over the final accepted sets.
    for (int k = 0; k < ctx.n_rsus; ++k) {
        std::vector<int> assigned;
        for (int n = 0; n < n_tvs; ++n)
            if (decisions[n] == OffloadDecision::rsu(k)) assigned.push_back(n);
        if (assigned.empty()) continue;
        AllocationRequest request;
        request.f_max_hz = cfg.f_rsu_hz;
        request.kappa = cfg.kappa_rsu;
        for (int n : assigned) {
            const Task& task = ctx.tasks[n];
            const double upload = task.input_bits / ctx.rate_v2i_bps[n];
            const double relay =
                relay_hops(sc, ctx, n, k) * task.input_bits / cfg.fiber_rate_bps;
            AllocationTask at;
            at.cycles = task.cycles;
            at.deadline_slack_s = task.deadline_s - upload - relay;
            at.priority = -task.cycles;  // eviction drops the heaviest task first
            request.tasks.push_back(at);
        }
        // Per-task energy caps: cover each task's deadline need first, then
        // split the remaining budget in proportion to cycles. The caps sum
        // to the budget, so the slot's RSU energy can never exceed it. Tasks
        // whose needs do not fit are starved (cap 0) heaviest-first and fall
        // back to Local through the solver's rejection.
        {
            std::vector<double> need(assigned.size(), 0.0);
            std::vector<size_t> order(assigned.size());
            for (size_t i = 0; i < assigned.size(); ++i) {
                order[i] = i;
                const auto& at = request.tasks[i];
                if (at.deadline_slack_s <= 0.0) continue;
                const double f_lo = at.cycles / at.deadline_slack_s;
                if (f_lo <= cfg.f_rsu_hz) need[i] = cfg.kappa_rsu * at.cycles * f_lo * f_lo;
            }
            double need_sum = 0.0;
            for (double v : need) need_sum += v;
            std::sort(order.begin(), order.end(),
                      [&](size_t a, size_t b) { return need[a] > need[b]; });
            std::vector<bool> starved(assigned.size(), false);
            for (size_t i : order) {
                if (need_sum <= cfg.e_max_rsu_j) break;
                need_sum -= need[i];
                need[i] = 0.0;
                starved[i] = true;
            }
            double cycles_sum = 0.0;
            for (size_t i = 0; i < assigned.size(); ++i)
                if (!starved[i]) cycles_sum += request.tasks[i].cycles;
            const double spare = cfg.e_max_rsu_j - need_sum;
            for (size_t i = 0; i < assigned.size(); ++i)
                request.tasks[i].e_cap_j =
                    starved[i] ? 0.0
                               : need[i] + spare * request.tasks[i].cycles / cycles_sum;
        }
        const auto result = solve_sp1(request);
        for (size_t i = 0; i < assigned.size(); ++i) {
            if (result.accepted[i])
                alloc[assigned[i]] = result.f_hz[i];
            else
                decisions[assigned[i]] = OffloadDecision::local();
        }
    }

    SlotOutcome out;
    out.slot = ctx.slot;
    out.tvs.resize(n_tvs);
    out.rsu_energy_j.assign(ctx.n_rsus, 0.0);
    out.fv_energy_j.assign(ctx.n_fvs, 0.0);
    for (int n = 0; n < n_tvs; ++n) {
        const Task& task = ctx.tasks[n];
        const auto& attr = sc.tv_attrs[n];
        TvOutcome& o = out.tvs[n];
        o.decision = decisions[n];
        switch (decisions[n].kind) {
            case OffloadDecision::Kind::Local:
                o.delay_s = ctx.local_delay_s[n];
                o.tv_energy_j = cfg.kappa_tv * task.cycles * attr.f_hz * attr.f_hz;
                o.alloc_hz = attr.f_hz;
                break;
            case OffloadDecision::Kind::Rsu: {
                const int k = decisions[n].server;
                o.delay_s = rsu_delay_at(sc, ctx, n, k, alloc[n]).total_s();
                o.tv_energy_j = attr.tx_power_w * task.input_bits / ctx.rate_v2i_bps[n];
                o.server_energy_j = server_energy(task, alloc[n], cfg.kappa_rsu);
                o.alloc_hz = alloc[n];
                out.rsu_energy_j[k] += o.server_energy_j;
                break;
            }
            case OffloadDecision::Kind::Fv: {
                const int m = decisions[n].server;
                const double rate = fv_rate(n, m);
                o.via_rsu = via[n] != 0;
                o.delay_s = task.input_bits / rate + task.cycles / alloc[n] +
                            (o.via_rsu ? task.input_bits / cfg.fiber_rate_bps : 0.0);
                o.tv_energy_j = attr.tx_power_w * task.input_bits / rate;
                o.server_energy_j = server_energy(task, alloc[n], cfg.kappa_fv);
                o.alloc_hz = alloc[n];
                out.fv_energy_j[m] += o.server_energy_j;
                break;
            }
        }
        o.success = o.delay_s <= task.deadline_s;
    }
    out.violations = check_constraints(sc, ctx, out);
    return out;
}

}  // namespace vfc
