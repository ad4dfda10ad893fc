#pragma once

#include "vfc/assignment.hpp"
#include "vfc/sim.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfc {

enum class Policy { Jcratoa, Alo, Nro, Nfo, Nso, Kmmto, Broldra };

inline const std::vector<std::pair<std::string, Policy>>& policy_table() {
    static const std::vector<std::pair<std::string, Policy>> table = {
        {"jcratoa", Policy::Jcratoa}, {"alo", Policy::Alo},   {"nro", Policy::Nro},
        {"nfo", Policy::Nfo},         {"nso", Policy::Nso},   {"kmmto", Policy::Kmmto},
        {"broldra", Policy::Broldra},
    };
    return table;
}

inline std::string policy_name(Policy p) {
    for (const auto& [name, policy] : policy_table())
        if (policy == p) return name;
    return "unknown";
}

inline Policy parse_policy(const std::string& name) {
    for (const auto& [n, policy] : policy_table())
        if (n == name) return policy;
    throw std::invalid_argument("unknown policy: " + name);
}

namespace detail {

/// Nearest in-range FV by distance; -1 when none is usable.
inline int nearest_usable_fv(const Scenario& sc, const SlotContext& ctx, int n) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int m = 0; m < ctx.n_fvs; ++m) {
        if (ctx.demand_hz(n, ctx.n_rsus + m) <= 0.0) continue;
        const double d = (sc.tvs[n].position_m - sc.fvs[m].position_m).norm();
        if (d < best_d) {
            best_d = d;
            best = m;
        }
    }
    return best;
}

inline PolicyOutput decide_jcratoa(const Scenario& sc, const SlotContext& ctx) {
    const int n_tvs = sc.cfg.n_tvs;
    const int n_servers = ctx.n_servers();
    Eigen::MatrixXd tv_value = Eigen::MatrixXd::Zero(n_tvs, n_servers);
    Eigen::MatrixXd server_value = Eigen::MatrixXd::Zero(n_tvs, n_servers);
    for (int n = 0; n < n_tvs; ++n) {
        for (int s = 0; s < n_servers; ++s) {
            if (ctx.demand_hz(n, s) <= 0.0) continue;
            tv_value(n, s) = 1.0 / ctx.delay_s(n, s);
            server_value(n, s) = 1.0 / std::max(ctx.energy_j(n, s), 1e-300);
        }
    }
    const auto prefs = build_preferences(tv_value, server_value);
    std::vector<double> quotas(n_servers);
    for (int s = 0; s < n_servers; ++s)
        quotas[s] = ctx.is_rsu_col(s) ? sc.cfg.f_rsu_hz : sc.fv_servers[s - ctx.n_rsus].f_max_hz;

    PolicyOutput out;
    out.match = deferred_acceptance(prefs, quotas, ctx.demand_hz);
    out.has_match = true;
    out.decisions.assign(n_tvs, OffloadDecision::local());
    for (int n = 0; n < n_tvs; ++n) {
        const int s = out.match.tv_to_server[n];
        if (s == -1) continue;
        // A TV keeps the task when its own CPU beats the matched server.
        if (ctx.local_delay_s[n] < ctx.delay_s(n, s)) continue;
        out.decisions[n] = ctx.is_rsu_col(s) ? OffloadDecision::rsu(s)
                                             : OffloadDecision::fv(s - ctx.n_rsus);
    }
    return out;
}

inline PolicyOutput decide_alo(const Scenario& sc, const SlotContext&) {
    PolicyOutput out;
    out.decisions.assign(sc.cfg.n_tvs, OffloadDecision::local());
    return out;
}

inline PolicyOutput decide_nro(const Scenario& sc, const SlotContext& ctx) {
    PolicyOutput out;
    out.decisions.assign(sc.cfg.n_tvs, OffloadDecision::local());
    for (int n = 0; n < sc.cfg.n_tvs; ++n)
        if (ctx.rate_v2i_bps[n] > 0.0)
            out.decisions[n] = OffloadDecision::rsu(ctx.nearest_rsu_of[n]);
    return out;
}

inline PolicyOutput decide_nfo(const Scenario& sc, const SlotContext& ctx) {
    PolicyOutput out;
    out.decisions.assign(sc.cfg.n_tvs, OffloadDecision::local());
    for (int n = 0; n < sc.cfg.n_tvs; ++n) {
        const int m = nearest_usable_fv(sc, ctx, n);
        if (m != -1) out.decisions[n] = OffloadDecision::fv(m);
    }
    return out;
}

inline PolicyOutput decide_nso(const Scenario& sc, const SlotContext& ctx) {
    PolicyOutput out;
    out.decisions.assign(sc.cfg.n_tvs, OffloadDecision::local());
    for (int n = 0; n < sc.cfg.n_tvs; ++n) {
        const int k = ctx.nearest_rsu_of[n];
        const double rsu_delay = ctx.demand_hz(n, k) > 0.0
                                     ? ctx.delay_s(n, k)
                                     : std::numeric_limits<double>::infinity();
        const int m = nearest_usable_fv(sc, ctx, n);
        const double fv_delay = m != -1 ? ctx.delay_s(n, ctx.n_rsus + m)
                                        : std::numeric_limits<double>::infinity();
        if (std::isfinite(rsu_delay) && rsu_delay <= fv_delay)  // tie goes to the RSU
            out.decisions[n] = OffloadDecision::rsu(k);
        else if (m != -1)
            out.decisions[n] = OffloadDecision::fv(m);
    }
    return out;
}

/// Kuhn-Munkres over unit frequency slots: each server contributes
/// floor(f_max / f_unit) columns, each TV also gets a private Local
/// column, and the assignment minimizes total delay with each slotted
/// task running at min(candidate allocation, f_unit).
inline PolicyOutput decide_kmmto(const Scenario& sc, const SlotContext& ctx) {
    const int n_tvs = sc.cfg.n_tvs;
    PolicyOutput out;
    out.decisions.assign(n_tvs, OffloadDecision::local());
    if (n_tvs == 0) return out;

    double f_unit = sc.cfg.kmmto_f_unit_hz;
    if (f_unit <= 0.0) {
        double sum = 0.0;
        long count = 0;
        for (int n = 0; n < n_tvs; ++n)
            for (int s = 0; s < ctx.n_servers(); ++s)
                if (ctx.demand_hz(n, s) > 0.0) {
                    sum += ctx.demand_hz(n, s);
                    ++count;
                }
        if (count == 0) return out;
        f_unit = sum / static_cast<double>(count);
    }

    std::vector<int> col_server;  // >= 0: server column; -(n+1): Local column of TV n
    for (int s = 0; s < ctx.n_servers(); ++s) {
        const double f_max =
            ctx.is_rsu_col(s) ? sc.cfg.f_rsu_hz : sc.fv_servers[s - ctx.n_rsus].f_max_hz;
        const int slots = std::min(n_tvs, static_cast<int>(f_max / f_unit));
        for (int i = 0; i < slots; ++i) col_server.push_back(s);
    }
    for (int n = 0; n < n_tvs; ++n) col_server.push_back(-(n + 1));

    const double big = 1e12;
    const int n_cols = static_cast<int>(col_server.size());
    Eigen::MatrixXd cost(n_tvs, n_cols);
    for (int n = 0; n < n_tvs; ++n) {
        for (int c = 0; c < n_cols; ++c) {
            const int s = col_server[c];
            if (s < 0) {
                cost(n, c) = s == -(n + 1) ? ctx.local_delay_s[n] : big;
            } else if (ctx.demand_hz(n, s) <= 0.0) {
                cost(n, c) = big;
            } else {
                const double f = std::min(ctx.demand_hz(n, s), f_unit);
                const double compute = ctx.tasks[n].cycles / f;
                const double comms = ctx.delay_s(n, s) - ctx.tasks[n].cycles / ctx.demand_hz(n, s);
                cost(n, c) = comms + compute;
            }
        }
    }
    const auto assignment = min_cost_assignment(cost);
    for (int n = 0; n < n_tvs; ++n) {
        const int c = assignment[n];
        if (c < 0 || cost(n, c) >= big) continue;
        const int s = col_server[c];
        if (s < 0) continue;
        out.decisions[n] = ctx.is_rsu_col(s) ? OffloadDecision::rsu(s)
                                             : OffloadDecision::fv(s - ctx.n_rsus);
    }
    return out;
}

/// Reverse offloading: the covering RSU keeps the task unless greedily
/// forwarding it over fiber to an FV in its road segment is faster.
inline PolicyOutput decide_broldra(const Scenario& sc, const SlotContext& ctx) {
    const int n_tvs = sc.cfg.n_tvs;
    PolicyOutput out;
    out.decisions.assign(n_tvs, OffloadDecision::local());
    out.fv_via_rsu.assign(n_tvs, 0);
    for (int n = 0; n < n_tvs; ++n) {
        if (ctx.rate_v2i_bps[n] <= 0.0) continue;
        const int k = ctx.nearest_rsu_of[n];
        const Task& task = ctx.tasks[n];
        const double upload = task.input_bits / ctx.rate_v2i_bps[n];
        double best_delay = ctx.demand_hz(n, k) > 0.0 ? ctx.delay_s(n, k)
                                                      : std::numeric_limits<double>::infinity();
        OffloadDecision best =
            ctx.demand_hz(n, k) > 0.0 ? OffloadDecision::rsu(k) : OffloadDecision::local();
        bool via = false;
        for (int m = 0; m < ctx.n_fvs; ++m) {
            if (nearest_rsu(sc, sc.fvs[m].position_m) != k) continue;
            const double f = ctx.fv_item_hz(n, m);
            if (f <= 0.0) continue;
            const double d =
                upload + task.input_bits / sc.cfg.fiber_rate_bps + task.cycles / f;
            if (d < best_delay) {
                best_delay = d;
                best = OffloadDecision::fv(m);
                via = true;
            }
        }
        if (best.kind != OffloadDecision::Kind::Local) {
            out.decisions[n] = best;
            out.fv_via_rsu[n] = via && best.kind == OffloadDecision::Kind::Fv ? 1 : 0;
        }
    }
    return out;
}

}  // namespace detail

inline PolicyOutput decide(Policy policy, const Scenario& sc, const SlotContext& ctx) {
    switch (policy) {
        case Policy::Jcratoa: return detail::decide_jcratoa(sc, ctx);
        case Policy::Alo: return detail::decide_alo(sc, ctx);
        case Policy::Nro: return detail::decide_nro(sc, ctx);
        case Policy::Nfo: return detail::decide_nfo(sc, ctx);
        case Policy::Nso: return detail::decide_nso(sc, ctx);
        case Policy::Kmmto: return detail::decide_kmmto(sc, ctx);
        case Policy::Broldra: return detail::decide_broldra(sc, ctx);
    }
    throw std::logic_error("unhandled policy");
}

}  // namespace vfc
