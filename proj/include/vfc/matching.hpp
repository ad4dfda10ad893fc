#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace vfc {

/// Preference lists for the two-sided matching. Servers are indexed
/// 0..S-1 over the concatenated RSU+FV list; value <= 0 or non-finite
/// marks an unreachable pair and is excluded from the lists.
struct PreferenceTable {
    Eigen::MatrixXd tv_value;      // N x S, TV n's preference value for server s
    Eigen::MatrixXd server_value;  // N x S, server s's preference value for TV n
    std::vector<std::vector<int>> tv_prefs;      // per TV, servers by value desc, id asc on ties
    std::vector<std::vector<int>> server_prefs;  // per server, TVs by value desc

    bool reachable(int n, int s) const {
        return std::isfinite(tv_value(n, s)) && tv_value(n, s) > 0.0;
    }
    bool tv_prefers(int n, int a, int b) const {  // server a over server b, TV n's viewpoint
        return tv_value(n, a) > tv_value(n, b) ||
               (tv_value(n, a) == tv_value(n, b) && a < b);
    }
    bool server_prefers(int s, int a, int b) const {  // TV a over TV b
        return server_value(a, s) > server_value(b, s) ||
               (server_value(a, s) == server_value(b, s) && a < b);
    }
};

inline PreferenceTable build_preferences(const Eigen::MatrixXd& tv_value,
                                         const Eigen::MatrixXd& server_value) {
    PreferenceTable table;
    table.tv_value = tv_value;
    table.server_value = server_value;
    const int n_tvs = static_cast<int>(tv_value.rows());
    const int n_servers = static_cast<int>(tv_value.cols());
    table.tv_prefs.resize(n_tvs);
    table.server_prefs.resize(n_servers);
    for (int n = 0; n < n_tvs; ++n) {
        for (int s = 0; s < n_servers; ++s)
            if (table.reachable(n, s)) table.tv_prefs[n].push_back(s);
        std::sort(table.tv_prefs[n].begin(), table.tv_prefs[n].end(),
                  [&, n](int a, int b) { return table.tv_prefers(n, a, b); });
    }
    for (int s = 0; s < n_servers; ++s) {
        for (int n = 0; n < n_tvs; ++n)
            if (table.reachable(n, s)) table.server_prefs[s].push_back(n);
        std::sort(table.server_prefs[s].begin(), table.server_prefs[s].end(),
                  [&, s](int a, int b) { return table.server_prefers(s, a, b); });
    }
    return table;
}

struct MatchResult {
    std::vector<int> tv_to_server;               // -1 = unmatched (falls back to Local)
    std::vector<std::vector<int>> server_to_tvs;
    std::vector<std::pair<int, int>> rejections;  // (tv, server) history
    long proposal_count = 0;
    int stabilization_steps = 0;
};

/// Enumerates all (tv, server) pairs and returns the blocking pairs:
/// the TV prefers s over its current match and s would admit it, either
/// into spare quota or by evicting one lower-ranked kept TV.
inline std::vector<std::pair<int, int>> audit_stability(const MatchResult& matching,
                                                        const PreferenceTable& prefs,
                                                        const std::vector<double>& quotas,
                                                        const Eigen::MatrixXd& demands) {
    std::vector<std::pair<int, int>> blocking;
    const int n_tvs = static_cast<int>(prefs.tv_value.rows());
    const int n_servers = static_cast<int>(prefs.tv_value.cols());
    for (int n = 0; n < n_tvs; ++n) {
        const int current = matching.tv_to_server[n];
        for (int s = 0; s < n_servers; ++s) {
            if (s == current || !prefs.reachable(n, s)) continue;
            if (current != -1 && !prefs.tv_prefers(n, s, current)) continue;
            double used = 0.0;
            for (int other : matching.server_to_tvs[s]) used += demands(other, s);
            const double spare = quotas[s] - used;
            bool admits = spare >= demands(n, s);
            if (!admits) {
                for (int other : matching.server_to_tvs[s]) {
                    if (prefs.server_prefers(s, n, other) &&
                        spare + demands(other, s) >= demands(n, s)) {
                        admits = true;
                        break;
                    }
                }
            }
            if (admits) blocking.emplace_back(n, s);
        }
    }
    return blocking;
}

namespace detail {

/// Greedy selection at one server: keep candidates in descending preference
/// while the cumulative demand fits the quota. Returns the kept set; the
/// rest are the server's rejections for this round.
inline std::vector<int> greedy_keep(int s, std::vector<int> candidates,
                                    const PreferenceTable& prefs, double quota,
                                    const Eigen::MatrixXd& demands, std::vector<int>& rejected) {
    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return prefs.server_prefers(s, a, b); });
    std::vector<int> kept;
    double used = 0.0;
    for (int n : candidates) {
        if (used + demands(n, s) <= quota) {
            kept.push_back(n);
            used += demands(n, s);
        } else {
            rejected.push_back(n);
        }
    }
    return kept;
}

}  // namespace detail

/// Two-sided deferred acceptance with resource-budget quotas.
///
/// Core rounds: every unmatched TV proposes to its best remaining server;
/// each server keeps incumbents plus proposers greedily in descending
/// preference while the cumulative demand fits its quota, rejecting the
/// rest; rejected TVs strike that server. Rounds stop when no TV can
/// propose, which bounds proposals by N * S.
///
/// With heterogeneous demands a displacement can free budget at a server
/// that already rejected a TV, so the core rounds alone can leave a
/// blocking pair. A bounded satisfaction pass then admits each audited
/// blocking TV directly (the audit's admission condition implies greedy
/// admission) and re-runs the rounds until the audit is clean.
inline MatchResult deferred_acceptance(const PreferenceTable& prefs,
                                       const std::vector<double>& quotas,
                                       const Eigen::MatrixXd& demands) {
    const int n_tvs = static_cast<int>(prefs.tv_value.rows());
    const int n_servers = static_cast<int>(prefs.tv_value.cols());
    MatchResult result;
    result.tv_to_server.assign(n_tvs, -1);
    result.server_to_tvs.assign(n_servers, {});

    std::vector<std::vector<char>> struck(n_tvs, std::vector<char>(n_servers, 0));

    auto best_unstruck = [&](int n) {
        for (int s : prefs.tv_prefs[n])
            if (!struck[n][s]) return s;
        return -1;
    };

    auto run_rounds = [&] {
        bool progressed = true;
        while (progressed) {
            progressed = false;
            std::vector<std::vector<int>> proposals(n_servers);
            for (int n = 0; n < n_tvs; ++n) {
                if (result.tv_to_server[n] != -1) continue;
                const int s = best_unstruck(n);
                if (s == -1) continue;  // exhausted; Local fallback
                proposals[s].push_back(n);
                ++result.proposal_count;
                progressed = true;
            }
            for (int s = 0; s < n_servers; ++s) {
                if (proposals[s].empty()) continue;
                std::vector<int> candidates = result.server_to_tvs[s];
                candidates.insert(candidates.end(), proposals[s].begin(), proposals[s].end());
                std::vector<int> rejected;
                result.server_to_tvs[s] =
                    detail::greedy_keep(s, std::move(candidates), prefs, quotas[s], demands,
                                        rejected);
                for (int n : rejected) {
                    struck[n][s] = 1;
                    result.tv_to_server[n] = -1;
                    result.rejections.emplace_back(n, s);
                }
                for (int n : result.server_to_tvs[s]) result.tv_to_server[n] = s;
            }
        }
    };

    run_rounds();

    // Satisfying the first blocking pair every time can cycle (an eviction
    // chain that recreates the pair it started from), so the pair to satisfy
    // is drawn with a deterministic xorshift stream; randomized satisfaction
    // escapes such cycles whenever a stable matching is reachable.
    std::uint64_t chaos = 0x9e3779b97f4a7c15ULL;
    auto next_chaos = [&chaos] {
        chaos ^= chaos << 13;
        chaos ^= chaos >> 7;
        chaos ^= chaos << 17;
        return chaos;
    };
    const int max_sweeps = 64 * std::max(1, n_tvs) * std::max(1, n_servers);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const auto blocking = audit_stability(result, prefs, quotas, demands);
        if (blocking.empty()) break;
        ++result.stabilization_steps;
        const auto [n, s] = blocking[next_chaos() % blocking.size()];
        const int old = result.tv_to_server[n];
        if (old != -1)
            std::erase(result.server_to_tvs[old], n);
        std::vector<int> candidates = result.server_to_tvs[s];
        candidates.push_back(n);
        std::vector<int> rejected;
        result.server_to_tvs[s] =
            detail::greedy_keep(s, std::move(candidates), prefs, quotas[s], demands, rejected);
        for (int evicted : rejected) {
            struck[evicted][s] = 1;
            result.tv_to_server[evicted] = -1;
        }
        for (int kept : result.server_to_tvs[s]) result.tv_to_server[kept] = s;
        run_rounds();
    }
    return result;
}

}  // namespace vfc
