#pragma once

#include "vfc/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace vfc {

/// One FV type bucket: willingness-weighted capacity theta = sigma * f_max.
struct FvType {
    double theta = 0.0;
    double f_cap_hz = 0.0;  // max resource any member of the bucket can contribute
    double count = 0.0;     // number of FVs of this type
};

struct ContractItem {
    double f_hz = 0.0;
    double w = 0.0;
};

/// The L-entry (resource, reward) menu produced for one task's cycle count.
struct ContractMenu {
    std::vector<ContractItem> items;
    double price_c = 0.0;
    double energy_cost_e = 0.0;
};

struct TypeClassification {
    std::vector<FvType> types;   // ascending theta, strictly increasing
    std::vector<int> bucket_of;  // per FV, index into types
};

/// Type-theta utility of accepting an item: theta * w - e * kappa * C * f^2.
inline double fv_utility(double theta, const ContractItem& item, double cycles, double e,
                         double kappa_fv) {
    return theta * item.w - e * kappa_fv * cycles * item.f_hz * item.f_hz;
}

inline double mbs_utility(const ContractMenu& menu, const std::vector<FvType>& types) {
    double u = 0.0;
    for (size_t l = 0; l < types.size(); ++l)
        u += menu.price_c * types[l].count * menu.items[l].f_hz -
             types[l].count * types[l].theta * menu.items[l].w;
    return u;
}

/// Buckets FVs into L quantiles of theta (quantile shares from type_probs,
/// uniform when empty). Bucket theta is the member mean; the bucket cap is
/// the smallest member capacity so every member can honor the item. Buckets
/// with tied thetas are merged, so the returned types are strictly increasing.
inline TypeClassification classify_types(const std::vector<ServerProfile>& fv_profiles, int levels,
                                         const std::vector<double>& type_probs = {}) {
    if (levels < 1) throw std::domain_error("contract levels must be >= 1");
    const int m = static_cast<int>(fv_profiles.size());
    if (m == 0) throw std::domain_error("classify_types requires at least one FV");

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    auto theta_of = [&](int i) { return fv_profiles[i].sigma * fv_profiles[i].f_max_hz; };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return theta_of(a) < theta_of(b); });

    // Quantile boundaries from cumulative shares.
    std::vector<int> boundary(levels + 1, 0);
    double cum = 0.0;
    for (int l = 0; l < levels; ++l) {
        cum += type_probs.empty() ? 1.0 / levels : type_probs[l];
        boundary[l + 1] = std::min(m, static_cast<int>(std::lround(cum * m)));
    }
    boundary[levels] = m;

    struct Bucket {
        double theta_sum = 0.0;
        double cap = 0.0;
        std::vector<int> members;
    };
    std::vector<Bucket> buckets;
    for (int l = 0; l < levels; ++l) {
        Bucket b;
        b.cap = std::numeric_limits<double>::infinity();
        for (int i = boundary[l]; i < boundary[l + 1]; ++i) {
            b.theta_sum += theta_of(order[i]);
            b.cap = std::min(b.cap, fv_profiles[order[i]].f_max_hz);
            b.members.push_back(order[i]);
        }
        if (!b.members.empty()) buckets.push_back(std::move(b));
    }
    // Merge buckets whose mean theta does not strictly increase.
    for (size_t i = 1; i < buckets.size();) {
        const double prev = buckets[i - 1].theta_sum / buckets[i - 1].members.size();
        const double cur = buckets[i].theta_sum / buckets[i].members.size();
        if (cur <= prev * (1.0 + 1e-12)) {
            buckets[i - 1].theta_sum += buckets[i].theta_sum;
            buckets[i - 1].cap = std::min(buckets[i - 1].cap, buckets[i].cap);
            buckets[i - 1].members.insert(buckets[i - 1].members.end(), buckets[i].members.begin(),
                                          buckets[i].members.end());
            buckets.erase(buckets.begin() + i);
        } else {
            ++i;
        }
    }

    TypeClassification out;
    out.bucket_of.assign(m, 0);
    for (size_t l = 0; l < buckets.size(); ++l) {
        const auto& b = buckets[l];
        out.types.push_back({b.theta_sum / b.members.size(), b.cap,
                             static_cast<double>(b.members.size())});
        for (int i : b.members) out.bucket_of[i] = static_cast<int>(l);
    }
    return out;
}

/// IR/IC enumeration report for a menu.
struct FeasibilityReport {
    double worst_ir_violation = 0.0;  // positive = violated, relative scale
    double worst_ic_violation = 0.0;
    bool monotone_f = true;
    bool monotone_w = true;
    bool feasible(double tol = 1e-9) const {
        return worst_ir_violation <= tol && worst_ic_violation <= tol && monotone_f && monotone_w;
    }
};

/// Enumerates all L IR and L(L-1) IC inequalities and reports the worst
/// violation on a relative scale.
inline FeasibilityReport verify_feasibility(const ContractMenu& menu,
                                            const std::vector<FvType>& types, double cycles,
                                            double e, double kappa_fv) {
    FeasibilityReport report;
    const int levels = static_cast<int>(types.size());
    auto scale = [&](double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); };
    for (int i = 0; i < levels; ++i) {
        const double own = fv_utility(types[i].theta, menu.items[i], cycles, e, kappa_fv);
        report.worst_ir_violation =
            std::max(report.worst_ir_violation, -own / scale(own, 0.0));
        for (int j = 0; j < levels; ++j) {
            if (j == i) continue;
            const double other = fv_utility(types[i].theta, menu.items[j], cycles, e, kappa_fv);
            report.worst_ic_violation =
                std::max(report.worst_ic_violation, (other - own) / scale(own, other));
        }
        if (i > 0) {
            if (menu.items[i].f_hz < menu.items[i - 1].f_hz - 1e-12) report.monotone_f = false;
            if (menu.items[i].w < menu.items[i - 1].w - 1e-12) report.monotone_w = false;
        }
    }
    return report;
}

namespace detail {

/// Weighted isotonic regression (pool adjacent violators): minimizes
/// sum w_i (f_i - m_i)^2 over non-decreasing f.
inline std::vector<double> isotonic_fit(const std::vector<double>& targets,
                                        const std::vector<double>& weights) {
    struct Block {
        double value, weight;
        int count;
    };
    std::vector<Block> blocks;
    for (size_t i = 0; i < targets.size(); ++i) {
        blocks.push_back({targets[i], weights[i], 1});
        while (blocks.size() >= 2 && blocks[blocks.size() - 2].value >= blocks.back().value) {
            Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
            a.weight += b.weight;
            a.count += b.count;
        }
    }
    std::vector<double> fit;
    fit.reserve(targets.size());
    for (const auto& b : blocks) fit.insert(fit.end(), b.count, b.value);
    return fit;
}

}  // namespace detail

/// Builds the optimal menu for SP2.1 with cycle count `cycles`.
///
/// The tight IR/LDIC constraints express every reward in terms of the
/// allocations:  w_1 = A f_1^2 / theta_1,  w_l = w_{l-1} + A (f_l^2 -
/// f_{l-1}^2) / theta_l  with A = e * kappa * C.  Substituting into the MBS
/// utility leaves a separable concave quadratic in f over non-decreasing f
/// with per-type caps, solved exactly by weighted isotonic regression and
/// clamping against the suffix-min caps. The w_L < c ceiling is handled by
/// bisection on its multiplier. The resulting menu is re-verified against
/// the full IR/IC enumeration and monotonicity before being returned.
inline ContractMenu solve_contract(const std::vector<FvType>& types, double cycles, double c,
                                   double e, double kappa_fv) {
    const int levels = static_cast<int>(types.size());
    if (levels == 0) throw std::domain_error("empty type list");
    if (c <= 0.0) throw std::domain_error("resource price must be positive");
    for (int l = 1; l < levels; ++l)
        if (types[l].theta <= types[l - 1].theta)
            throw std::domain_error("type values must be strictly increasing");

    const double A = e * kappa_fv * cycles;

    // Payment term sum_l M_l theta_l w_l = sum_j B_j f_j^2 with
    // B_j = A (S_j/theta_j - S_{j+1}/theta_{j+1}), S_j = sum_{l>=j} M_l theta_l.
    std::vector<double> suffix(levels + 1, 0.0);
    for (int l = levels - 1; l >= 0; --l)
        suffix[l] = suffix[l + 1] + types[l].count * types[l].theta;
    std::vector<double> quad(levels), lin(levels), wl_coeff(levels);
    for (int l = 0; l < levels; ++l) {
        const double next = l + 1 < levels ? suffix[l + 1] / types[l + 1].theta : 0.0;
        quad[l] = A * (suffix[l] / types[l].theta - next);
        lin[l] = c * types[l].count;
        wl_coeff[l] =
            A * (1.0 / types[l].theta - (l + 1 < levels ? 1.0 / types[l + 1].theta : 0.0));
    }

    // Monotonicity makes the effective caps the suffix minima.
    std::vector<double> cap(levels);
    double suffix_cap = std::numeric_limits<double>::infinity();
    for (int l = levels - 1; l >= 0; --l) {
        suffix_cap = std::min(suffix_cap, types[l].f_cap_hz);
        cap[l] = suffix_cap;
    }

    auto solve_for_mu = [&](double mu) {
        std::vector<double> targets(levels), weights(levels);
        for (int l = 0; l < levels; ++l) {
            weights[l] = quad[l] + mu * wl_coeff[l];
            targets[l] = weights[l] > 0.0 ? lin[l] / (2.0 * weights[l]) : cap[l];
        }
        auto f = detail::isotonic_fit(targets, weights);
        for (int l = 0; l < levels; ++l) f[l] = std::clamp(f[l], 0.0, cap[l]);
        return f;
    };
    auto top_reward = [&](const std::vector<double>& f) {
        double w = 0.0;
        for (int l = 0; l < levels; ++l) w += wl_coeff[l] * f[l] * f[l];
        return w;
    };

    const double w_ceiling = c * (1.0 - 1e-9);
    std::vector<double> f = solve_for_mu(0.0);
    if (top_reward(f) > w_ceiling) {
        double mu_lo = 0.0, mu_hi = 1.0;
        while (top_reward(solve_for_mu(mu_hi)) > w_ceiling) mu_hi *= 2.0;
        for (int iter = 0; iter < 200 && (mu_hi - mu_lo) > 1e-14 * mu_hi; ++iter) {
            const double mid = 0.5 * (mu_lo + mu_hi);
            (top_reward(solve_for_mu(mid)) > w_ceiling ? mu_lo : mu_hi) = mid;
        }
        f = solve_for_mu(mu_hi);
    }

    ContractMenu menu;
    menu.price_c = c;
    menu.energy_cost_e = e;
    menu.items.resize(levels);
    double w_prev = 0.0, f_prev = 0.0;
    for (int l = 0; l < levels; ++l) {
        const double w =
            w_prev + A * (f[l] * f[l] - f_prev * f_prev) / types[l].theta;
        menu.items[l] = {f[l], w};
        w_prev = w;
        f_prev = f[l];
    }
    const auto report = verify_feasibility(menu, types, cycles, e, kappa_fv);
    if (!report.feasible(1e-9))
        throw std::logic_error("solve_contract produced an infeasible menu");
    return menu;
}

/// Menu realization for one FV: the item of its type bucket.
inline double fv_allocation_for(const ContractMenu& menu, int bucket) {
    return menu.items[bucket].f_hz;
}

}  // namespace vfc
