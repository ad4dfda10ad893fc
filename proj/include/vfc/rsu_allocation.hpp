#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace vfc {

/// One task competing for an RSU's frequency budget.
struct AllocationTask {
    double cycles = 0.0;
    double deadline_slack_s = 0.0;  // deadline minus upload minus relay; <= 0 is infeasible
    double e_cap_j = 0.0;           // per-task energy cap at this server
    double priority = 0.0;          // server preference; lowest evicted first on over-subscription
};

struct AllocationRequest {
    std::vector<AllocationTask> tasks;
    double f_max_hz = 0.0;
    double kappa = 0.0;
};

struct TaskBounds {
    double f_lo = 0.0;
    double f_hi = 0.0;
    bool feasible = false;
};

struct AllocationResult {
    std::vector<double> f_hz;    // 0 for rejected tasks
    std::vector<bool> accepted;
    double multiplier = 0.0;     // capacity dual value
};

/// Frequency box per task: f_lo keeps the deadline, f_hi keeps the energy cap.
inline std::vector<TaskBounds> per_task_bounds(const AllocationRequest& request) {
    std::vector<TaskBounds> bounds(request.tasks.size());
    for (size_t i = 0; i < request.tasks.size(); ++i) {
        const auto& t = request.tasks[i];
        TaskBounds b;
        b.f_lo = t.deadline_slack_s > 0.0 ? t.cycles / t.deadline_slack_s
                                          : std::numeric_limits<double>::infinity();
        b.f_hi = std::min(std::sqrt(t.e_cap_j / (request.kappa * t.cycles)), request.f_max_hz);
        b.feasible = b.f_lo <= b.f_hi;
        bounds[i] = b;
    }
    return bounds;
}

/// KKT solution of  min sum C_i/f_i  s.t.  sum f_i <= f_max, f_i in [lo_i, hi_i]:
/// f_i(lambda) = clamp(sqrt(C_i/lambda), lo_i, hi_i) with lambda found by
/// bisection so that sum f_i(lambda) = f_max (lambda = 0 when the box solution
/// already fits). Tasks with empty boxes are rejected; if the mandatory minima
/// alone exceed f_max, the lowest-priority tasks are evicted until feasible.
inline AllocationResult solve_sp1(const AllocationRequest& request) {
    const size_t n = request.tasks.size();
    AllocationResult result;
    result.f_hz.assign(n, 0.0);
    result.accepted.assign(n, false);
    if (n == 0) return result;

    const auto bounds = per_task_bounds(request);
    std::vector<size_t> active;
    for (size_t i = 0; i < n; ++i)
        if (bounds[i].feasible) active.push_back(i);

    // Evict lowest-priority tasks while the deadline minima over-subscribe.
    auto sum_lo = [&] {
        double s = 0.0;
        for (size_t i : active) s += bounds[i].f_lo;
        return s;
    };
    while (!active.empty() && sum_lo() > request.f_max_hz) {
        auto worst = std::min_element(active.begin(), active.end(), [&](size_t a, size_t b) {
            return request.tasks[a].priority < request.tasks[b].priority;
        });
        active.erase(worst);
    }
    if (active.empty()) return result;

    double sum_hi = 0.0;
    for (size_t i : active) sum_hi += bounds[i].f_hi;

    auto alloc_at = [&](double lambda, size_t i) {
        const double f = std::sqrt(request.tasks[i].cycles / lambda);
        return std::clamp(f, bounds[i].f_lo, bounds[i].f_hi);
    };

    double lambda = 0.0;
    if (sum_hi <= request.f_max_hz) {
        for (size_t i : active) result.f_hz[i] = bounds[i].f_hi;
    } else {
        // sum f(lambda) is non-increasing in lambda; bracket and bisect.
        double lo = std::numeric_limits<double>::max();
        double hi = 0.0;
        for (size_t i : active) {
            lo = std::min(lo, request.tasks[i].cycles / (bounds[i].f_hi * bounds[i].f_hi));
            hi = std::max(hi, request.tasks[i].cycles / (bounds[i].f_lo * bounds[i].f_lo));
        }
        lo *= 0.5;
        hi = std::max(hi * 2.0, lo * 4.0);
        for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * hi; ++iter) {
            const double mid = 0.5 * (lo + hi);
            double s = 0.0;
            for (size_t i : active) s += alloc_at(mid, i);
            (s > request.f_max_hz ? lo : hi) = mid;
        }
        lambda = hi;
        for (size_t i : active) result.f_hz[i] = alloc_at(lambda, i);
    }
    for (size_t i : active) result.accepted[i] = true;
    result.multiplier = lambda;
    return result;
}

}  // namespace vfc
