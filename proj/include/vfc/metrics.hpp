#pragma once

#include <cmath>
#include <vector>

namespace vfc {

/// Jain's fairness index (sum x)^2 / (N * sum x^2); 1 for equal shares,
/// 1/N when one vehicle holds everything. All-zero input is defined as 1
/// (vacuous fairness).
inline double jain_fairness(const std::vector<double>& x) {
    if (x.empty()) return 1.0;
    double sum = 0.0, sum_sq = 0.0;
    for (double v : x) {
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) return 1.0;
    return sum * sum / (static_cast<double>(x.size()) * sum_sq);
}

/// Aggregate run metrics plus their per-slot series.
struct RunMetrics {
    double avg_delay_s = 0.0;
    double completion_ratio = 0.0;
    double throughput_bps = 0.0;
    double jain_fairness = 0.0;
    double avg_energy_j = 0.0;
    std::vector<double> slot_avg_delay_s;
    std::vector<double> slot_completion_ratio;
    std::vector<double> slot_throughput_bps;
    std::vector<double> slot_jain_fairness;
    std::vector<double> slot_avg_energy_j;
};

}  // namespace vfc
