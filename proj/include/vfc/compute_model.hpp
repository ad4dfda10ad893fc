#pragma once

#include "vfc/types.hpp"

#include <stdexcept>

namespace vfc {

/// Delay components of one offloaded task. Result feedback is free.
struct DelayBreakdown {
    double upload_s = 0.0;
    double relay_s = 0.0;
    double compute_s = 0.0;
    double total_s() const { return upload_s + relay_s + compute_s; }
};

struct EnergyBreakdown {
    double tv_j = 0.0;
    double server_j = 0.0;
};

class UnreachableLinkError : public std::runtime_error {
  public:
    UnreachableLinkError() : std::runtime_error("link rate is zero; task cannot be offloaded") {}
};

inline double local_delay(const Task& task, double f_tv_hz) {
    return task.cycles / f_tv_hz;
}

/// Upload to the covering RSU, relay over fiber (hop count * D_in / r_f),
/// then compute on the allocated share. hops = 0 when the serving RSU is
/// the nearest one. The relay carries the input data, not cycles.
inline DelayBreakdown rsu_offload_delay(const Task& task, double rate_to_nearest_bps, int hops,
                                        double fiber_rate_bps, double f_alloc_hz) {
    if (rate_to_nearest_bps <= 0.0) throw UnreachableLinkError();
    DelayBreakdown d;
    d.upload_s = task.input_bits / rate_to_nearest_bps;
    d.relay_s = hops * task.input_bits / fiber_rate_bps;
    d.compute_s = task.cycles / f_alloc_hz;
    return d;
}

inline DelayBreakdown fv_offload_delay(const Task& task, double rate_bps, double f_alloc_hz) {
    if (rate_bps <= 0.0) throw UnreachableLinkError();
    DelayBreakdown d;
    d.upload_s = task.input_bits / rate_bps;
    d.compute_s = task.cycles / f_alloc_hz;
    return d;
}

/// Selects the delay branch matching the one-hot decision.
inline double total_delay(const OffloadDecision& decision, double local_s, double rsu_total_s,
                          double fv_total_s) {
    switch (decision.kind) {
        case OffloadDecision::Kind::Local: return local_s;
        case OffloadDecision::Kind::Rsu: return rsu_total_s;
        case OffloadDecision::Kind::Fv: return fv_total_s;
    }
    return local_s;
}

/// TV-side energy: kappa * C * f^2 when local, p * D_in / r when offloading.
inline double tv_energy(const OffloadDecision& decision, const Task& task, double f_tv_hz,
                        double kappa_tv, double tx_power_w, double rate_bps) {
    if (decision.is_local()) return kappa_tv * task.cycles * f_tv_hz * f_tv_hz;
    if (rate_bps <= 0.0) throw UnreachableLinkError();
    return tx_power_w * task.input_bits / rate_bps;
}

inline double server_energy(const Task& task, double f_alloc_hz, double kappa_s) {
    return kappa_s * task.cycles * f_alloc_hz * f_alloc_hz;
}

}  // namespace vfc
