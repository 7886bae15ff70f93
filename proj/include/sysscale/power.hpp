#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>

#include "sysscale/soc.hpp"

namespace sysscale {

enum class PowerState { C0, C2, C6, C7, C8 };

const char *to_string(PowerState s);
PowerState power_state_from_string(const std::string &s);

/// DRAM services requests only in C0 and C2; deeper states keep it in
/// self-refresh.
constexpr bool dram_active(PowerState s)
{
    return s == PowerState::C0 || s == PowerState::C2;
}

struct ActivitySample {
    double dram_read_write_bw_gbps = 0.0;
    double interface_utilization = 0.0;
    double core_utilization = 0.0;
    double gfx_utilization = 0.0;
    double io_engine_activity = 0.0;
    PowerState power_state = PowerState::C0;
};

/// Throws InvariantError when a fraction is outside [0,1] or a self-refresh
/// state carries DRAM traffic.
void check_activity(const ActivitySample &act);

struct MemoryPower {
    double background = 0.0;
    double array = 0.0;
    double termination = 0.0;
    double ddrio = 0.0;

    double total() const { return background + array + termination + ddrio; }
};

struct ComputePower {
    double core = 0.0;
    double gfx = 0.0;

    double total() const { return core + gfx; }
};

struct PowerBreakdown {
    MemoryPower dram;          ///< DRAM + DDRIO
    double mc = 0.0;           ///< memory controller
    double io_interconnect = 0.0;
    ComputePower compute;

    double memory() const { return dram.total() + mc; }
    double io() const { return io_interconnect; }
    double total() const { return memory() + io() + compute.total(); }

    /// Rail-level view. Compute rails use the names from `limits`.
    std::map<std::string, double> by_rail(const ComputeLimits &limits) const;
};

inline constexpr double kBytesPerAccess = 64.0;

/// DRAM and DDRIO power. With `mrc_optimized == false` every component is
/// scaled by cfg.mrc_penalty.power_factor.
MemoryPower memory_power(const SocConfig &cfg, const OperatingPoint &op,
                         const ActivitySample &act,
                         const PowerCoefficients &coef, bool mrc_optimized);

/// Static (V * temperature) plus dynamic (V^2 f) memory-controller power.
double mc_power(const OperatingPoint &op, const PowerCoefficients &coef);

double io_domain_power(const OperatingPoint &op, const ActivitySample &act,
                       const PowerCoefficients &coef);

ComputePower compute_power(const SocConfig &cfg, const OperatingPoint &op,
                           const ActivitySample &act,
                           const PowerCoefficients &coef);

/// Whole-SoC breakdown. The MRC penalty applies to the memory domain
/// (DRAM, DDRIO and memory controller) only.
PowerBreakdown soc_power(const SocConfig &cfg, const OperatingPoint &op,
                         const ActivitySample &act,
                         const PowerCoefficients &coef, bool mrc_optimized);

struct PowerSlice {
    double power_w = 0.0;
    double duration_s = 0.0;
};

/// Time integral of a piecewise-constant power series. Negative durations
/// raise InvariantError.
double energy(std::span<const PowerSlice> series);

inline double edp(double energy_j, double delay_s) { return energy_j * delay_s; }

/// Applies the unoptimized-register penalty to a memory-subsystem power and
/// a performance ratio.
std::pair<double, double> mrc_penalty(double base_power_w, double base_perf,
                                      const MrcPenalty &penalty = {});
std::pair<double, double> mrc_penalty_inverse(double power_w, double perf,
                                              const MrcPenalty &penalty = {});

} // namespace sysscale
