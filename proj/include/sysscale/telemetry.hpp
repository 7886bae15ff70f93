#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sysscale/soc.hpp"
#include "sysscale/workload.hpp"

namespace sysscale {

/// The four counters the governor reads, in the emulated units.
struct PerfCounterSample {
    double gfx_llc_misses = 0.0;        ///< events/ms
    double llc_occupancy_tracer = 0.0;  ///< waiting requests
    double llc_stalls = 0.0;            ///< stall events/ms
    double io_rpq = 0.0;                ///< queue occupancy
    double timestamp_ms = 0.0;

    bool operator==(const PerfCounterSample &) const = default;
};

/// Counter emulation; all counters read 0 in self-refresh states. Noise, when cfg.counters.noise_sigma > 0, is a
/// lognormal multiplier with unit median drawn from `rng`.
PerfCounterSample sample_counters(const SocConfig &cfg, const TraceSlice &slice,
                                  const OperatingPoint &op, std::mt19937_64 &rng,
                                  double timestamp_ms = 0.0);

/// Noise-free convenience overload.
PerfCounterSample sample_counters(const SocConfig &cfg, const TraceSlice &slice,
                                  const OperatingPoint &op,
                                  double timestamp_ms = 0.0);

/// Field-wise mean; the timestamp is the last sample's. Throws
/// InvariantError on an empty window.
PerfCounterSample average_window(std::span<const PerfCounterSample> samples);

std::string counters_to_csv(std::span<const PerfCounterSample> samples);

} // namespace sysscale
