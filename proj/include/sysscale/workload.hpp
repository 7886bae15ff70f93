#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sysscale/power.hpp"
#include "sysscale/soc.hpp"

namespace sysscale {

enum class WorkloadClass { Cpu, Graphics, BatteryLife };

const char *to_string(WorkloadClass c);
WorkloadClass workload_class_from_string(const std::string &s);

struct DisplayConfig {
    std::string cls;
    double refresh_hz = 60.0;

    bool operator==(const DisplayConfig &) const = default;
};

struct CameraConfig {
    std::string cls;
    double fps = 30.0;

    bool operator==(const CameraConfig &) const = default;
};

inline constexpr std::size_t kMaxDisplays = 3;

struct PeripheralConfig {
    std::vector<DisplayConfig> displays;
    std::vector<CameraConfig> cameras;

    bool operator==(const PeripheralConfig &) const = default;
};

/// One time slice of a workload. The three bottleneck fractions split the
/// slice's execution time into compute-bound, memory-latency-bound and
/// memory-bandwidth-bound parts and sum to 1.
struct TraceSlice {
    double duration_ms = 1.0;
    double frac_compute = 1.0;
    double frac_mem_latency = 0.0;
    double frac_mem_bandwidth = 0.0;
    double core_bw_demand = 0.0;   ///< GB/s
    double gfx_bw_demand = 0.0;    ///< GB/s
    double io_bw_demand = 0.0;     ///< GB/s, all IO traffic incl. displays
    double cpu_scalability = 0.0;
    PowerState power_state = PowerState::C0;
    PeripheralConfig peripheral_config;

    double total_bw_demand() const
    {
        return core_bw_demand + gfx_bw_demand + io_bw_demand;
    }
};

struct WorkloadTrace {
    std::string name;
    std::vector<TraceSlice> slices;
    WorkloadClass cls = WorkloadClass::Cpu;
    std::optional<std::uint64_t> seed;

    double duration_ms() const;
};

/// Throws InvariantError naming the first offending slice.
void validate_trace(const WorkloadTrace &trace);

/// Reads `<path>` (CSV, one row per slice) and its JSON sidecar (same path
/// with the extension replaced by `.json`, optional).
WorkloadTrace load_trace(const std::string &path);

/// Writes the CSV and the sidecar next to it.
void write_trace(const WorkloadTrace &trace, const std::string &path);

std::string trace_to_csv(const WorkloadTrace &trace);
WorkloadTrace trace_from_csv(const std::string &csv, const std::string &origin);

/// Per-slice statistics used by phase profiles.
struct SliceStats {
    double frac_compute = 0.0;
    double frac_lat = 0.0;
    double frac_bw = 0.0;
    double core_bw = 0.0;
    double gfx_bw = 0.0;
    double io_bw = 0.0;
    double scalability = 0.0;
};

struct PhaseSpec {
    std::size_t slices = 1;
    PowerState power_state = PowerState::C0;
    SliceStats mean;
    SliceStats stddev;
};

struct PhaseProfile {
    std::string name = "synthetic";
    WorkloadClass cls = WorkloadClass::Cpu;
    double slice_ms = 1.0;
    std::size_t cycles = 1;
    PeripheralConfig peripherals;
    std::vector<PhaseSpec> phases;
};

PhaseProfile load_profile(const std::string &path);

/// Deterministic trace generator: phases play in order, `cycles` times;
/// each slice draws its values from a normal distribution around the phase
/// mean (clamped to valid ranges, fractions renormalized).
WorkloadTrace synthesize(const PhaseProfile &profile, std::uint64_t seed);

/// Bandwidth implied by the peripheral configuration. Throws LookupError
/// for a peripheral class missing from `table`.
double static_demand(const PeripheralConfig &pcfg,
                     const StaticDemandTable &table);

/// Average loaded memory latency at `op`, ns.
double memory_latency_ns(const LatencyModel &lat, const OperatingPoint &op);

/// Performance of `slice` at `op` relative to `baseline` (1 = same speed).
/// The compute term follows the core clock for CPU and battery-life
/// workloads and the graphics clock for graphics workloads.
double relative_performance(const SocConfig &cfg, const TraceSlice &slice,
                            const OperatingPoint &op,
                            const OperatingPoint &baseline, bool mrc_optimized,
                            WorkloadClass cls = WorkloadClass::Cpu);

} // namespace sysscale
