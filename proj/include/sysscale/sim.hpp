#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sysscale/governor.hpp"
#include "sysscale/json_io.hpp"
#include "sysscale/power.hpp"
#include "sysscale/soc.hpp"
#include "sysscale/telemetry.hpp"
#include "sysscale/workload.hpp"

namespace sysscale {

enum class Policy {
    Baseline,        ///< top level, never transitions
    MdDvfs,          ///< lowest level, never transitions
    SysScale,
    MemScale,        ///< memory-only DVFS, no MRC retraining, no redistribution
    CoScale,         ///< MemScale plus core-frequency scaling
    MemScaleRedist,  ///< MemScale with its saving projected onto compute
    CoScaleRedist,
};

const char *to_string(Policy p);
/// Accepts the names printed by to_string. Throws ParseError.
Policy policy_from_string(const std::string &s);

struct SimOptions {
    std::uint64_t seed = 0;
    /// Run compute at the level's core/graphics clocks instead of the
    /// budget-derived P-state (the fixed-frequency setups used for
    /// memory-only comparisons).
    bool pin_compute = false;
    bool record_intervals = true;
};

struct IntervalLog {
    std::size_t index = 0;
    double start_ms = 0.0;
    double duration_ms = 0.0;
    std::size_t level = 0;             ///< level at the end of the interval
    bool dvfs_eligible = false;        ///< some time in C0/C2
    PerfCounterSample counters;        ///< window average
    double static_bw_gbps = 0.0;
    std::vector<Condition> triggering;
    std::size_t decided_level = 0;
    DomainBudgets budgets;
    double core_freq_ghz = 0.0;
    double gfx_freq_ghz = 0.0;
    double duty_cycle = 1.0;
    double compute_cap_w = 0.0;        ///< worst-case compute power of the P-state
    double energy_j = 0.0;
    double avg_power_w = 0.0;
    double avg_compute_w = 0.0;
    double avg_io_w = 0.0;
    double avg_memory_w = 0.0;
    double avg_dram_w = 0.0;
    /// Average DRAM (+DDRIO) power over the time spent in each state.
    std::map<std::string, double> dram_w_by_state;
    int transitions = 0;
    double stall_us = 0.0;
};

struct TransitionEvent {
    double time_ms = 0.0;
    std::size_t from_level = 0;
    std::size_t to_level = 0;
    std::string power_state;
    double latency_us = 0.0;
    bool mrc_optimized = true;
};

struct SimReport {
    std::string trace;
    std::string policy;
    std::uint64_t seed = 0;
    double tdp_watts = 0.0;
    double wall_time_s = 0.0;
    double total_energy_j = 0.0;
    double avg_power_w = 0.0;
    std::map<std::string, double> avg_power_by_domain;
    std::map<std::string, double> avg_power_by_rail;
    double work = 0.0;
    double baseline_work = 0.0;
    double performance_ratio = 1.0;
    double projected_gain = 0.0;       ///< -redist variants only
    double delay_s = 0.0;
    double edp = 0.0;
    int transitions_count = 0;
    double total_stall_us = 0.0;
    double avg_core_freq_ghz = 0.0;    ///< effective, over C0 time
    double avg_gfx_freq_ghz = 0.0;
    std::map<std::string, double> c_state_residencies;
    std::vector<TransitionEvent> transitions;
    std::vector<IntervalLog> intervals;
};

void to_json(json &j, const SimReport &r);
/// Pretty-printed JSON; byte-identical for identical inputs.
std::string report_to_json(const SimReport &r);
/// Per-interval timeline, one row per interval.
std::string intervals_to_csv(const SimReport &r);

/// Low point of the memory-only policies: DRAM and memory controller at the
/// lowest level's clocks, interconnect and all rails as at the top level.
OperatingPoint memscale_low_point(const SocConfig &cfg);

/// Runs one trace under one policy. The performance ratio compares against
/// a baseline run of the same trace. SysScale and the MemScale/CoScale
/// families need `thr`; an empty optional raises CalibrationError.
SimReport simulate(const WorkloadTrace &trace, Policy policy, const SocConfig &cfg,
                   const std::optional<ThresholdSet> &thr, const SimOptions &opts = {});

std::vector<SimReport> compare_policies(const WorkloadTrace &trace,
                                        const SocConfig &cfg,
                                        const std::optional<ThresholdSet> &thr,
                                        std::span<const Policy> policies,
                                        const SimOptions &opts = {});

/// One column per policy, one row per metric.
std::string comparison_to_csv(std::span<const SimReport> reports);

/// Slowdown of `slice` at `low` relative to `high`: 1 - perf(low)/perf(high).
double slice_degradation(const SocConfig &cfg, const TraceSlice &slice,
                         const OperatingPoint &high, const OperatingPoint &low,
                         WorkloadClass cls = WorkloadClass::Cpu);

/// Time-weighted degradation over the trace's C0 slices:
/// 1 - sum(d) / sum(d / perf).
double trace_degradation(const SocConfig &cfg, const WorkloadTrace &trace,
                         const OperatingPoint &high, const OperatingPoint &low);

/// Brute-force reference decision: `low.level` iff the degradation is
/// strictly below `bound`, else `high.level`.
std::size_t oracle_decide(const SocConfig &cfg, const TraceSlice &slice,
                          const OperatingPoint &high, const OperatingPoint &low,
                          double bound, WorkloadClass cls = WorkloadClass::Cpu);

} // namespace sysscale
