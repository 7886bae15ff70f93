#pragma once

#include <string>
#include <vector>

namespace sysscale {

/// Coefficients of the per-domain power model. Units are noted per field;
/// frequencies are GHz, voltages volts, powers watts.
struct PowerCoefficients {
    double k_bg = 0.0;          ///< DRAM background, W/GHz
    double p_refresh = 0.0;     ///< DRAM refresh, W (frequency independent)
    double e_array = 0.0;       ///< DRAM core energy, J per 64-byte access
    double k_term = 0.0;        ///< termination, W at full interface utilization
    double k_io_ddr = 0.0;      ///< DDRIO clocked part, W/GHz at nominal V_IO
    double k_mc_dyn = 0.0;      ///< W/(V^2 GHz)
    double k_mc_static = 0.0;   ///< W/V
    double k_ic_dyn = 0.0;      ///< IO interconnect, W/(V^2 GHz)
    double k_core_dyn = 0.0;    ///< W/(V^2 GHz), all cores together
    double k_gfx_dyn = 0.0;     ///< W/(V^2 GHz)
    double k_core_leak = 0.0;   ///< W/V
    double k_gfx_leak = 0.0;    ///< W/V
    double temperature_factor = 1.0;

    bool operator==(const PowerCoefficients &) const = default;
};

/// Loaded-latency model used by the performance model and the stall counter:
/// latency_ns = fixed_ns + mc_ns_ghz / mc_freq + dram_ns_ghz / dram_freq.
struct LatencyModel {
    double fixed_ns = 40.0;
    double mc_ns_ghz = 10.0;
    double dram_ns_ghz = 20.0;
};

/// Proportionality constants mapping demand to the emulated counters.
struct CounterModel {
    double gfx_misses_per_gbps = 15625.0;  ///< 64B misses per ms per GB/s
    double occupancy_scale = 32.0;         ///< waiting requests at 100% of peak
    double stall_scale = 1000.0;           ///< stalls/ms per (frac_lat * ns / 100)
    double rpq_scale = 16.0;               ///< queue entries at 100% of IO capacity
    double noise_sigma = 0.0;              ///< lognormal sigma, 0 disables noise
};

/// Fixed latencies of the transition flow, microseconds.
struct TransitionLatencies {
    double drain_us = 0.8;               ///< includes self-refresh entry
    double self_refresh_exit_us = 4.5;
    double mrc_load_us = 0.8;
    double firmware_us = 0.8;            ///< PLL/DLL relock and flow overhead
};

/// Compute-domain P-state limits and the budget-to-frequency projection map.
struct ComputeLimits {
    double core_pn_ghz = 0.8;
    double core_max_ghz = 3.1;
    double gfx_pn_ghz = 0.3;
    double gfx_max_ghz = 1.0;
    double graphics_core_share = 0.15;
    double core_ghz_per_watt = 1.0;
    double gfx_ghz_per_watt = 0.25;
    std::string core_rail = "V_CORE";
    std::string gfx_rail = "V_GFX";
};

struct GovernorParams {
    double degradation_bound = 0.01;
    double static_guard_band = 0.10;
    int min_dwell_intervals = 1;
    bool population_sigma = true;
};

struct MrcPenalty {
    double power_factor = 1.22;
    double perf_factor = 0.90;
};

/// One row of the peripheral bandwidth table. `gbps` is the demand at
/// `reference_rate` (refresh Hz for displays, fps for cameras); demand
/// scales linearly with the configured rate.
struct StaticDemandRow {
    std::string kind;   ///< "display" or "camera"
    std::string cls;    ///< resolution class, e.g. "HD"
    double gbps = 0.0;
    double reference_rate = 60.0;
};

using StaticDemandTable = std::vector<StaticDemandRow>;

} // namespace sysscale
