#include "sysscale/telemetry.hpp"

#include <cmath>
#include <sstream>

#include "sysscale/error.hpp"

namespace sysscale {

PerfCounterSample sample_counters(const SocConfig &cfg, const TraceSlice &slice,
                                  const OperatingPoint &op, std::mt19937_64 &rng,
                                  double timestamp_ms)
{
    const CounterModel &m = cfg.counters;
    PerfCounterSample s;
    s.timestamp_ms = timestamp_ms;
    if (!dram_active(slice.power_state))
        return s;
    s.gfx_llc_misses = m.gfx_misses_per_gbps * slice.gfx_bw_demand;
    s.llc_occupancy_tracer =
        m.occupancy_scale * slice.core_bw_demand / peak_bandwidth_gbps(cfg, op);
    s.llc_stalls = m.stall_scale * slice.frac_mem_latency *
                   memory_latency_ns(cfg.latency, op) / 100.0;
    s.io_rpq = m.rpq_scale * slice.io_bw_demand / io_capacity_gbps(cfg, op);

    if (m.noise_sigma > 0.0) {
        std::lognormal_distribution<double> noise(0.0, m.noise_sigma);
        s.gfx_llc_misses *= noise(rng);
        s.llc_occupancy_tracer *= noise(rng);
        s.llc_stalls *= noise(rng);
        s.io_rpq *= noise(rng);
    }
    return s;
}

PerfCounterSample sample_counters(const SocConfig &cfg, const TraceSlice &slice,
                                  const OperatingPoint &op, double timestamp_ms)
{
    SocConfig quiet = cfg;
    quiet.counters.noise_sigma = 0.0;
    std::mt19937_64 unused(0);
    return sample_counters(quiet, slice, op, unused, timestamp_ms);
}

PerfCounterSample average_window(std::span<const PerfCounterSample> samples)
{
    if (samples.empty())
        throw InvariantError("average_window: empty sample window");
    PerfCounterSample avg;
    for (const auto &s : samples) {
        avg.gfx_llc_misses += s.gfx_llc_misses;
        avg.llc_occupancy_tracer += s.llc_occupancy_tracer;
        avg.llc_stalls += s.llc_stalls;
        avg.io_rpq += s.io_rpq;
    }
    double n = static_cast<double>(samples.size());
    avg.gfx_llc_misses /= n;
    avg.llc_occupancy_tracer /= n;
    avg.llc_stalls /= n;
    avg.io_rpq /= n;
    avg.timestamp_ms = samples.back().timestamp_ms;
    return avg;
}

std::string counters_to_csv(std::span<const PerfCounterSample> samples)
{
    std::ostringstream out;
    out.precision(17);
    out << "timestamp_ms,gfx_llc_misses,llc_occupancy_tracer,llc_stalls,io_rpq\n";
    for (const auto &s : samples)
        out << s.timestamp_ms << ',' << s.gfx_llc_misses << ','
            << s.llc_occupancy_tracer << ',' << s.llc_stalls << ',' << s.io_rpq
            << '\n';
    return out.str();
}

} // namespace sysscale
