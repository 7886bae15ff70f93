#include "sysscale/power.hpp"

#include <cmath>

#include "sysscale/error.hpp"

namespace sysscale {

const char *to_string(PowerState s)
{
    switch (s) {
    case PowerState::C0: return "C0";
    case PowerState::C2: return "C2";
    case PowerState::C6: return "C6";
    case PowerState::C7: return "C7";
    case PowerState::C8: return "C8";
    }
    return "?";
}

PowerState power_state_from_string(const std::string &s)
{
    for (auto st : {PowerState::C0, PowerState::C2, PowerState::C6,
                    PowerState::C7, PowerState::C8}) {
        if (s == to_string(st))
            return st;
    }
    throw ParseError("unknown power state '" + s + "'");
}

void check_activity(const ActivitySample &act)
{
    auto frac = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!frac(act.interface_utilization) || !frac(act.core_utilization) ||
        !frac(act.gfx_utilization) || !frac(act.io_engine_activity))
        throw InvariantError("activity fraction outside [0,1]");
    if (act.dram_read_write_bw_gbps < 0.0)
        throw InvariantError("negative DRAM bandwidth");
    if (!dram_active(act.power_state) && act.dram_read_write_bw_gbps > 0.0)
        throw InvariantError(std::string("DRAM traffic in ") +
                             to_string(act.power_state));
}

std::map<std::string, double>
PowerBreakdown::by_rail(const ComputeLimits &limits) const
{
    std::map<std::string, double> rails;
    rails[kRailSa] = mc + io_interconnect;
    rails[kRailVddq] = dram.background + dram.array + dram.termination;
    rails[kRailIo] = dram.ddrio;
    rails[limits.core_rail] += compute.core;
    rails[limits.gfx_rail] += compute.gfx;
    return rails;
}

MemoryPower memory_power(const SocConfig &cfg, const OperatingPoint &op,
                         const ActivitySample &act,
                         const PowerCoefficients &coef, bool mrc_optimized)
{
    MemoryPower p;
    if (dram_active(act.power_state)) {
        double accesses_per_s =
            act.dram_read_write_bw_gbps * 1e9 / kBytesPerAccess;
        const VoltageRail *vio = cfg.find_rail(kRailIo);
        double vio_ratio = vio && vio->v_nominal > 0.0
                               ? op.voltage(kRailIo) / vio->v_nominal
                               : 1.0;
        p.background = coef.k_bg * op.dram_freq_ghz + coef.p_refresh;
        p.array = coef.e_array * accesses_per_s;
        p.termination = coef.k_term * act.interface_utilization;
        p.ddrio = coef.k_io_ddr * op.dram_freq_ghz * vio_ratio * vio_ratio;
    } else {
        p.background = coef.p_refresh;
    }
    if (!mrc_optimized) {
        double k = cfg.mrc_penalty.power_factor;
        p.background *= k;
        p.array *= k;
        p.termination *= k;
        p.ddrio *= k;
    }
    return p;
}

double mc_power(const OperatingPoint &op, const PowerCoefficients &coef)
{
    double v = op.voltage(kRailSa);
    return coef.k_mc_static * v * coef.temperature_factor +
           coef.k_mc_dyn * v * v * op.mc_freq_ghz;
}

double io_domain_power(const OperatingPoint &op, const ActivitySample &,
                       const PowerCoefficients &coef)
{
    double v = op.voltage(kRailSa);
    return coef.k_ic_dyn * v * v * op.io_interconnect_freq_ghz;
}

ComputePower compute_power(const SocConfig &cfg, const OperatingPoint &op,
                           const ActivitySample &act,
                           const PowerCoefficients &coef)
{
    ComputePower p;
    // Deep package C-states power-gate the compute domain.
    if (!dram_active(act.power_state))
        return p;
    double vc = op.voltage(cfg.compute.core_rail);
    double vg = op.voltage(cfg.compute.gfx_rail);
    p.core = coef.k_core_dyn * act.core_utilization * vc * vc * op.core_freq_ghz +
             coef.k_core_leak * vc * coef.temperature_factor;
    p.gfx = coef.k_gfx_dyn * act.gfx_utilization * vg * vg * op.gfx_freq_ghz +
            coef.k_gfx_leak * vg * coef.temperature_factor;
    return p;
}

PowerBreakdown soc_power(const SocConfig &cfg, const OperatingPoint &op,
                         const ActivitySample &act,
                         const PowerCoefficients &coef, bool mrc_optimized)
{
    PowerBreakdown b;
    b.dram = memory_power(cfg, op, act, coef, mrc_optimized);
    b.mc = mc_power(op, coef) *
           (mrc_optimized ? 1.0 : cfg.mrc_penalty.power_factor);
    b.io_interconnect = io_domain_power(op, act, coef);
    b.compute = compute_power(cfg, op, act, coef);
    return b;
}

double energy(std::span<const PowerSlice> series)
{
    double total = 0.0;
    for (const auto &s : series) {
        if (s.duration_s < 0.0)
            throw InvariantError("negative duration in power series");
        total += s.power_w * s.duration_s;
    }
    return total;
}

std::pair<double, double> mrc_penalty(double base_power_w, double base_perf,
                                      const MrcPenalty &penalty)
{
    return {base_power_w * penalty.power_factor, base_perf * penalty.perf_factor};
}

std::pair<double, double> mrc_penalty_inverse(double power_w, double perf,
                                              const MrcPenalty &penalty)
{
    return {power_w / penalty.power_factor, perf / penalty.perf_factor};
}

} // namespace sysscale
