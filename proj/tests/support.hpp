#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "sysscale/presets.hpp"
#include "sysscale/soc.hpp"
#include "sysscale/workload.hpp"

namespace testsupport {

inline std::string data(const std::string &rel)
{
    return std::string(SYSSCALE_DATA_DIR) + "/" + rel;
}

inline sysscale::SocConfig table1() { return sysscale::skylake_like_config(); }

inline sysscale::OperatingPoint high(const sysscale::SocConfig &cfg)
{
    return sysscale::operating_point(cfg, cfg.levels.size() - 1);
}

inline sysscale::OperatingPoint low(const sysscale::SocConfig &cfg)
{
    return sysscale::operating_point(cfg, 0);
}

inline sysscale::TraceSlice slice(double fc, double fl, double fb, double core_bw = 0.0,
                                  double gfx_bw = 0.0, double io_bw = 0.0)
{
    sysscale::TraceSlice s;
    s.frac_compute = fc;
    s.frac_mem_latency = fl;
    s.frac_mem_bandwidth = fb;
    s.core_bw_demand = core_bw;
    s.gfx_bw_demand = gfx_bw;
    s.io_bw_demand = io_bw;
    return s;
}

/// Random bottleneck split summing to 1.
inline sysscale::TraceSlice random_slice(std::mt19937_64 &rng, double max_bw = 30.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng);
    if (a > b)
        std::swap(a, b);
    return slice(a, b - a, 1.0 - b, max_bw * u(rng), 0.2 * max_bw * u(rng),
                 0.2 * max_bw * u(rng));
}

} // namespace testsupport

#include <random>
#include <string>
#include <vector>

#include "sysscale/dvfs_flow.hpp"

namespace testsupport {

/// Independent check of the flow's ordering rules. Returns an empty string
/// when every rule holds, else the first broken rule.
inline std::string plan_order_violation(const sysscale::TransitionPlan &plan)
{
    using sysscale::StepKind;
    const StepKind fixed[] = {StepKind::BlockAndDrain, StepKind::EnterSelfRefresh,
                              StepKind::LoadMrc, StepKind::RelockPlls,
                              StepKind::ExitSelfRefresh, StepKind::Unblock};
    std::vector<std::size_t> pos;
    for (StepKind k : fixed) {
        std::size_t found = plan.steps.size();
        int count = 0;
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            if (plan.steps[i].kind == k) {
                found = i;
                ++count;
            }
        }
        if (count != 1)
            return std::string("step ") + sysscale::to_string(k) + " must appear once";
        pos.push_back(found);
    }
    for (std::size_t i = 1; i < pos.size(); ++i) {
        if (!(pos[i - 1] < pos[i]))
            return "fixed steps out of order";
    }
    std::size_t relock = pos[3];
    double sum = 0.0;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto &s = plan.steps[i];
        sum += s.latency_us;
        if (s.kind == StepKind::RaiseVoltage && !(i < relock))
            return "voltage raise after the clock change";
        if (s.kind == StepKind::LowerVoltage && !(i > relock))
            return "voltage drop before the clock change";
        if (s.kind == StepKind::RaiseVoltage && !(s.to_v > s.from_v))
            return "raise step does not raise";
        if (s.kind == StepKind::LowerVoltage && !(s.to_v < s.from_v))
            return "lower step does not lower";
    }
    if (sum != plan.total_latency_us)
        return "total latency is not the sum of the steps";
    return {};
}

/// A legal point with random clocks and voltages at or above the curves.
inline sysscale::OperatingPoint random_point(const sysscale::SocConfig &cfg,
                                             std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    sysscale::OperatingPoint op;
    op.level = rng() % 2;
    op.dram_freq_ghz = cfg.dram_freq_bins_ghz[rng() % cfg.dram_freq_bins_ghz.size()];
    op.mc_freq_ghz = op.dram_freq_ghz * cfg.mc_freq_ratio;
    op.io_interconnect_freq_ghz = 0.2 + 0.6 * u(rng);
    op.core_freq_ghz = 0.8 + 2.3 * u(rng);
    op.gfx_freq_ghz = 0.3 + 0.7 * u(rng);
    for (const auto &r : cfg.rails) {
        double need = sysscale::rail_requirement(cfg, r.name, op);
        double margin = u(rng) < 0.3 ? 0.0 : 0.05 * u(rng);
        op.rail_voltages[r.name] = std::round((need + margin) * 1e4) / 1e4 + 1e-4;
    }
    return op;
}

} // namespace testsupport
