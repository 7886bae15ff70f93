#include "sysscale/governor.hpp"

#include <algorithm>
#include <cmath>

#include "sysscale/error.hpp"

namespace sysscale {

void to_json(json &j, const ThresholdSet &t)
{
    j = json{{"static_bw_thr", t.static_bw_thr},
             {"gfx_thr", t.gfx_thr},
             {"core_thr", t.core_thr},
             {"lat_thr", t.lat_thr},
             {"io_thr", t.io_thr},
             {"degradation_bound", t.degradation_bound}};
}

void from_json(const json &j, ThresholdSet &t)
{
    const json &src = j.contains("thresholds") ? j.at("thresholds") : j;
    t.static_bw_thr = src.at("static_bw_thr").get<double>();
    t.gfx_thr = src.at("gfx_thr").get<double>();
    t.core_thr = src.at("core_thr").get<double>();
    t.lat_thr = src.at("lat_thr").get<double>();
    t.io_thr = src.at("io_thr").get<double>();
    t.degradation_bound = src.value("degradation_bound", 0.01);
}

void check_thresholds(const ThresholdSet &t)
{
    for (double v : {t.static_bw_thr, t.gfx_thr, t.core_thr, t.lat_thr, t.io_thr}) {
        if (!(v >= 0.0))
            throw InvariantError("thresholds must be >= 0");
    }
    if (!(t.degradation_bound > 0.0 && t.degradation_bound < 1.0))
        throw InvariantError("degradation_bound must be in (0,1)");
}

ThresholdSet load_thresholds(const std::string &path)
{
    json j = read_json_file(path);
    ThresholdSet t;
    try {
        t = j.get<ThresholdSet>();
    } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
    check_thresholds(t);
    return t;
}

const char *to_string(Condition c)
{
    switch (c) {
    case Condition::Static: return "static";
    case Condition::Gfx: return "gfx";
    case Condition::Core: return "core";
    case Condition::Latency: return "latency";
    case Condition::Io: return "io";
    }
    return "?";
}

double static_bw_threshold(const SocConfig &cfg)
{
    if (cfg.levels.empty())
        throw ConfigError("no operating levels configured");
    OperatingPoint low = operating_point(cfg, 0);
    return peak_bandwidth_gbps(cfg, low) * (1.0 - cfg.governor.static_guard_band);
}

ThresholdSet calibrate_thresholds(std::span<const CalibrationRun> runs,
                                  double bound, double static_bw_thr,
                                  bool population_sigma)
{
    if (!(bound > 0.0 && bound < 1.0))
        throw CalibrationError("bound must be in (0,1)");
    if (runs.empty())
        throw CalibrationError("empty calibration corpus");

    struct Field {
        const char *name;
        double PerfCounterSample::*counter;
        double ThresholdSet::*threshold;
    };
    static constexpr Field fields[] = {
        {"gfx_llc_misses", &PerfCounterSample::gfx_llc_misses, &ThresholdSet::gfx_thr},
        {"llc_occupancy_tracer", &PerfCounterSample::llc_occupancy_tracer,
         &ThresholdSet::core_thr},
        {"llc_stalls", &PerfCounterSample::llc_stalls, &ThresholdSet::lat_thr},
        {"io_rpq", &PerfCounterSample::io_rpq, &ThresholdSet::io_thr},
    };

    ThresholdSet thr;
    thr.degradation_bound = bound;
    thr.static_bw_thr = static_bw_thr;
    for (const Field &f : fields) {
        std::vector<double> values;
        for (const auto &r : runs) {
            if (r.degradation < bound)
                values.push_back(r.counters.*f.counter);
        }
        if (values.empty())
            throw CalibrationError(std::string("no run below the bound for ") + f.name);
        double n = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values)
            mean += v;
        mean /= n;
        double ss = 0.0;
        for (double v : values)
            ss += (v - mean) * (v - mean);
        double denom = population_sigma ? n : n - 1.0;
        double sigma = denom > 0.0 ? std::sqrt(ss / denom) : 0.0;
        thr.*f.threshold = mean + sigma;
    }
    return thr;
}

Decision predict(const PerfCounterSample &avg, double static_bw,
                 const ThresholdSet &thr, std::size_t current_level,
                 std::size_t level_count)
{
    Decision d;
    if (static_bw > thr.static_bw_thr)
        d.triggering.push_back(Condition::Static);
    if (avg.gfx_llc_misses > thr.gfx_thr)
        d.triggering.push_back(Condition::Gfx);
    if (avg.llc_occupancy_tracer > thr.core_thr)
        d.triggering.push_back(Condition::Core);
    if (avg.llc_stalls > thr.lat_thr)
        d.triggering.push_back(Condition::Latency);
    if (avg.io_rpq > thr.io_thr)
        d.triggering.push_back(Condition::Io);

    std::size_t top = level_count == 0 ? 0 : level_count - 1;
    current_level = std::min(current_level, top);
    if (!d.triggering.empty())
        d.target_level = std::min(current_level + 1, top);
    else
        d.target_level = current_level == 0 ? 0 : current_level - 1;
    return d;
}

ThresholdSet thresholds_at(const ThresholdSet &thr, const SocConfig &cfg,
                           const OperatingPoint &observed,
                           const OperatingPoint &reference)
{
    ThresholdSet t = thr;
    t.core_thr *= peak_bandwidth_gbps(cfg, reference) / peak_bandwidth_gbps(cfg, observed);
    t.lat_thr *= memory_latency_ns(cfg.latency, observed) /
                 memory_latency_ns(cfg.latency, reference);
    t.io_thr *= io_capacity_gbps(cfg, reference) / io_capacity_gbps(cfg, observed);
    return t;
}

IoMemPower reserved_io_mem_power(const SocConfig &cfg, const OperatingPoint &op,
                                 const PowerCoefficients &coef,
                                 bool mrc_optimized)
{
    ActivitySample worst;
    worst.dram_read_write_bw_gbps = peak_bandwidth_gbps(cfg, op);
    worst.interface_utilization = 1.0;
    worst.io_engine_activity = 1.0;
    PowerBreakdown b = soc_power(cfg, op, worst, coef, mrc_optimized);
    return {b.io(), b.memory()};
}

DomainBudgets budgets_for(double tdp, const IoMemPower &reserved)
{
    // On a 2^-40 W grid tdp - r and the sum back are exact for tdp < 4096 W,
    // so the three budgets add up to tdp bit for bit.
    auto grid = [](double w) { return std::ldexp(std::round(std::ldexp(w, 40)), -40); };
    DomainBudgets b;
    b.io_w = grid(reserved.io_w);
    b.memory_w = grid(reserved.memory_w);
    double reserved_w = b.io_w + b.memory_w;
    if (reserved_w > tdp)
        throw InfeasibleTdpError("IO and memory reserve " + std::to_string(reserved_w) +
                                 " W, more than the " + std::to_string(tdp) +
                                 " W TDP");
    b.compute_w = tdp - reserved_w;
    return b;
}

DomainBudgets redistribute_budget(double tdp, const IoMemPower &high,
                                  const IoMemPower &low, const Decision &decision,
                                  std::size_t high_level)
{
    if (high.io_w < 0.0 || high.memory_w < 0.0 || low.io_w < 0.0 || low.memory_w < 0.0)
        throw InvariantError("negative IO/memory power");
    if (low.total() > high.total())
        throw InvariantError("low-point IO/memory power exceeds the high point's");
    return budgets_for(tdp, decision.target_level < high_level ? low : high);
}

ComputePower compute_power_at(const SocConfig &cfg, const PowerCoefficients &coef,
                              double core_ghz, double gfx_ghz, double core_util,
                              double gfx_util)
{
    const ComputeLimits &lim = cfg.compute;
    OperatingPoint op;
    op.core_freq_ghz = core_ghz;
    op.gfx_freq_ghz = gfx_ghz;
    op.rail_voltages[lim.core_rail] = rail_requirement(cfg, lim.core_rail, op);
    op.rail_voltages[lim.gfx_rail] = rail_requirement(cfg, lim.gfx_rail, op);
    ActivitySample act;
    act.core_utilization = core_util;
    act.gfx_utilization = gfx_util;
    return compute_power(cfg, op, act, coef);
}

namespace {

/// Largest f in [lo, hi] with power(f) <= budget, given power(lo) <= budget.
template <typename F>
double highest_within(F power, double lo, double hi, double budget)
{
    if (power(hi) <= budget)
        return hi;
    for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
        double mid = 0.5 * (lo + hi);
        (power(mid) <= budget ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

PStateChoice select_compute_pstate(const SocConfig &cfg,
                                   const PowerCoefficients &coef, double budget_w,
                                   const ActivitySample &act, WorkloadClass cls)
{
    const ComputeLimits &lim = cfg.compute;
    double uc = act.core_utilization;
    double ug = act.gfx_utilization;
    auto total = [&](double fc, double fg) {
        return compute_power_at(cfg, coef, fc, fg, uc, ug).total();
    };

    PStateChoice c;
    c.core_freq_ghz = lim.core_pn_ghz;
    c.gfx_freq_ghz = lim.gfx_pn_ghz;
    double at_pn = total(lim.core_pn_ghz, lim.gfx_pn_ghz);
    if (at_pn > budget_w) {
        c.duty_cycle = at_pn > 0.0 ? std::max(budget_w, 0.0) / at_pn : 1.0;
        c.power_w = c.duty_cycle * at_pn;
        return c;
    }

    switch (cls) {
    case WorkloadClass::Cpu:
        c.core_freq_ghz = highest_within(
            [&](double f) { return total(f, lim.gfx_pn_ghz); }, lim.core_pn_ghz,
            lim.core_max_ghz, budget_w);
        break;
    case WorkloadClass::Graphics: {
        // Cores stay at Pn; their share is held back and graphics gets the rest.
        double core_pn = compute_power_at(cfg, coef, lim.core_pn_ghz, lim.gfx_pn_ghz,
                                          uc, ug).core;
        double core_budget = std::max(lim.graphics_core_share * budget_w, core_pn);
        double gfx_budget = budget_w - core_budget;
        c.gfx_freq_ghz = highest_within(
            [&](double f) {
                return compute_power_at(cfg, coef, lim.core_pn_ghz, f, uc, ug).gfx;
            },
            lim.gfx_pn_ghz, lim.gfx_max_ghz, gfx_budget);
        break;
    }
    case WorkloadClass::BatteryLife:
        break;
    }
    c.power_w = total(c.core_freq_ghz, c.gfx_freq_ghz);
    return c;
}

double project_perf_boost(double saving_w, double ghz_per_watt,
                          double scalability, double f_base_ghz)
{
    if (!(scalability >= 0.0 && scalability <= 1.0))
        throw InvariantError("scalability must be in [0,1]");
    if (!(f_base_ghz > 0.0))
        return 0.0;
    double delta_f = saving_w * ghz_per_watt;
    return scalability * delta_f / f_base_ghz;
}

Governor::Governor(const SocConfig &cfg, ThresholdSet thr,
                   std::vector<OperatingPoint> ladder)
    : last_level_(ladder.size()), min_dwell_(std::max(1, cfg.governor.min_dwell_intervals))
{
    if (ladder.empty())
        throw ConfigError("governor needs at least one operating point");
    check_thresholds(thr);
    const OperatingPoint &ref = ladder.back();
    for (const auto &op : ladder)
        per_level_.push_back(thresholds_at(thr, cfg, op, ref));
}

Decision Governor::step(const PerfCounterSample &avg, double static_bw,
                        std::size_t installed)
{
    installed = std::min(installed, per_level_.size() - 1);
    if (installed != last_level_) {
        last_level_ = installed;
        dwell_ = 0;
    }
    ++dwell_;
    Decision d = predict(avg, static_bw, per_level_[installed], installed,
                         per_level_.size());
    if (dwell_ < min_dwell_)
        d.target_level = installed;
    return d;
}

} // namespace sysscale
