#include "sysscale/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <random>

#include "sysscale/error.hpp"
#include "sysscale/json_io.hpp"

namespace sysscale {

namespace fs = std::filesystem;

namespace {

/// Runs body(i) for i in [0, n) across OpenMP threads. The first exception
/// thrown by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body body)
{
    std::exception_ptr failure;
    std::mutex failure_mu;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
}

std::pair<OperatingPoint, OperatingPoint> ladder_ends(const SocConfig &cfg)
{
    if (cfg.levels.empty())
        throw ConfigError("no operating levels configured");
    return {operating_point(cfg, cfg.top_level()), operating_point(cfg, 0)};
}

WorkloadTrace latent_trace(const CorpusSpec &spec, std::size_t index)
{
    std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool heavy = unit(rng) < spec.heavy_share;
    std::lognormal_distribution<double> intensity(
        std::log(heavy ? spec.heavy_median : spec.intensity_median),
        heavy ? spec.heavy_sigma : spec.intensity_sigma);

    double m = intensity(rng);
    bool graphics = unit(rng) < spec.graphics_share;
    double scal = 0.3 + 0.6 * unit(rng);

    SliceStats mean;
    mean.frac_lat = std::min(0.45, spec.lat_base + spec.lat_per_m * m);
    mean.frac_bw = std::min(0.45, spec.bw_base + spec.bw_per_m * m);
    mean.frac_compute = 1.0 - mean.frac_lat - mean.frac_bw;
    mean.core_bw = spec.core_bw_base + spec.core_bw_per_m * m;
    mean.gfx_bw = spec.gfx_bw_base + spec.gfx_bw_per_m * m;
    mean.io_bw = spec.io_bw_base + spec.io_bw_per_m * m;
    mean.scalability = scal;

    double j = spec.slice_jitter;
    SliceStats sd;
    sd.frac_lat = j * mean.frac_lat;
    sd.frac_bw = j * mean.frac_bw;
    sd.core_bw = j * mean.core_bw;
    sd.gfx_bw = j * mean.gfx_bw;
    sd.io_bw = j * mean.io_bw;

    PhaseProfile p;
    p.name = spec.name + "-" + std::to_string(index);
    p.cls = graphics ? WorkloadClass::Graphics : WorkloadClass::Cpu;
    p.slice_ms = spec.slice_ms;
    p.phases.push_back({spec.slices, PowerState::C0, mean, sd});
    return synthesize(p, rng());
}

} // namespace

CorpusSpec load_corpus_spec(const std::string &path)
{
    json j = read_json_file(path);
    CorpusSpec s;
    try {
        s.name = j.value("name", s.name);
        s.kind = j.value("kind", s.kind);
        s.count = j.value("count", s.count);
        s.seed = j.value("seed", s.seed);
        s.slices = j.value("slices", s.slices);
        s.slice_ms = j.value("slice_ms", s.slice_ms);
        s.intensity_median = j.value("intensity_median", s.intensity_median);
        s.intensity_sigma = j.value("intensity_sigma", s.intensity_sigma);
        s.heavy_share = j.value("heavy_share", s.heavy_share);
        s.heavy_median = j.value("heavy_median", s.heavy_median);
        s.heavy_sigma = j.value("heavy_sigma", s.heavy_sigma);
        s.graphics_share = j.value("graphics_share", s.graphics_share);
        s.lat_base = j.value("lat_base", s.lat_base);
        s.lat_per_m = j.value("lat_per_m", s.lat_per_m);
        s.bw_base = j.value("bw_base", s.bw_base);
        s.bw_per_m = j.value("bw_per_m", s.bw_per_m);
        s.core_bw_base = j.value("core_bw_base", s.core_bw_base);
        s.core_bw_per_m = j.value("core_bw_per_m", s.core_bw_per_m);
        s.gfx_bw_base = j.value("gfx_bw_base", s.gfx_bw_base);
        s.gfx_bw_per_m = j.value("gfx_bw_per_m", s.gfx_bw_per_m);
        s.io_bw_base = j.value("io_bw_base", s.io_bw_base);
        s.io_bw_per_m = j.value("io_bw_per_m", s.io_bw_per_m);
        s.slice_jitter = j.value("slice_jitter", s.slice_jitter);
        if (j.contains("profile"))
            s.profile = (fs::path(path).parent_path() / j.at("profile").get<std::string>())
                            .string();
    } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
    if (s.kind != "latent" && s.kind != "profile")
        throw ParseError(path + ": unknown corpus kind '" + s.kind + "'");
    if (s.kind == "profile" && s.profile.empty())
        throw ParseError(path + ": profile corpus without a profile");
    return s;
}

std::vector<WorkloadTrace> generate_corpus(const CorpusSpec &spec)
{
    std::vector<WorkloadTrace> out(spec.count);
    if (spec.kind == "profile") {
        PhaseProfile p = load_profile(spec.profile);
        for (std::size_t i = 0; i < spec.count; ++i) {
            out[i] = synthesize(p, spec.seed + i);
            out[i].name = p.name + "-" + std::to_string(i);
        }
        return out;
    }
    parallel_for(spec.count, [&](std::size_t i) { out[i] = latent_trace(spec, i); });
    return out;
}

std::vector<WorkloadTrace> load_corpus(const std::string &dir)
{
    if (!fs::is_directory(dir))
        throw ParseError("corpus directory '" + dir + "' not found");
    std::vector<WorkloadTrace> out;
    fs::path spec = fs::path(dir) / "corpus.json";
    if (fs::exists(spec))
        out = generate_corpus(load_corpus_spec(spec.string()));
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir)) {
        auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".csv" || ext == ".trace"))
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto &f : files)
        out.push_back(load_trace(f.string()));
    if (out.empty())
        throw CalibrationError("corpus '" + dir + "' has no traces");
    return out;
}

TraceEvaluation evaluate_trace(const SocConfig &cfg, const WorkloadTrace &trace,
                               const OperatingPoint &high, const OperatingPoint &low)
{
    TraceEvaluation ev;
    ev.name = trace.name;
    std::vector<PerfCounterSample> samples;
    double t = 0.0;
    for (const auto &s : trace.slices) {
        double end = t + s.duration_ms;
        // One sample per period starting inside this slice.
        double first = std::ceil(t / cfg.sample_period_ms - 1e-9) * cfg.sample_period_ms;
        for (double ts = first; ts < end - 1e-9; ts += cfg.sample_period_ms)
            samples.push_back(sample_counters(cfg, s, high, ts));
        if (dram_active(s.power_state))
            ev.static_bw_gbps = std::max(
                ev.static_bw_gbps, static_demand(s.peripheral_config, cfg.static_demand_table));
        t = end;
    }
    if (!samples.empty())
        ev.counters = average_window(samples);
    ev.degradation = trace_degradation(cfg, trace, high, low);
    return ev;
}

std::vector<TraceEvaluation> evaluate_corpus(const SocConfig &cfg,
                                             std::span<const WorkloadTrace> corpus)
{
    auto [high, low] = ladder_ends(cfg);
    std::vector<TraceEvaluation> out(corpus.size());
    parallel_for(corpus.size(),
                 [&](std::size_t i) { out[i] = evaluate_trace(cfg, corpus[i], high, low); });
    return out;
}

std::vector<TraceEvaluation> evaluate_corpus_serial(const SocConfig &cfg,
                                                    std::span<const WorkloadTrace> corpus)
{
    auto [high, low] = ladder_ends(cfg);
    std::vector<TraceEvaluation> out;
    out.reserve(corpus.size());
    for (const auto &t : corpus)
        out.push_back(evaluate_trace(cfg, t, high, low));
    return out;
}

std::vector<CalibrationRun> calibration_runs(std::span<const TraceEvaluation> evals)
{
    std::vector<CalibrationRun> runs;
    runs.reserve(evals.size());
    for (const auto &e : evals)
        runs.push_back({e.name, e.counters, e.degradation});
    return runs;
}

ThresholdSet calibrate_from_corpus(const SocConfig &cfg,
                                   std::span<const WorkloadTrace> corpus, double bound)
{
    auto evals = evaluate_corpus(cfg, corpus);
    auto runs = calibration_runs(evals);
    return calibrate_thresholds(runs, bound, static_bw_threshold(cfg),
                                cfg.governor.population_sigma);
}

namespace {

void tally(Agreement &a, std::size_t governor, std::size_t oracle, std::size_t low_level)
{
    ++a.total;
    if (governor == oracle)
        ++a.agree;
    else if (governor == low_level)
        ++a.false_positives;
    else
        ++a.false_negatives;
}

std::size_t governor_level(const SocConfig &cfg, const ThresholdSet &thr,
                           const PerfCounterSample &c, double static_bw)
{
    return predict(c, static_bw, thr, cfg.top_level(), cfg.level_count()).target_level;
}

Agreement merge(std::span<const Agreement> parts)
{
    Agreement a;
    for (const auto &p : parts) {
        a.total += p.total;
        a.agree += p.agree;
        a.false_positives += p.false_positives;
        a.false_negatives += p.false_negatives;
    }
    return a;
}

} // namespace

Agreement oracle_agreement(const SocConfig &cfg, const ThresholdSet &thr,
                           std::span<const TraceEvaluation> evals)
{
    std::vector<Agreement> parts(evals.size());
    parallel_for(evals.size(), [&](std::size_t i) {
        const auto &e = evals[i];
        std::size_t oracle = e.degradation < thr.degradation_bound ? 0 : cfg.top_level();
        tally(parts[i], governor_level(cfg, thr, e.counters, e.static_bw_gbps), oracle, 0);
    });
    return merge(parts);
}

Agreement oracle_agreement_serial(const SocConfig &cfg, const ThresholdSet &thr,
                                  std::span<const TraceEvaluation> evals)
{
    Agreement a;
    for (const auto &e : evals) {
        std::size_t oracle = e.degradation < thr.degradation_bound ? 0 : cfg.top_level();
        tally(a, governor_level(cfg, thr, e.counters, e.static_bw_gbps), oracle, 0);
    }
    return a;
}

std::vector<TraceSlice> soundness_grid(double max_demand_gbps, std::size_t demand_steps,
                                       std::size_t fraction_steps)
{
    std::vector<TraceSlice> grid;
    double step = fraction_steps ? 1.0 / static_cast<double>(fraction_steps) : 1.0;
    for (std::size_t d = 0; d < demand_steps; ++d) {
        double demand = demand_steps > 1
                            ? max_demand_gbps * static_cast<double>(d) /
                                  static_cast<double>(demand_steps - 1)
                            : max_demand_gbps;
        for (std::size_t a = 0; a <= fraction_steps; ++a) {
            for (std::size_t b = 0; a + b <= fraction_steps; ++b) {
                for (int agent = 0; agent < 3; ++agent) {
                    TraceSlice s;
                    s.frac_mem_latency = static_cast<double>(a) * step;
                    s.frac_mem_bandwidth = static_cast<double>(b) * step;
                    s.frac_compute =
                        std::max(0.0, 1.0 - s.frac_mem_latency - s.frac_mem_bandwidth);
                    (agent == 0 ? s.core_bw_demand
                                : agent == 1 ? s.gfx_bw_demand : s.io_bw_demand) = demand;
                    grid.push_back(s);
                }
            }
        }
    }
    return grid;
}

namespace {

void grid_point(const SocConfig &cfg, const ThresholdSet &thr, const OperatingPoint &high,
                const OperatingPoint &low, const TraceSlice &s, Agreement &a)
{
    PerfCounterSample c = sample_counters(cfg, s, high);
    std::size_t oracle = oracle_decide(cfg, s, high, low, thr.degradation_bound);
    tally(a, governor_level(cfg, thr, c, 0.0), oracle, low.level);
}

} // namespace

Agreement grid_agreement(const SocConfig &cfg, const ThresholdSet &thr,
                         std::span<const TraceSlice> grid)
{
    auto [high, low] = ladder_ends(cfg);
    std::vector<Agreement> parts(grid.size());
    parallel_for(grid.size(),
                 [&](std::size_t i) { grid_point(cfg, thr, high, low, grid[i], parts[i]); });
    return merge(parts);
}

Agreement grid_agreement_serial(const SocConfig &cfg, const ThresholdSet &thr,
                                std::span<const TraceSlice> grid)
{
    auto [high, low] = ladder_ends(cfg);
    Agreement a;
    for (const auto &s : grid)
        grid_point(cfg, thr, high, low, s, a);
    return a;
}

namespace {

void summarize(TdpSweepRow &row)
{
    if (row.gains.empty())
        return;
    double sum = 0.0;
    for (double g : row.gains)
        sum += g;
    row.mean_gain = sum / static_cast<double>(row.gains.size());
    auto [lo, hi] = std::minmax_element(row.gains.begin(), row.gains.end());
    row.min_gain = *lo;
    row.max_gain = *hi;
}

void check_tdps(std::span<const double> tdps)
{
    for (std::size_t i = 0; i < tdps.size(); ++i) {
        if (!(tdps[i] > 0.0))
            throw ConfigError("TDP values must be positive");
        if (i > 0 && !(tdps[i] > tdps[i - 1]))
            throw ConfigError("TDP values must be ascending");
    }
}

} // namespace

std::vector<TdpSweepRow> tdp_sweep(std::span<const WorkloadTrace> corpus,
                                   const SocConfig &cfg,
                                   const std::optional<ThresholdSet> &thr,
                                   std::span<const double> tdps, Policy policy,
                                   const SimOptions &opts)
{
    check_tdps(tdps);
    std::vector<SocConfig> cfgs(tdps.size(), cfg);
    for (std::size_t t = 0; t < tdps.size(); ++t)
        cfgs[t].tdp_watts = tdps[t];
    SimOptions o = opts;
    o.record_intervals = false;

    std::vector<double> gains(tdps.size() * corpus.size());
    parallel_for(gains.size(), [&](std::size_t k) {
        std::size_t t = k / corpus.size();
        std::size_t i = k % corpus.size();
        gains[k] = simulate(corpus[i], policy, cfgs[t], thr, o).performance_ratio - 1.0;
    });

    std::vector<TdpSweepRow> rows(tdps.size());
    for (std::size_t t = 0; t < tdps.size(); ++t) {
        rows[t].tdp_watts = tdps[t];
        rows[t].gains.assign(gains.begin() + static_cast<long>(t * corpus.size()),
                             gains.begin() + static_cast<long>((t + 1) * corpus.size()));
        summarize(rows[t]);
    }
    return rows;
}

std::vector<TdpSweepRow> tdp_sweep_serial(std::span<const WorkloadTrace> corpus,
                                          const SocConfig &cfg,
                                          const std::optional<ThresholdSet> &thr,
                                          std::span<const double> tdps, Policy policy,
                                          const SimOptions &opts)
{
    check_tdps(tdps);
    SimOptions o = opts;
    o.record_intervals = false;
    std::vector<TdpSweepRow> rows;
    for (double tdp : tdps) {
        SocConfig c = cfg;
        c.tdp_watts = tdp;
        TdpSweepRow row;
        row.tdp_watts = tdp;
        for (const auto &trace : corpus)
            row.gains.push_back(simulate(trace, policy, c, thr, o).performance_ratio - 1.0);
        summarize(row);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace sysscale
