#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sysscale/governor.hpp"
#include "sysscale/sim.hpp"
#include "sysscale/workload.hpp"

namespace sysscale {

/// Synthetic corpus description. "latent" corpora draw one memory
/// intensity m per trace from a two-cluster lognormal mixture (light
/// traces plus a memory-bound share) and derive the bottleneck
/// fractions and bandwidth demands from it, so that the counters and the
/// slowdown at the low point rise together. "profile" corpora synthesize
/// `count` traces from one phase profile with consecutive seeds.
struct CorpusSpec {
    std::string name = "corpus";
    std::string kind = "latent";
    std::size_t count = 500;
    std::uint64_t seed = 1;
    std::size_t slices = 60;
    double slice_ms = 1.0;

    double intensity_median = 1.0;
    double intensity_sigma = 1.5;
    double heavy_share = 0.3;       ///< memory-bound cluster
    double heavy_median = 300.0;
    double heavy_sigma = 0.5;
    double graphics_share = 0.0;

    double lat_base = 0.012;
    double lat_per_m = 0.0004;
    double bw_base = 0.02;
    double bw_per_m = 0.001;
    double core_bw_base = 1.5;
    double core_bw_per_m = 0.12;
    double gfx_bw_base = 0.1;
    double gfx_bw_per_m = 0.01;
    double io_bw_base = 0.4;
    double io_bw_per_m = 0.02;
    double slice_jitter = 0.05;   ///< relative per-slice stddev

    std::string profile;          ///< "profile" corpora, relative to the spec
};

CorpusSpec load_corpus_spec(const std::string &path);

/// Deterministic in (spec); trace i depends only on (spec.seed, i).
std::vector<WorkloadTrace> generate_corpus(const CorpusSpec &spec);

/// Traces of a corpus directory: the generated corpus of `corpus.json`
/// when present, then every *.csv / *.trace file, in name order.
std::vector<WorkloadTrace> load_corpus(const std::string &dir);

/// Counters averaged over a trace at the high point and its slowdown at
/// the low point.
struct TraceEvaluation {
    std::string name;
    PerfCounterSample counters;
    double static_bw_gbps = 0.0;
    double degradation = 0.0;
};

TraceEvaluation evaluate_trace(const SocConfig &cfg, const WorkloadTrace &trace,
                               const OperatingPoint &high, const OperatingPoint &low);

/// OpenMP-parallel over traces; the _serial variant is the reference.
std::vector<TraceEvaluation> evaluate_corpus(const SocConfig &cfg,
                                             std::span<const WorkloadTrace> corpus);
std::vector<TraceEvaluation> evaluate_corpus_serial(const SocConfig &cfg,
                                                    std::span<const WorkloadTrace> corpus);

std::vector<CalibrationRun> calibration_runs(std::span<const TraceEvaluation> evals);

/// Thresholds from a corpus with the config's bound or `bound`.
ThresholdSet calibrate_from_corpus(const SocConfig &cfg,
                                   std::span<const WorkloadTrace> corpus, double bound);

struct Agreement {
    std::size_t total = 0;
    std::size_t agree = 0;
    std::size_t false_positives = 0;   ///< governor low, oracle high
    std::size_t false_negatives = 0;   ///< governor high, oracle low

    double accuracy() const
    {
        return total ? static_cast<double>(agree) / static_cast<double>(total) : 1.0;
    }
};

/// Governor decision from the high point against the oracle label.
Agreement oracle_agreement(const SocConfig &cfg, const ThresholdSet &thr,
                           std::span<const TraceEvaluation> evals);
Agreement oracle_agreement_serial(const SocConfig &cfg, const ThresholdSet &thr,
                                  std::span<const TraceEvaluation> evals);

/// Single-slice, single-agent traces over a demand x bottleneck-fraction
/// grid. `demand_steps` * C(fraction_steps + 2, 2) * 3 points.
std::vector<TraceSlice> soundness_grid(double max_demand_gbps, std::size_t demand_steps,
                                       std::size_t fraction_steps);

Agreement grid_agreement(const SocConfig &cfg, const ThresholdSet &thr,
                         std::span<const TraceSlice> grid);
Agreement grid_agreement_serial(const SocConfig &cfg, const ThresholdSet &thr,
                                std::span<const TraceSlice> grid);

struct TdpSweepRow {
    double tdp_watts = 0.0;
    double mean_gain = 0.0;
    double min_gain = 0.0;
    double max_gain = 0.0;
    std::vector<double> gains;   ///< performance_ratio - 1, per trace
};

/// Runs `policy` on every trace at every TDP; parallel over (TDP, trace).
std::vector<TdpSweepRow> tdp_sweep(std::span<const WorkloadTrace> corpus,
                                   const SocConfig &cfg,
                                   const std::optional<ThresholdSet> &thr,
                                   std::span<const double> tdps,
                                   Policy policy = Policy::SysScale,
                                   const SimOptions &opts = {});
std::vector<TdpSweepRow> tdp_sweep_serial(std::span<const WorkloadTrace> corpus,
                                          const SocConfig &cfg,
                                          const std::optional<ThresholdSet> &thr,
                                          std::span<const double> tdps,
                                          Policy policy = Policy::SysScale,
                                          const SimOptions &opts = {});

} // namespace sysscale
