#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sysscale/json_io.hpp"
#include "sysscale/power.hpp"
#include "sysscale/soc.hpp"
#include "sysscale/telemetry.hpp"
#include "sysscale/workload.hpp"

namespace sysscale {

struct ThresholdSet {
    double static_bw_thr = 0.0;  ///< GB/s
    double gfx_thr = 0.0;
    double core_thr = 0.0;
    double lat_thr = 0.0;
    double io_thr = 0.0;
    double degradation_bound = 0.01;

    bool operator==(const ThresholdSet &) const = default;
};

void to_json(json &j, const ThresholdSet &t);
void from_json(const json &j, ThresholdSet &t);

/// Throws ParseError for a malformed file and InvariantError for negative
/// thresholds or a bound outside (0,1).
ThresholdSet load_thresholds(const std::string &path);
void check_thresholds(const ThresholdSet &t);

enum class Condition { Static, Gfx, Core, Latency, Io };

const char *to_string(Condition c);

struct Decision {
    std::size_t target_level = 0;
    std::vector<Condition> triggering;  ///< empty means step down

    bool operator==(const Decision &) const = default;
};

/// One calibration run: counters observed at the high point and the
/// degradation the run suffers at the low point.
struct CalibrationRun {
    std::string name;
    PerfCounterSample counters;
    double degradation = 0.0;
};

/// STATIC_BW_THR: peak bandwidth of the lowest level less the guard band.
double static_bw_threshold(const SocConfig &cfg);

/// threshold = mean + stddev of each counter over the runs whose
/// degradation is below `bound`. Throws CalibrationError naming the
/// counter when no run qualifies.
ThresholdSet calibrate_thresholds(std::span<const CalibrationRun> runs,
                                  double bound, double static_bw_thr,
                                  bool population_sigma = true);

/// Moves one level up if any condition holds, one level down if none does,
/// clamped to [0, level_count). Comparisons are strict.
Decision predict(const PerfCounterSample &avg, double static_bw,
                 const ThresholdSet &thr, std::size_t current_level,
                 std::size_t level_count = 2);

/// Thresholds for counters observed at `observed` instead of `reference`.
/// Occupancy, stalls and RPQ occupancy read higher at a slower point for
/// the same demand; scaling the thresholds by the same factor keeps the
/// decision for a given demand independent of where it was measured.
ThresholdSet thresholds_at(const ThresholdSet &thr, const SocConfig &cfg,
                           const OperatingPoint &observed,
                           const OperatingPoint &reference);

struct IoMemPower {
    double io_w = 0.0;
    double memory_w = 0.0;

    double total() const { return io_w + memory_w; }
};

struct DomainBudgets {
    double compute_w = 0.0;
    double io_w = 0.0;
    double memory_w = 0.0;

    double total() const { return compute_w + (io_w + memory_w); }
};

/// Worst-case (full-bandwidth) IO and memory power at `op`, the amount the
/// budget manager reserves for those domains.
IoMemPower reserved_io_mem_power(const SocConfig &cfg, const OperatingPoint &op,
                                 const PowerCoefficients &coef,
                                 bool mrc_optimized);

/// Compute gets whatever the IO and memory domains do not reserve at the
/// decided level; total() equals tdp exactly. Throws InfeasibleTdpError if
/// the reservation exceeds tdp.
DomainBudgets redistribute_budget(double tdp, const IoMemPower &high,
                                  const IoMemPower &low,
                                  const Decision &decision,
                                  std::size_t high_level);

DomainBudgets budgets_for(double tdp, const IoMemPower &reserved);

struct PStateChoice {
    double core_freq_ghz = 0.0;
    double gfx_freq_ghz = 0.0;
    double duty_cycle = 1.0;
    double power_w = 0.0;

    double effective_core_ghz() const { return duty_cycle * core_freq_ghz; }
    double effective_gfx_ghz() const { return duty_cycle * gfx_freq_ghz; }
};

/// Compute power at the given frequencies, voltages read off the compute
/// rails' V/f curves.
ComputePower compute_power_at(const SocConfig &cfg, const PowerCoefficients &coef,
                              double core_ghz, double gfx_ghz,
                              double core_util, double gfx_util);

/// Highest frequencies whose compute power fits `budget`. CPU workloads
/// give the budget to the cores (graphics held at Pn); graphics workloads
/// keep the cores at Pn, reserve their share and give the rest to
/// graphics; battery-life
/// workloads stay at Pn. Below Pn power the domain duty-cycles.
PStateChoice select_compute_pstate(const SocConfig &cfg,
                                   const PowerCoefficients &coef,
                                   double budget_w, const ActivitySample &act,
                                   WorkloadClass cls);

/// Performance gain from spending `saving_w` on compute:
/// scalability * (saving_w * ghz_per_watt) / f_base.
double project_perf_boost(double saving_w, double ghz_per_watt,
                          double scalability, double f_base_ghz);

/// Interval-by-interval decision state with a minimum dwell time.
class Governor {
  public:
    /// `ladder` lists the points the governor moves between, slowest
    /// first; thresholds are taken as calibrated at the last one.
    Governor(const SocConfig &cfg, ThresholdSet thr,
             std::vector<OperatingPoint> ladder);

    /// Feeds one window averaged at `installed` (an index into the
    /// ladder); returns the level to run next.
    Decision step(const PerfCounterSample &avg, double static_bw,
                  std::size_t installed);

    const ThresholdSet &thresholds(std::size_t level) const
    {
        return per_level_.at(level);
    }

  private:
    std::vector<ThresholdSet> per_level_;
    std::size_t last_level_;
    int min_dwell_;
    int dwell_ = 0;
};

} // namespace sysscale
