#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sysscale/params.hpp"

namespace sysscale {

enum class DomainKind { Compute, Io, Memory };

/// Clock sources a domain can be driven by.
enum class ClockId { Dram, MemoryController, IoInterconnect, Core, Gfx };

const char *to_string(DomainKind kind);
const char *to_string(ClockId clock);
DomainKind domain_kind_from_string(const std::string &s);
ClockId clock_from_string(const std::string &s);

inline constexpr const char *kRailSa = "V_SA";
inline constexpr const char *kRailVddq = "VDDQ";
inline constexpr const char *kRailIo = "V_IO";

struct VoltageRail {
    std::string name;
    double v_min = 0.0;
    double v_nominal = 0.0;
    double slew_rate_mv_per_us = 50.0;
};

struct DomainDesc {
    std::string name;
    DomainKind kind = DomainKind::Io;
    std::string rail;
    ClockId clock = ClockId::IoInterconnect;
};

/// Piecewise-linear voltage-vs-frequency curve. Queries outside the knot
/// range clamp to the end knots.
class VfCurve {
  public:
    VfCurve() = default;
    explicit VfCurve(std::vector<std::pair<double, double>> knots)
        : knots_(std::move(knots)) {}

    double voltage_at(double freq_ghz) const;
    const std::vector<std::pair<double, double>> &knots() const
    {
        return knots_;
    }
    bool empty() const { return knots_.empty(); }

  private:
    std::vector<std::pair<double, double>> knots_;
};

/// Trained DRAM-interface register values for one DRAM frequency. The
/// payload is opaque; only its size matters to the model.
struct MrcRegisterSet {
    std::string id;
    double optimized_for_ghz = 0.0;
    std::vector<std::uint8_t> payload;
};

class MrcBank {
  public:
    MrcBank() = default;
    explicit MrcBank(std::vector<MrcRegisterSet> entries,
                     std::size_t sram_budget_bytes = 512)
        : entries_(std::move(entries)), sram_budget_bytes_(sram_budget_bytes)
    {
    }

    const std::vector<MrcRegisterSet> &entries() const { return entries_; }
    std::size_t sram_budget_bytes() const { return sram_budget_bytes_; }

    /// Entry whose optimized frequency is closest to `dram_freq_ghz`;
    /// nullptr for an empty bank.
    const MrcRegisterSet *nearest(double dram_freq_ghz) const;

    MrcBank without(double dram_freq_ghz) const;

  private:
    std::vector<MrcRegisterSet> entries_;
    std::size_t sram_budget_bytes_ = 512;
};

/// Frequencies are compared with this absolute tolerance (GHz).
inline constexpr double kFreqEpsilon = 1e-9;

std::optional<MrcRegisterSet> mrc_lookup(const MrcBank &bank,
                                         double dram_freq_ghz);
std::size_t mrc_sram_footprint(const MrcBank &bank);

/// One rung of the operating ladder as written in the config. Rail
/// voltages left unset are read off the V/f curves.
struct LevelSpec {
    double dram_freq_ghz = 0.0;
    double io_interconnect_freq_ghz = 0.0;
    double core_freq_ghz = 0.0;
    double gfx_freq_ghz = 0.0;
    std::map<std::string, double> rail_voltages;
};

struct OperatingPoint {
    std::size_t level = 0;
    double dram_freq_ghz = 0.0;
    double mc_freq_ghz = 0.0;
    double io_interconnect_freq_ghz = 0.0;
    double core_freq_ghz = 0.0;
    double gfx_freq_ghz = 0.0;
    std::map<std::string, double> rail_voltages;
    std::optional<std::string> mrc_set;

    double clock(ClockId id) const;
    /// Voltage of `rail`; throws LookupError for an unknown rail.
    double voltage(const std::string &rail) const;

    bool operator==(const OperatingPoint &) const = default;
};

struct SocConfig {
    std::string name = "soc";
    double tdp_watts = 4.5;
    std::vector<VoltageRail> rails;
    std::vector<DomainDesc> domains;
    std::vector<double> dram_freq_bins_ghz;
    std::map<std::string, VfCurve> vf_curves;
    PowerCoefficients power_coefficients;
    double evaluation_interval_ms = 30.0;
    double sample_period_ms = 1.0;
    double mc_freq_ratio = 0.5;
    double peak_bw_gbps_per_ghz = 16.0;
    double io_capacity_gbps_per_ghz = 20.0;
    std::vector<LevelSpec> levels;
    MrcBank mrc_bank;
    ComputeLimits compute;
    LatencyModel latency;
    CounterModel counters;
    TransitionLatencies transition;
    GovernorParams governor;
    MrcPenalty mrc_penalty;
    StaticDemandTable static_demand_table;

    const VoltageRail *find_rail(const std::string &name) const;
    std::size_t level_count() const { return levels.size(); }
    std::size_t top_level() const
    {
        return levels.empty() ? 0 : levels.size() - 1;
    }
};

struct Violation {
    std::string path;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_config(const SocConfig &cfg);

/// Resolves ladder rung `level` (0 = slowest) into a full operating point.
OperatingPoint operating_point(const SocConfig &cfg, std::size_t level);

/// Minimum legal voltage of `rail` given the clocks in `op`: the V/f curve
/// at the fastest clock on the rail, floored at the rail's v_min.
double rail_requirement(const SocConfig &cfg, const std::string &rail,
                        const OperatingPoint &op);

double peak_bandwidth_gbps(const SocConfig &cfg, const OperatingPoint &op);
double io_capacity_gbps(const SocConfig &cfg, const OperatingPoint &op);

/// Rails feeding the IO and memory domains (the ones the transition flow
/// adjusts).
std::vector<std::string> uncore_rails(const SocConfig &cfg);

} // namespace sysscale
