#include "sysscale/soc.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "sysscale/error.hpp"

namespace sysscale {

const char *to_string(DomainKind kind)
{
    switch (kind) {
    case DomainKind::Compute: return "compute";
    case DomainKind::Io: return "io";
    case DomainKind::Memory: return "memory";
    }
    return "?";
}

const char *to_string(ClockId clock)
{
    switch (clock) {
    case ClockId::Dram: return "dram";
    case ClockId::MemoryController: return "mc";
    case ClockId::IoInterconnect: return "io_interconnect";
    case ClockId::Core: return "core";
    case ClockId::Gfx: return "gfx";
    }
    return "?";
}

DomainKind domain_kind_from_string(const std::string &s)
{
    if (s == "compute")
        return DomainKind::Compute;
    if (s == "io")
        return DomainKind::Io;
    if (s == "memory")
        return DomainKind::Memory;
    throw ParseError("unknown domain kind '" + s + "'");
}

ClockId clock_from_string(const std::string &s)
{
    for (auto id : {ClockId::Dram, ClockId::MemoryController,
                    ClockId::IoInterconnect, ClockId::Core, ClockId::Gfx}) {
        if (s == to_string(id))
            return id;
    }
    throw ParseError("unknown clock '" + s + "'");
}

double VfCurve::voltage_at(double freq_ghz) const
{
    if (knots_.empty())
        return 0.0;
    if (freq_ghz <= knots_.front().first)
        return knots_.front().second;
    if (freq_ghz >= knots_.back().first)
        return knots_.back().second;
    for (std::size_t i = 1; i < knots_.size(); ++i) {
        const auto &[f1, v1] = knots_[i];
        if (freq_ghz > f1)
            continue;
        const auto &[f0, v0] = knots_[i - 1];
        if (freq_ghz == f1)
            return v1;
        return v0 + (v1 - v0) * (freq_ghz - f0) / (f1 - f0);
    }
    return knots_.back().second;
}

const MrcRegisterSet *MrcBank::nearest(double dram_freq_ghz) const
{
    const MrcRegisterSet *best = nullptr;
    for (const auto &e : entries_) {
        if (!best || std::abs(e.optimized_for_ghz - dram_freq_ghz) <
                         std::abs(best->optimized_for_ghz - dram_freq_ghz))
            best = &e;
    }
    return best;
}

MrcBank MrcBank::without(double dram_freq_ghz) const
{
    std::vector<MrcRegisterSet> kept;
    for (const auto &e : entries_) {
        if (std::abs(e.optimized_for_ghz - dram_freq_ghz) > kFreqEpsilon)
            kept.push_back(e);
    }
    return MrcBank(std::move(kept), sram_budget_bytes_);
}

std::optional<MrcRegisterSet> mrc_lookup(const MrcBank &bank,
                                         double dram_freq_ghz)
{
    for (const auto &e : bank.entries()) {
        if (std::abs(e.optimized_for_ghz - dram_freq_ghz) <= kFreqEpsilon)
            return e;
    }
    return std::nullopt;
}

std::size_t mrc_sram_footprint(const MrcBank &bank)
{
    std::size_t total = 0;
    for (const auto &e : bank.entries())
        total += e.payload.size();
    return total;
}

double OperatingPoint::clock(ClockId id) const
{
    switch (id) {
    case ClockId::Dram: return dram_freq_ghz;
    case ClockId::MemoryController: return mc_freq_ghz;
    case ClockId::IoInterconnect: return io_interconnect_freq_ghz;
    case ClockId::Core: return core_freq_ghz;
    case ClockId::Gfx: return gfx_freq_ghz;
    }
    return 0.0;
}

double OperatingPoint::voltage(const std::string &rail) const
{
    auto it = rail_voltages.find(rail);
    if (it == rail_voltages.end())
        throw LookupError("operating point has no rail '" + rail + "'");
    return it->second;
}

const VoltageRail *SocConfig::find_rail(const std::string &rail) const
{
    for (const auto &r : rails) {
        if (r.name == rail)
            return &r;
    }
    return nullptr;
}

namespace {

double fastest_clock_on_rail(const SocConfig &cfg, const std::string &rail,
                             const OperatingPoint &op)
{
    double fastest = 0.0;
    for (const auto &d : cfg.domains) {
        if (d.rail == rail)
            fastest = std::max(fastest, op.clock(d.clock));
    }
    return fastest;
}

/// Clock frequencies of a ladder rung before voltages are known.
OperatingPoint clocks_of(const SocConfig &cfg, const LevelSpec &spec,
                         std::size_t level)
{
    OperatingPoint op;
    op.level = level;
    op.dram_freq_ghz = spec.dram_freq_ghz;
    op.mc_freq_ghz = spec.dram_freq_ghz * cfg.mc_freq_ratio;
    op.io_interconnect_freq_ghz = spec.io_interconnect_freq_ghz;
    op.core_freq_ghz = spec.core_freq_ghz;
    op.gfx_freq_ghz = spec.gfx_freq_ghz;
    return op;
}

std::string indexed(const std::string &base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

} // namespace

double rail_requirement(const SocConfig &cfg, const std::string &rail,
                        const OperatingPoint &op)
{
    const VoltageRail *r = cfg.find_rail(rail);
    double floor = r ? r->v_min : 0.0;
    auto it = cfg.vf_curves.find(rail);
    if (it == cfg.vf_curves.end())
        return floor;
    return std::max(floor,
                    it->second.voltage_at(fastest_clock_on_rail(cfg, rail, op)));
}

double peak_bandwidth_gbps(const SocConfig &cfg, const OperatingPoint &op)
{
    return cfg.peak_bw_gbps_per_ghz * op.dram_freq_ghz;
}

double io_capacity_gbps(const SocConfig &cfg, const OperatingPoint &op)
{
    return cfg.io_capacity_gbps_per_ghz * op.io_interconnect_freq_ghz;
}

std::vector<std::string> uncore_rails(const SocConfig &cfg)
{
    std::vector<std::string> out;
    for (const auto &r : cfg.rails) {
        bool uncore = false;
        bool compute = false;
        for (const auto &d : cfg.domains) {
            if (d.rail != r.name)
                continue;
            (d.kind == DomainKind::Compute ? compute : uncore) = true;
        }
        if (uncore && !compute)
            out.push_back(r.name);
    }
    return out;
}

OperatingPoint operating_point(const SocConfig &cfg, std::size_t level)
{
    if (level >= cfg.levels.size()) {
        throw OutOfRangeError("level " + std::to_string(level) +
                              " out of range (" +
                              std::to_string(cfg.levels.size()) +
                              " levels configured)");
    }
    const LevelSpec &spec = cfg.levels[level];
    OperatingPoint op = clocks_of(cfg, spec, level);
    for (const auto &r : cfg.rails) {
        auto explicit_v = spec.rail_voltages.find(r.name);
        op.rail_voltages[r.name] = explicit_v != spec.rail_voltages.end()
                                       ? explicit_v->second
                                       : rail_requirement(cfg, r.name, op);
    }
    if (auto set = mrc_lookup(cfg.mrc_bank, op.dram_freq_ghz))
        op.mrc_set = set->id;
    return op;
}

ValidationReport validate_config(const SocConfig &cfg)
{
    ValidationReport report;
    auto fail = [&](std::string path, std::string msg) {
        report.violations.push_back({std::move(path), std::move(msg)});
    };

    if (!(cfg.tdp_watts > 0.0))
        fail("tdp_watts", "must be > 0");
    if (!(cfg.evaluation_interval_ms > 0.0))
        fail("evaluation_interval_ms", "must be > 0");
    if (!(cfg.sample_period_ms > 0.0) ||
        cfg.sample_period_ms > cfg.evaluation_interval_ms)
        fail("sample_period_ms", "must be > 0 and <= evaluation_interval_ms");
    if (!(cfg.mc_freq_ratio > 0.0))
        fail("mc_freq_ratio", "must be > 0");
    if (!(cfg.peak_bw_gbps_per_ghz > 0.0))
        fail("peak_bw_gbps_per_ghz", "must be > 0");
    if (!(cfg.io_capacity_gbps_per_ghz > 0.0))
        fail("io_capacity_gbps_per_ghz", "must be > 0");

    for (std::size_t i = 0; i < cfg.dram_freq_bins_ghz.size(); ++i) {
        double f = cfg.dram_freq_bins_ghz[i];
        if (!(f > 0.0))
            fail(indexed("dram_freq_bins_ghz", i), "must be > 0");
        else if (i > 0 && !(f > cfg.dram_freq_bins_ghz[i - 1]))
            fail(indexed("dram_freq_bins_ghz", i), "bins must be strictly increasing");
    }
    if (cfg.dram_freq_bins_ghz.empty())
        fail("dram_freq_bins_ghz", "at least one bin required");

    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg.rails.size(); ++i) {
        const auto &r = cfg.rails[i];
        std::string path = indexed("rails", i);
        if (!seen.insert(r.name).second)
            fail(path + ".name", "duplicate rail '" + r.name + "'");
        if (!(r.v_min > 0.0) || r.v_min > r.v_nominal)
            fail(path + ".v_min", "need 0 < v_min <= v_nominal");
        if (!(r.slew_rate_mv_per_us > 0.0))
            fail(path + ".slew_rate_mv_per_us", "must be > 0");
    }
    for (const char *required : {kRailSa, kRailVddq, kRailIo}) {
        if (!cfg.find_rail(required))
            fail("rails", std::string("missing required rail ") + required);
    }
    bool has_compute_rail = false;
    for (std::size_t i = 0; i < cfg.domains.size(); ++i) {
        const auto &d = cfg.domains[i];
        if (!cfg.find_rail(d.rail))
            fail(indexed("domains", i) + ".rail", "unknown rail '" + d.rail + "'");
        else if (d.kind == DomainKind::Compute)
            has_compute_rail = true;
    }
    if (!has_compute_rail)
        fail("rails", "no rail feeds a compute domain");

    for (const auto &[rail, curve] : cfg.vf_curves) {
        std::string path = "vf_curves." + rail;
        const VoltageRail *r = cfg.find_rail(rail);
        if (!r) {
            fail(path, "curve for unknown rail");
            continue;
        }
        if (curve.empty())
            fail(path, "curve has no knots");
        const auto &k = curve.knots();
        for (std::size_t j = 0; j < k.size(); ++j) {
            std::string kp = indexed(path, j);
            if (k[j].second < r->v_min)
                fail(kp, "voltage below rail v_min");
            if (j > 0 && !(k[j].first > k[j - 1].first))
                fail(kp, "knot frequencies must increase");
            if (j > 0 && k[j].second < k[j - 1].second)
                fail(kp, "curve must be non-decreasing in frequency");
        }
    }

    const auto &c = cfg.power_coefficients;
    const std::pair<const char *, double> coefs[] = {
        {"k_bg", c.k_bg}, {"p_refresh", c.p_refresh}, {"e_array", c.e_array},
        {"k_term", c.k_term}, {"k_io_ddr", c.k_io_ddr},
        {"k_mc_dyn", c.k_mc_dyn}, {"k_mc_static", c.k_mc_static},
        {"k_ic_dyn", c.k_ic_dyn}, {"k_core_dyn", c.k_core_dyn},
        {"k_gfx_dyn", c.k_gfx_dyn}, {"k_core_leak", c.k_core_leak},
        {"k_gfx_leak", c.k_gfx_leak},
        {"temperature_factor", c.temperature_factor}};
    for (const auto &[name, value] : coefs) {
        if (!(value >= 0.0))
            fail(std::string("power_coefficients.") + name, "must be >= 0");
    }

    if (cfg.levels.empty())
        fail("levels", "at least one operating level required");
    for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
        const auto &spec = cfg.levels[i];
        std::string path = indexed("levels", i);
        bool in_bins = std::any_of(
            cfg.dram_freq_bins_ghz.begin(), cfg.dram_freq_bins_ghz.end(),
            [&](double b) { return std::abs(b - spec.dram_freq_ghz) <= kFreqEpsilon; });
        if (!in_bins)
            fail(path + ".dram_freq_ghz", "not one of dram_freq_bins_ghz");
        if (i > 0 && spec.dram_freq_ghz < cfg.levels[i - 1].dram_freq_ghz)
            fail(path + ".dram_freq_ghz", "ladder must be monotone in dram frequency");
        if (!(spec.io_interconnect_freq_ghz > 0.0))
            fail(path + ".io_interconnect_freq_ghz", "must be > 0");

        OperatingPoint op = clocks_of(cfg, spec, i);
        for (const auto &[rail, volts] : spec.rail_voltages) {
            std::string vp = path + ".rail_voltages." + rail;
            if (!cfg.find_rail(rail)) {
                fail(vp, "unknown rail");
                continue;
            }
            double need = rail_requirement(cfg, rail, op);
            if (volts < need) {
                std::ostringstream msg;
                msg << volts << " V below requirement " << need << " V";
                fail(vp, msg.str());
            }
        }
    }

    std::size_t footprint = mrc_sram_footprint(cfg.mrc_bank);
    if (footprint > cfg.mrc_bank.sram_budget_bytes()) {
        fail("mrc.entries", "register sets need " + std::to_string(footprint) +
                                " bytes, SRAM budget is " +
                                std::to_string(cfg.mrc_bank.sram_budget_bytes()));
    }

    if (!(cfg.governor.degradation_bound > 0.0 &&
          cfg.governor.degradation_bound < 1.0))
        fail("governor.degradation_bound", "must lie in (0, 1)");
    for (std::size_t i = 0; i < cfg.static_demand_table.size(); ++i) {
        if (!(cfg.static_demand_table[i].gbps >= 0.0))
            fail(indexed("static_demand_table", i) + ".gbps", "must be >= 0");
    }
    return report;
}

} // namespace sysscale
