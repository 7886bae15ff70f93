#include "sysscale/calib.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "sysscale/error.hpp"
#include "sysscale/json_io.hpp"
#include "sysscale/power.hpp"
#include "sysscale/sim.hpp"

namespace sysscale {

namespace fs = std::filesystem;

const char *to_string(AnchorKind k)
{
    switch (k) {
    case AnchorKind::SocPowerReduction: return "soc_power_reduction";
    case AnchorKind::McDynamicRatio: return "mc_dynamic_ratio";
    case AnchorKind::MrcPowerRatio: return "mrc_power_ratio";
    }
    return "?";
}

AnchorKind anchor_kind_from_string(const std::string &s)
{
    for (auto k : {AnchorKind::SocPowerReduction, AnchorKind::McDynamicRatio,
                   AnchorKind::MrcPowerRatio}) {
        if (s == to_string(k))
            return k;
    }
    throw ParseError("unknown anchor kind '" + s + "'");
}

CalibrationTargets load_targets(const std::string &path)
{
    json j = read_json_file(path);
    CalibrationTargets t;
    try {
        t.free_coefficients =
            j.at("free_coefficients").get<std::vector<std::string>>();
        if (j.contains("scale_range")) {
            auto r = j.at("scale_range").get<std::vector<double>>();
            if (r.size() != 2)
                throw ParseError("scale_range needs two values");
            t.scale_min = r[0];
            t.scale_max = r[1];
        }
        for (const auto &a : j.at("anchors")) {
            Anchor an;
            an.name = a.at("name").get<std::string>();
            an.kind = anchor_kind_from_string(a.at("kind").get<std::string>());
            an.target = a.at("target").get<double>();
            an.tolerance = a.value("tolerance", an.tolerance);
            if (a.contains("profile")) {
                auto p = fs::path(path).parent_path() / a.at("profile").get<std::string>();
                an.trace = synthesize(load_profile(p.string()), a.value("seed", 0ULL));
            } else if (a.contains("trace")) {
                auto p = fs::path(path).parent_path() / a.at("trace").get<std::string>();
                an.trace = load_trace(p.string());
            } else if (an.kind == AnchorKind::SocPowerReduction) {
                throw ParseError("anchor '" + an.name + "' needs a profile or trace");
            }
            t.anchors.push_back(std::move(an));
        }
    } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
    if (t.anchors.empty())
        throw ParseError(path + ": no anchors");
    if (!(t.scale_min > 0.0 && t.scale_min < t.scale_max))
        throw ParseError(path + ": scale_range must be positive and ascending");
    return t;
}

PowerCoefficients scale_coefficients(const PowerCoefficients &c,
                                     const std::vector<std::string> &names,
                                     double s)
{
    json j = c;
    for (const auto &n : names) {
        if (!j.contains(n) || n == "temperature_factor")
            throw LookupError("unknown power coefficient '" + n + "'");
        j[n] = j[n].get<double>() * s;
    }
    return j.get<PowerCoefficients>();
}

double evaluate_anchor(const Anchor &a, const SocConfig &cfg)
{
    const OperatingPoint hi = operating_point(cfg, cfg.levels.size() - 1);
    const OperatingPoint lo = operating_point(cfg, 0);
    const PowerCoefficients &k = cfg.power_coefficients;
    switch (a.kind) {
    case AnchorKind::SocPowerReduction: {
        // Fixed-clock setup: the TDP plays no part.
        SocConfig fixed = cfg;
        fixed.tdp_watts = 1e6;
        SimOptions o;
        o.pin_compute = true;
        o.record_intervals = false;
        auto base = simulate(a.trace, Policy::Baseline, fixed, std::nullopt, o);
        auto md = simulate(a.trace, Policy::MdDvfs, fixed, std::nullopt, o);
        if (!(base.avg_power_w > 0.0))
            throw FitError("anchor '" + a.name + "': baseline power is zero");
        return 1.0 - md.avg_power_w / base.avg_power_w;
    }
    case AnchorKind::McDynamicRatio: {
        auto dyn = [&](const OperatingPoint &op) {
            double v = op.voltage(kRailSa);
            return k.k_mc_dyn * v * v * op.mc_freq_ghz;
        };
        if (!(dyn(hi) > 0.0))
            throw FitError("anchor '" + a.name + "': no memory-controller dynamic power");
        return dyn(lo) / dyn(hi);
    }
    case AnchorKind::MrcPowerRatio: {
        ActivitySample act;
        act.dram_read_write_bw_gbps = peak_bandwidth_gbps(cfg, lo);
        act.interface_utilization = 1.0;
        double opt = soc_power(cfg, lo, act, k, true).memory();
        double raw = soc_power(cfg, lo, act, k, false).memory();
        if (!(opt > 0.0))
            throw FitError("anchor '" + a.name + "': no memory power");
        return raw / opt;
    }
    }
    return 0.0;
}

std::vector<AnchorResidual> anchor_residuals(const CalibrationTargets &t,
                                             const SocConfig &cfg)
{
    std::vector<AnchorResidual> out;
    for (const auto &a : t.anchors) {
        AnchorResidual r;
        r.name = a.name;
        r.target = a.target;
        r.achieved = evaluate_anchor(a, cfg);
        double denom = std::abs(a.target) > 0.0 ? std::abs(a.target) : 1.0;
        r.relative_error = std::abs(r.achieved - a.target) / denom;
        r.within_tolerance = r.relative_error <= a.tolerance;
        out.push_back(r);
    }
    return out;
}

namespace {

bool all_within(const std::vector<AnchorResidual> &rs)
{
    return std::all_of(rs.begin(), rs.end(),
                       [](const AnchorResidual &r) { return r.within_tolerance; });
}

std::string describe(const std::vector<AnchorResidual> &rs)
{
    std::ostringstream os;
    for (const auto &r : rs)
        os << ' ' << r.name << ": target " << r.target << " achieved " << r.achieved
           << " (rel " << r.relative_error << ')';
    return os.str();
}

} // namespace

FitResult calibrate_coefficients(const CalibrationTargets &targets,
                                 const SocConfig &seed)
{
    if (targets.anchors.empty())
        throw FitError("no calibration anchors");
    if (!(targets.scale_min > 0.0 && targets.scale_min < targets.scale_max))
        throw FitError("scale range must be positive and ascending");
    scale_coefficients(seed.power_coefficients, targets.free_coefficients, 1.0);

    FitResult res;
    res.coefficients = seed.power_coefficients;
    res.residuals = anchor_residuals(targets, seed);
    if (all_within(res.residuals))
        return res;
    if (targets.free_coefficients.empty())
        throw FitError("seed misses anchors and nothing is free:" + describe(res.residuals));

    SocConfig cfg = seed;
    auto cost_at = [&](double log_s) {
        cfg.power_coefficients = scale_coefficients(
            seed.power_coefficients, targets.free_coefficients, std::exp(log_s));
        double sum = 0.0;
        for (const auto &r : anchor_residuals(targets, cfg))
            sum += r.relative_error * r.relative_error;
        return sum;
    };

    const double a0 = std::log(targets.scale_min);
    const double b0 = std::log(targets.scale_max);
    constexpr int kGrid = 64;
    std::vector<double> cost(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i)
        cost[i] = cost_at(a0 + (b0 - a0) * i / kGrid);
    int best = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());

    double lo = a0 + (b0 - a0) * std::max(best - 1, 0) / kGrid;
    double hi = a0 + (b0 - a0) * std::min(best + 1, kGrid) / kGrid;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = cost_at(x1);
    double f2 = cost_at(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = cost_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = cost_at(x2);
        }
    }
    double log_s = 0.5 * (lo + hi);
    if (cost[best] < cost_at(log_s))
        log_s = a0 + (b0 - a0) * best / kGrid;

    res.scale = std::exp(log_s);
    cfg.power_coefficients =
        scale_coefficients(seed.power_coefficients, targets.free_coefficients, res.scale);
    res.coefficients = cfg.power_coefficients;
    res.residuals = anchor_residuals(targets, cfg);
    if (!all_within(res.residuals))
        throw FitError("no scale meets every anchor:" + describe(res.residuals));
    return res;
}

std::string fit_to_json(const FitResult &r)
{
    json j;
    j["power_coefficients"] = r.coefficients;
    j["scale"] = r.scale;
    j["residuals"] = json::array();
    for (const auto &a : r.residuals)
        j["residuals"].push_back({{"anchor", a.name},
                                  {"target", a.target},
                                  {"achieved", a.achieved},
                                  {"relative_error", a.relative_error},
                                  {"within_tolerance", a.within_tolerance}});
    return j.dump(2) + "\n";
}

} // namespace sysscale
