#include "sysscale/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sysscale/error.hpp"
#include "sysscale/json_io.hpp"

namespace sysscale {

namespace {

constexpr double kFractionTolerance = 1e-6;

constexpr const char *kCsvHeader =
    "duration_ms,frac_compute,frac_lat,frac_bw,core_bw,gfx_bw,io_bw,"
    "scalability,cstate";

std::string fmt(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string &field, const std::string &where)
{
    double v = 0.0;
    const char *first = field.data();
    const char *last = field.data() + field.size();
    while (first < last && *first == ' ')
        ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\r'))
        --last;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ParseError(where + ": not a number: '" + field + "'");
    return v;
}

std::string sidecar_path(const std::string &path)
{
    return std::filesystem::path(path).replace_extension(".json").string();
}

} // namespace

const char *to_string(WorkloadClass c)
{
    switch (c) {
    case WorkloadClass::Cpu: return "cpu";
    case WorkloadClass::Graphics: return "graphics";
    case WorkloadClass::BatteryLife: return "battery-life";
    }
    return "?";
}

WorkloadClass workload_class_from_string(const std::string &s)
{
    if (s == "cpu")
        return WorkloadClass::Cpu;
    if (s == "graphics")
        return WorkloadClass::Graphics;
    if (s == "battery-life")
        return WorkloadClass::BatteryLife;
    throw ParseError("unknown workload class '" + s + "'");
}

double WorkloadTrace::duration_ms() const
{
    double total = 0.0;
    for (const auto &s : slices)
        total += s.duration_ms;
    return total;
}

void validate_trace(const WorkloadTrace &trace)
{
    for (std::size_t i = 0; i < trace.slices.size(); ++i) {
        const TraceSlice &s = trace.slices[i];
        auto bad = [&](const std::string &what) {
            throw InvariantError(trace.name + ": slice " + std::to_string(i) +
                                 ": " + what);
        };
        if (!(s.duration_ms > 0.0))
            bad("duration must be > 0");
        for (double f : {s.frac_compute, s.frac_mem_latency,
                         s.frac_mem_bandwidth, s.cpu_scalability}) {
            if (!(f >= 0.0 && f <= 1.0))
                bad("fraction outside [0,1]");
        }
        double sum = s.frac_compute + s.frac_mem_latency + s.frac_mem_bandwidth;
        if (std::abs(sum - 1.0) > kFractionTolerance)
            bad("bottleneck fractions sum to " + fmt(sum) + ", expected 1");
        if (!(s.core_bw_demand >= 0.0 && s.gfx_bw_demand >= 0.0 &&
              s.io_bw_demand >= 0.0))
            bad("negative bandwidth demand");
        if (!dram_active(s.power_state) && s.total_bw_demand() > 0.0)
            bad(std::string("bandwidth demand in ") + to_string(s.power_state));
        if (s.peripheral_config.displays.size() > kMaxDisplays)
            bad("more than 3 displays");
    }
}

std::string trace_to_csv(const WorkloadTrace &trace)
{
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto &s : trace.slices) {
        out << fmt(s.duration_ms) << ',' << fmt(s.frac_compute) << ','
            << fmt(s.frac_mem_latency) << ',' << fmt(s.frac_mem_bandwidth) << ','
            << fmt(s.core_bw_demand) << ',' << fmt(s.gfx_bw_demand) << ','
            << fmt(s.io_bw_demand) << ',' << fmt(s.cpu_scalability) << ','
            << to_string(s.power_state) << '\n';
    }
    return out.str();
}

WorkloadTrace trace_from_csv(const std::string &csv, const std::string &origin)
{
    WorkloadTrace trace;
    trace.name = origin;
    std::istringstream in(csv);
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true;
            if (line != kCsvHeader)
                throw ParseError(origin + ":" + std::to_string(lineno) +
                                 ": unexpected header");
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        std::string where = origin + ":" + std::to_string(lineno);
        if (f.size() != 9)
            throw ParseError(where + ": expected 9 columns, got " +
                             std::to_string(f.size()));
        TraceSlice s;
        s.duration_ms = parse_double(f[0], where);
        s.frac_compute = parse_double(f[1], where);
        s.frac_mem_latency = parse_double(f[2], where);
        s.frac_mem_bandwidth = parse_double(f[3], where);
        s.core_bw_demand = parse_double(f[4], where);
        s.gfx_bw_demand = parse_double(f[5], where);
        s.io_bw_demand = parse_double(f[6], where);
        s.cpu_scalability = parse_double(f[7], where);
        std::string cstate = f[8];
        cstate.erase(std::remove(cstate.begin(), cstate.end(), ' '), cstate.end());
        try {
            s.power_state = power_state_from_string(cstate);
        } catch (const ParseError &e) {
            throw ParseError(where + ": " + e.what());
        }
        trace.slices.push_back(std::move(s));
    }
    if (!header_seen)
        throw ParseError(origin + ": missing header");
    return trace;
}

WorkloadTrace load_trace(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open trace '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    WorkloadTrace trace = trace_from_csv(buf.str(), path);
    trace.name = std::filesystem::path(path).stem().string();

    PeripheralConfig peripherals;
    std::string meta = sidecar_path(path);
    if (meta != path && std::filesystem::exists(meta)) {
        json j = read_json_file(meta);
        try {
            trace.name = j.value("name", trace.name);
            trace.cls = workload_class_from_string(j.value("class", "cpu"));
            if (j.contains("seed"))
                trace.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("peripherals"))
                peripherals = j.at("peripherals").get<PeripheralConfig>();
        } catch (const json::exception &e) {
            throw ParseError(meta + ": " + e.what());
        }
    }
    for (auto &s : trace.slices)
        s.peripheral_config = peripherals;
    validate_trace(trace);
    return trace;
}

void write_trace(const WorkloadTrace &trace, const std::string &path)
{
    write_text_file(path, trace_to_csv(trace));
    json meta;
    meta["name"] = trace.name;
    meta["class"] = to_string(trace.cls);
    if (trace.seed)
        meta["seed"] = *trace.seed;
    meta["peripherals"] = trace.slices.empty()
                              ? PeripheralConfig{}
                              : trace.slices.front().peripheral_config;
    write_text_file(sidecar_path(path), meta.dump(2) + "\n");
}

namespace {

SliceStats stats_from_json(const json &j)
{
    SliceStats s;
    s.frac_compute = j.value("frac_compute", 0.0);
    s.frac_lat = j.value("frac_lat", 0.0);
    s.frac_bw = j.value("frac_bw", 0.0);
    s.core_bw = j.value("core_bw", 0.0);
    s.gfx_bw = j.value("gfx_bw", 0.0);
    s.io_bw = j.value("io_bw", 0.0);
    s.scalability = j.value("scalability", 0.0);
    return s;
}

} // namespace

PhaseProfile load_profile(const std::string &path)
{
    json j = read_json_file(path);
    PhaseProfile p;
    try {
        p.name = j.value("name", std::filesystem::path(path).stem().string());
        p.cls = workload_class_from_string(j.value("class", "cpu"));
        p.slice_ms = j.value("slice_ms", 1.0);
        p.cycles = j.value("cycles", std::size_t{1});
        if (j.contains("peripherals"))
            p.peripherals = j.at("peripherals").get<PeripheralConfig>();
        for (const auto &ph : j.at("phases")) {
            PhaseSpec spec;
            spec.slices = ph.value("slices", std::size_t{1});
            spec.power_state = power_state_from_string(ph.value("cstate", "C0"));
            spec.mean = stats_from_json(ph.at("mean"));
            if (ph.contains("stddev"))
                spec.stddev = stats_from_json(ph.at("stddev"));
            p.phases.push_back(spec);
        }
    } catch (const json::exception &e) {
        throw ParseError(path + ": " + e.what());
    }
    return p;
}

WorkloadTrace synthesize(const PhaseProfile &profile, std::uint64_t seed)
{
    if (!(profile.slice_ms > 0.0))
        throw InvariantError("profile '" + profile.name + "': slice_ms must be > 0");
    for (std::size_t i = 0; i < profile.phases.size(); ++i) {
        const SliceStats &m = profile.phases[i].mean;
        const SliceStats &sd = profile.phases[i].stddev;
        std::string where = "profile '" + profile.name + "' phase " + std::to_string(i);
        for (double v : {m.frac_compute, m.frac_lat, m.frac_bw, m.scalability}) {
            if (!(v >= 0.0 && v <= 1.0))
                throw InvariantError(where + ": mean fraction outside [0,1]");
        }
        if (m.frac_compute + m.frac_lat + m.frac_bw <= 0.0)
            throw InvariantError(where + ": fractions must not all be zero");
        for (double v : {m.core_bw, m.gfx_bw, m.io_bw, sd.frac_compute, sd.frac_lat,
                         sd.frac_bw, sd.core_bw, sd.gfx_bw, sd.io_bw,
                         sd.scalability}) {
            if (!(v >= 0.0))
                throw InvariantError(where + ": negative mean or stddev");
        }
    }

    std::mt19937_64 rng(seed);
    auto draw = [&rng](double mean, double sd) {
        if (sd <= 0.0)
            return mean;
        return std::normal_distribution<double>(mean, sd)(rng);
    };
    auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
    auto nonneg = [](double v) { return std::max(v, 0.0); };

    WorkloadTrace trace;
    trace.name = profile.name;
    trace.cls = profile.cls;
    trace.seed = seed;
    for (std::size_t c = 0; c < profile.cycles; ++c) {
        for (const PhaseSpec &ph : profile.phases) {
            bool active = dram_active(ph.power_state);
            for (std::size_t k = 0; k < ph.slices; ++k) {
                const SliceStats &m = ph.mean;
                const SliceStats &sd = ph.stddev;
                TraceSlice s;
                s.duration_ms = profile.slice_ms;
                s.power_state = ph.power_state;
                s.peripheral_config = profile.peripherals;
                s.frac_compute = unit(draw(m.frac_compute, sd.frac_compute));
                s.frac_mem_latency = unit(draw(m.frac_lat, sd.frac_lat));
                s.frac_mem_bandwidth = unit(draw(m.frac_bw, sd.frac_bw));
                double sum = s.frac_compute + s.frac_mem_latency + s.frac_mem_bandwidth;
                if (sum <= 0.0) {
                    s.frac_compute = 1.0;
                    s.frac_mem_latency = s.frac_mem_bandwidth = 0.0;
                } else if (std::abs(sum - 1.0) > 1e-12) {
                    s.frac_compute /= sum;
                    s.frac_mem_latency /= sum;
                    s.frac_mem_bandwidth = 1.0 - s.frac_compute - s.frac_mem_latency;
                    s.frac_mem_bandwidth = std::max(s.frac_mem_bandwidth, 0.0);
                }
                s.core_bw_demand = active ? nonneg(draw(m.core_bw, sd.core_bw)) : 0.0;
                s.gfx_bw_demand = active ? nonneg(draw(m.gfx_bw, sd.gfx_bw)) : 0.0;
                s.io_bw_demand = active ? nonneg(draw(m.io_bw, sd.io_bw)) : 0.0;
                s.cpu_scalability = unit(draw(m.scalability, sd.scalability));
                trace.slices.push_back(std::move(s));
            }
        }
    }
    return trace;
}

double static_demand(const PeripheralConfig &pcfg, const StaticDemandTable &table)
{
    auto lookup = [&](const std::string &kind, const std::string &cls,
                      double rate) {
        for (const auto &row : table) {
            if (row.kind == kind && row.cls == cls)
                return row.gbps * rate / row.reference_rate;
        }
        throw LookupError("no static-demand row for " + kind + " '" + cls + "'");
    };
    double total = 0.0;
    for (const auto &d : pcfg.displays)
        total += lookup("display", d.cls, d.refresh_hz);
    for (const auto &c : pcfg.cameras)
        total += lookup("camera", c.cls, c.fps);
    return total;
}

double memory_latency_ns(const LatencyModel &lat, const OperatingPoint &op)
{
    return lat.fixed_ns + lat.mc_ns_ghz / op.mc_freq_ghz +
           lat.dram_ns_ghz / op.dram_freq_ghz;
}

double relative_performance(const SocConfig &cfg, const TraceSlice &slice,
                            const OperatingPoint &op,
                            const OperatingPoint &baseline, bool mrc_optimized,
                            WorkloadClass cls)
{
    bool gfx = cls == WorkloadClass::Graphics;
    double f = gfx ? op.gfx_freq_ghz : op.core_freq_ghz;
    double f_base = gfx ? baseline.gfx_freq_ghz : baseline.core_freq_ghz;

    double compute = 0.0;
    if (slice.frac_compute > 0.0) {
        if (!(f > 0.0))
            return 0.0;
        compute = slice.frac_compute * f_base / f;
    }

    double latency = slice.frac_mem_latency *
                     memory_latency_ns(cfg.latency, op) /
                     memory_latency_ns(cfg.latency, baseline);

    double demand = slice.total_bw_demand();
    double over = std::max(1.0, demand / peak_bandwidth_gbps(cfg, op));
    double over_base = std::max(1.0, demand / peak_bandwidth_gbps(cfg, baseline));
    double bandwidth = slice.frac_mem_bandwidth * over / over_base;

    double memory = latency + bandwidth;
    if (!mrc_optimized)
        memory /= cfg.mrc_penalty.perf_factor;
    double slowdown = compute + memory;
    return slowdown > 0.0 ? 1.0 / slowdown : 1.0;
}

} // namespace sysscale
