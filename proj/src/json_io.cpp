#include "sysscale/json_io.hpp"

#include <fstream>
#include <sstream>

#include "sysscale/error.hpp"

namespace sysscale {

void to_json(json &j, const PowerCoefficients &c)
{
    j = json{{"k_bg", c.k_bg},
             {"p_refresh", c.p_refresh},
             {"e_array", c.e_array},
             {"k_term", c.k_term},
             {"k_io_ddr", c.k_io_ddr},
             {"k_mc_dyn", c.k_mc_dyn},
             {"k_mc_static", c.k_mc_static},
             {"k_ic_dyn", c.k_ic_dyn},
             {"k_core_dyn", c.k_core_dyn},
             {"k_gfx_dyn", c.k_gfx_dyn},
             {"k_core_leak", c.k_core_leak},
             {"k_gfx_leak", c.k_gfx_leak},
             {"temperature_factor", c.temperature_factor}};
}

void from_json(const json &j, PowerCoefficients &c)
{
    PowerCoefficients d;
    c.k_bg = j.value("k_bg", d.k_bg);
    c.p_refresh = j.value("p_refresh", d.p_refresh);
    c.e_array = j.value("e_array", d.e_array);
    c.k_term = j.value("k_term", d.k_term);
    c.k_io_ddr = j.value("k_io_ddr", d.k_io_ddr);
    c.k_mc_dyn = j.value("k_mc_dyn", d.k_mc_dyn);
    c.k_mc_static = j.value("k_mc_static", d.k_mc_static);
    c.k_ic_dyn = j.value("k_ic_dyn", d.k_ic_dyn);
    c.k_core_dyn = j.value("k_core_dyn", d.k_core_dyn);
    c.k_gfx_dyn = j.value("k_gfx_dyn", d.k_gfx_dyn);
    c.k_core_leak = j.value("k_core_leak", d.k_core_leak);
    c.k_gfx_leak = j.value("k_gfx_leak", d.k_gfx_leak);
    c.temperature_factor = j.value("temperature_factor", d.temperature_factor);
}

void to_json(json &j, const PeripheralConfig &p)
{
    j = json{{"displays", json::array()}, {"cameras", json::array()}};
    for (const auto &d : p.displays)
        j["displays"].push_back({{"class", d.cls}, {"refresh_hz", d.refresh_hz}});
    for (const auto &c : p.cameras)
        j["cameras"].push_back({{"class", c.cls}, {"fps", c.fps}});
}

void from_json(const json &j, PeripheralConfig &p)
{
    p = PeripheralConfig{};
    if (j.contains("displays")) {
        for (const auto &d : j.at("displays"))
            p.displays.push_back({d.at("class").get<std::string>(),
                                  d.value("refresh_hz", 60.0)});
    }
    if (j.contains("cameras")) {
        for (const auto &c : j.at("cameras"))
            p.cameras.push_back({c.at("class").get<std::string>(),
                                 c.value("fps", 30.0)});
    }
}

void to_json(json &j, const OperatingPoint &op)
{
    j = json{{"level", op.level},
             {"dram_ghz", op.dram_freq_ghz},
             {"mc_ghz", op.mc_freq_ghz},
             {"io_interconnect_ghz", op.io_interconnect_freq_ghz},
             {"core_ghz", op.core_freq_ghz},
             {"gfx_ghz", op.gfx_freq_ghz},
             {"rail_voltages", op.rail_voltages}};
    j["mrc_set"] = op.mrc_set ? json(*op.mrc_set) : json(nullptr);
}

namespace {

std::vector<std::uint8_t> hex_to_bytes(const std::string &hex)
{
    if (hex.size() % 2 != 0)
        throw ParseError("payload_hex has odd length");
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(
            std::stoul(hex.substr(i, 2), nullptr, 16)));
    return out;
}

json limits_to_json(const ComputeLimits &c)
{
    return {{"core_pn_ghz", c.core_pn_ghz},
            {"core_max_ghz", c.core_max_ghz},
            {"gfx_pn_ghz", c.gfx_pn_ghz},
            {"gfx_max_ghz", c.gfx_max_ghz},
            {"graphics_core_share", c.graphics_core_share},
            {"core_ghz_per_watt", c.core_ghz_per_watt},
            {"gfx_ghz_per_watt", c.gfx_ghz_per_watt},
            {"core_rail", c.core_rail},
            {"gfx_rail", c.gfx_rail}};
}

ComputeLimits limits_from_json(const json &j)
{
    ComputeLimits c;
    c.core_pn_ghz = j.value("core_pn_ghz", c.core_pn_ghz);
    c.core_max_ghz = j.value("core_max_ghz", c.core_max_ghz);
    c.gfx_pn_ghz = j.value("gfx_pn_ghz", c.gfx_pn_ghz);
    c.gfx_max_ghz = j.value("gfx_max_ghz", c.gfx_max_ghz);
    c.graphics_core_share = j.value("graphics_core_share", c.graphics_core_share);
    c.core_ghz_per_watt = j.value("core_ghz_per_watt", c.core_ghz_per_watt);
    c.gfx_ghz_per_watt = j.value("gfx_ghz_per_watt", c.gfx_ghz_per_watt);
    c.core_rail = j.value("core_rail", c.core_rail);
    c.gfx_rail = j.value("gfx_rail", c.gfx_rail);
    return c;
}

} // namespace

json config_to_json(const SocConfig &cfg)
{
    json j;
    j["name"] = cfg.name;
    j["tdp_watts"] = cfg.tdp_watts;
    j["evaluation_interval_ms"] = cfg.evaluation_interval_ms;
    j["sample_period_ms"] = cfg.sample_period_ms;
    j["mc_freq_ratio"] = cfg.mc_freq_ratio;
    j["peak_bw_gbps_per_ghz"] = cfg.peak_bw_gbps_per_ghz;
    j["io_capacity_gbps_per_ghz"] = cfg.io_capacity_gbps_per_ghz;
    j["dram_freq_bins_ghz"] = cfg.dram_freq_bins_ghz;

    j["rails"] = json::array();
    for (const auto &r : cfg.rails)
        j["rails"].push_back({{"name", r.name},
                              {"v_min", r.v_min},
                              {"v_nominal", r.v_nominal},
                              {"slew_rate_mv_per_us", r.slew_rate_mv_per_us}});
    j["domains"] = json::array();
    for (const auto &d : cfg.domains)
        j["domains"].push_back({{"name", d.name},
                                {"kind", to_string(d.kind)},
                                {"rail", d.rail},
                                {"clock", to_string(d.clock)}});
    j["vf_curves"] = json::object();
    for (const auto &[rail, curve] : cfg.vf_curves) {
        json knots = json::array();
        for (const auto &[f, v] : curve.knots())
            knots.push_back({f, v});
        j["vf_curves"][rail] = knots;
    }
    j["power_coefficients"] = cfg.power_coefficients;

    j["levels"] = json::array();
    for (const auto &l : cfg.levels) {
        json lj{{"dram_ghz", l.dram_freq_ghz},
                {"io_interconnect_ghz", l.io_interconnect_freq_ghz},
                {"core_ghz", l.core_freq_ghz},
                {"gfx_ghz", l.gfx_freq_ghz}};
        if (!l.rail_voltages.empty())
            lj["rail_voltages"] = l.rail_voltages;
        j["levels"].push_back(lj);
    }

    json mrc{{"sram_budget_bytes", cfg.mrc_bank.sram_budget_bytes()},
             {"entries", json::array()}};
    for (const auto &e : cfg.mrc_bank.entries())
        mrc["entries"].push_back({{"id", e.id},
                                  {"optimized_for_ghz", e.optimized_for_ghz},
                                  {"size_bytes", e.payload.size()}});
    j["mrc"] = mrc;

    j["compute"] = limits_to_json(cfg.compute);
    j["latency"] = {{"fixed_ns", cfg.latency.fixed_ns},
                    {"mc_ns_ghz", cfg.latency.mc_ns_ghz},
                    {"dram_ns_ghz", cfg.latency.dram_ns_ghz}};
    j["counters"] = {{"gfx_misses_per_gbps", cfg.counters.gfx_misses_per_gbps},
                     {"occupancy_scale", cfg.counters.occupancy_scale},
                     {"stall_scale", cfg.counters.stall_scale},
                     {"rpq_scale", cfg.counters.rpq_scale},
                     {"noise_sigma", cfg.counters.noise_sigma}};
    j["transition"] = {{"drain_us", cfg.transition.drain_us},
                       {"self_refresh_exit_us", cfg.transition.self_refresh_exit_us},
                       {"mrc_load_us", cfg.transition.mrc_load_us},
                       {"firmware_us", cfg.transition.firmware_us}};
    j["governor"] = {{"degradation_bound", cfg.governor.degradation_bound},
                     {"static_guard_band", cfg.governor.static_guard_band},
                     {"min_dwell_intervals", cfg.governor.min_dwell_intervals},
                     {"population_sigma", cfg.governor.population_sigma}};
    j["mrc_penalty"] = {{"power_factor", cfg.mrc_penalty.power_factor},
                        {"perf_factor", cfg.mrc_penalty.perf_factor}};
    j["static_demand"] = json::array();
    for (const auto &row : cfg.static_demand_table)
        j["static_demand"].push_back({{"kind", row.kind},
                                      {"class", row.cls},
                                      {"gbps", row.gbps},
                                      {"reference_rate", row.reference_rate}});
    return j;
}

SocConfig config_from_json(const json &j)
{
    SocConfig cfg;
    try {
        cfg.name = j.value("name", cfg.name);
        cfg.tdp_watts = j.value("tdp_watts", cfg.tdp_watts);
        cfg.evaluation_interval_ms =
            j.value("evaluation_interval_ms", cfg.evaluation_interval_ms);
        cfg.sample_period_ms = j.value("sample_period_ms", cfg.sample_period_ms);
        cfg.mc_freq_ratio = j.value("mc_freq_ratio", cfg.mc_freq_ratio);
        cfg.peak_bw_gbps_per_ghz =
            j.value("peak_bw_gbps_per_ghz", cfg.peak_bw_gbps_per_ghz);
        cfg.io_capacity_gbps_per_ghz =
            j.value("io_capacity_gbps_per_ghz", cfg.io_capacity_gbps_per_ghz);
        cfg.dram_freq_bins_ghz =
            j.value("dram_freq_bins_ghz", std::vector<double>{});

        for (const auto &r : j.value("rails", json::array())) {
            VoltageRail rail;
            rail.name = r.at("name").get<std::string>();
            rail.v_min = r.at("v_min").get<double>();
            rail.v_nominal = r.at("v_nominal").get<double>();
            rail.slew_rate_mv_per_us =
                r.value("slew_rate_mv_per_us", rail.slew_rate_mv_per_us);
            cfg.rails.push_back(rail);
        }
        for (const auto &d : j.value("domains", json::array())) {
            DomainDesc dom;
            dom.name = d.at("name").get<std::string>();
            dom.kind = domain_kind_from_string(d.at("kind").get<std::string>());
            dom.rail = d.at("rail").get<std::string>();
            dom.clock = clock_from_string(d.at("clock").get<std::string>());
            cfg.domains.push_back(dom);
        }
        if (j.contains("vf_curves")) {
            for (const auto &[rail, knots] : j.at("vf_curves").items()) {
                std::vector<std::pair<double, double>> pts;
                for (const auto &k : knots)
                    pts.emplace_back(k.at(0).get<double>(), k.at(1).get<double>());
                cfg.vf_curves[rail] = VfCurve(std::move(pts));
            }
        }
        if (j.contains("power_coefficients"))
            cfg.power_coefficients =
                j.at("power_coefficients").get<PowerCoefficients>();

        for (const auto &l : j.value("levels", json::array())) {
            LevelSpec spec;
            spec.dram_freq_ghz = l.at("dram_ghz").get<double>();
            spec.io_interconnect_freq_ghz = l.at("io_interconnect_ghz").get<double>();
            spec.core_freq_ghz = l.value("core_ghz", 0.0);
            spec.gfx_freq_ghz = l.value("gfx_ghz", 0.0);
            if (l.contains("rail_voltages"))
                spec.rail_voltages =
                    l.at("rail_voltages").get<std::map<std::string, double>>();
            cfg.levels.push_back(spec);
        }

        if (j.contains("mrc")) {
            const json &m = j.at("mrc");
            std::vector<MrcRegisterSet> entries;
            for (const auto &e : m.value("entries", json::array())) {
                MrcRegisterSet set;
                set.optimized_for_ghz = e.at("optimized_for_ghz").get<double>();
                set.id = e.value("id", "mrc@" + std::to_string(set.optimized_for_ghz));
                if (e.contains("payload_hex"))
                    set.payload = hex_to_bytes(e.at("payload_hex").get<std::string>());
                else
                    set.payload.assign(e.value("size_bytes", std::size_t{0}), 0);
                entries.push_back(std::move(set));
            }
            cfg.mrc_bank = MrcBank(std::move(entries),
                                   m.value("sram_budget_bytes", std::size_t{512}));
        }

        if (j.contains("compute"))
            cfg.compute = limits_from_json(j.at("compute"));
        if (j.contains("latency")) {
            const json &l = j.at("latency");
            cfg.latency.fixed_ns = l.value("fixed_ns", cfg.latency.fixed_ns);
            cfg.latency.mc_ns_ghz = l.value("mc_ns_ghz", cfg.latency.mc_ns_ghz);
            cfg.latency.dram_ns_ghz = l.value("dram_ns_ghz", cfg.latency.dram_ns_ghz);
        }
        if (j.contains("counters")) {
            const json &c = j.at("counters");
            CounterModel &m = cfg.counters;
            m.gfx_misses_per_gbps = c.value("gfx_misses_per_gbps", m.gfx_misses_per_gbps);
            m.occupancy_scale = c.value("occupancy_scale", m.occupancy_scale);
            m.stall_scale = c.value("stall_scale", m.stall_scale);
            m.rpq_scale = c.value("rpq_scale", m.rpq_scale);
            m.noise_sigma = c.value("noise_sigma", m.noise_sigma);
        }
        if (j.contains("transition")) {
            const json &t = j.at("transition");
            TransitionLatencies &x = cfg.transition;
            x.drain_us = t.value("drain_us", x.drain_us);
            x.self_refresh_exit_us = t.value("self_refresh_exit_us", x.self_refresh_exit_us);
            x.mrc_load_us = t.value("mrc_load_us", x.mrc_load_us);
            x.firmware_us = t.value("firmware_us", x.firmware_us);
        }
        if (j.contains("governor")) {
            const json &g = j.at("governor");
            GovernorParams &p = cfg.governor;
            p.degradation_bound = g.value("degradation_bound", p.degradation_bound);
            p.static_guard_band = g.value("static_guard_band", p.static_guard_band);
            p.min_dwell_intervals = g.value("min_dwell_intervals", p.min_dwell_intervals);
            p.population_sigma = g.value("population_sigma", p.population_sigma);
        }
        if (j.contains("mrc_penalty")) {
            const json &p = j.at("mrc_penalty");
            cfg.mrc_penalty.power_factor =
                p.value("power_factor", cfg.mrc_penalty.power_factor);
            cfg.mrc_penalty.perf_factor =
                p.value("perf_factor", cfg.mrc_penalty.perf_factor);
        }
        for (const auto &row : j.value("static_demand", json::array())) {
            StaticDemandRow r;
            r.kind = row.at("kind").get<std::string>();
            r.cls = row.at("class").get<std::string>();
            r.gbps = row.at("gbps").get<double>();
            r.reference_rate = row.value("reference_rate", r.reference_rate);
            cfg.static_demand_table.push_back(r);
        }
    } catch (const json::exception &e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ParseError(path + ": " + e.what());
    }
}

SocConfig load_config(const std::string &path)
{
    json j = read_json_file(path);
    try {
        return config_from_json(j);
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_text_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write '" + path + "'");
    out << text;
    if (!out)
        throw ParseError("write failed for '" + path + "'");
}

} // namespace sysscale
