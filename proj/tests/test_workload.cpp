#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "sysscale/error.hpp"
#include "sysscale/workload.hpp"
#include "support.hpp"

using namespace sysscale;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

const std::string kHeader =
    "duration_ms,frac_compute,frac_lat,frac_bw,core_bw,gfx_bw,io_bw,scalability,cstate\n";

// Independent restatement of the slowdown model.
double oracle_perf(const SocConfig &cfg, const TraceSlice &s, const OperatingPoint &op,
                   const OperatingPoint &base, bool optimized)
{
    auto lat = [&](const OperatingPoint &p) {
        return 40.0 + 10.0 / p.mc_freq_ghz + 20.0 / p.dram_freq_ghz;
    };
    double demand = s.core_bw_demand + s.gfx_bw_demand + s.io_bw_demand;
    double over = std::max(1.0, demand / (16.0 * op.dram_freq_ghz));
    double over_base = std::max(1.0, demand / (16.0 * base.dram_freq_ghz));
    double mem = s.frac_mem_latency * lat(op) / lat(base) +
                 s.frac_mem_bandwidth * over / over_base;
    if (!optimized)
        mem /= 0.90;
    (void)cfg;
    return 1.0 / (s.frac_compute * base.core_freq_ghz / op.core_freq_ghz + mem);
}

} // namespace

TEST_CASE("bundled lbm-like trace is bandwidth dominated throughout")
{
    WorkloadTrace t = load_trace(data("traces/lbm-like.trace"));
    CHECK(t.name == "lbm-like");
    CHECK(t.cls == WorkloadClass::Cpu);
    REQUIRE(t.slices.size() == 300);
    for (const auto &s : t.slices) {
        CHECK(s.frac_mem_bandwidth > s.frac_compute);
        CHECK(s.frac_mem_bandwidth > s.frac_mem_latency);
        CHECK(s.core_bw_demand == doctest::Approx(20.0).epsilon(0.2));
    }
}

TEST_CASE("empty trace is valid with zero duration")
{
    WorkloadTrace t = trace_from_csv(kHeader, "mem");
    validate_trace(t);
    CHECK(t.slices.empty());
    CHECK(t.duration_ms() == 0.0);
}

TEST_CASE("fractions summing to 1.2 are rejected with the slice index")
{
    WorkloadTrace t =
        trace_from_csv(kHeader + "1,0.5,0.2,0.3,1,0,0,0.5,C0\n1,0.6,0.3,0.3,1,0,0,0.5,C0\n",
                       "mem");
    try {
        validate_trace(t);
        FAIL("expected rejection");
    } catch (const InvariantError &e) {
        CHECK(std::string(e.what()).find("slice 1") != std::string::npos);
        CHECK(e.code() == "invariant");
    }
}

TEST_CASE("parse errors carry file and line")
{
    try {
        trace_from_csv(kHeader + "# note\n1,0.5,0.2,x,1,0,0,0.5,C0\n", "t.csv");
        FAIL("expected parse error");
    } catch (const ParseError &e) {
        CHECK(std::string(e.what()).find("t.csv:3") != std::string::npos);
    }
    CHECK_THROWS_AS(trace_from_csv("a,b\n", "t.csv"), ParseError);
    CHECK_THROWS_AS(trace_from_csv(kHeader + "1,1,0,0,0,0,0,0,C9\n", "t.csv"), ParseError);
    CHECK_THROWS_AS(trace_from_csv(kHeader + "1,1,0,0\n", "t.csv"), ParseError);
    CHECK_THROWS_AS(load_trace(data("traces/missing.trace")), ParseError);
}

TEST_CASE("CSV round trip is exact")
{
    WorkloadTrace t = synthesize(load_profile(data("profiles/perlbench-like.json")), 5);
    std::string csv = trace_to_csv(t);
    WorkloadTrace back = trace_from_csv(csv, "mem");
    CHECK(trace_to_csv(back) == csv);
    REQUIRE(back.slices.size() == t.slices.size());
    CHECK(back.slices[17].core_bw_demand == t.slices[17].core_bw_demand);

}

TEST_CASE("trace files round trip with their sidecar")
{
    WorkloadTrace t = synthesize(load_profile(data("profiles/video-playback.json")), 9);
    fs::path dir = fs::temp_directory_path() / "sysscale-workload-test";
    fs::create_directories(dir);
    std::string path = (dir / "video.trace").string();
    write_trace(t, path);
    CHECK(fs::exists(dir / "video.json"));
    WorkloadTrace back = load_trace(path);
    CHECK(back.name == t.name);
    CHECK(back.cls == WorkloadClass::BatteryLife);
    CHECK(back.seed == std::optional<std::uint64_t>(9));
    CHECK(back.slices.front().peripheral_config == t.slices.front().peripheral_config);
    CHECK(trace_to_csv(back) == trace_to_csv(t));
    fs::remove_all(dir);
}

TEST_CASE("synthesis is deterministic and follows the phases")
{
    PhaseProfile astar = load_profile(data("profiles/astar-like.json"));
    WorkloadTrace a = synthesize(astar, 1);
    CHECK(trace_to_csv(a) == trace_to_csv(synthesize(astar, 1)));
    CHECK(trace_to_csv(a) != trace_to_csv(synthesize(astar, 2)));
    REQUIRE(a.slices.size() == 300);
    for (std::size_t i = 0; i < a.slices.size(); ++i) {
        bool heavy = (i / 30) % 2 == 1;
        double bw = a.slices[i].core_bw_demand;
        if (heavy)
            CHECK(bw == doctest::Approx(10.0).epsilon(0.5));
        else
            CHECK(bw == doctest::Approx(1.0).epsilon(0.5));
    }
    validate_trace(a);
}

TEST_CASE("zero-variance profile reproduces its means")
{
    PhaseProfile p;
    PhaseSpec ph;
    ph.slices = 12;
    ph.mean = {0.5, 0.3, 0.2, 3.0, 0.5, 1.0, 0.7};
    p.phases = {ph};
    p.cycles = 2;
    WorkloadTrace t = synthesize(p, 123);
    REQUIRE(t.slices.size() == 24);
    for (const auto &s : t.slices) {
        CHECK(s.frac_compute == doctest::Approx(0.5));
        CHECK(s.frac_mem_latency == doctest::Approx(0.3));
        CHECK(s.frac_mem_bandwidth == doctest::Approx(0.2));
        CHECK(s.core_bw_demand == 3.0);
        CHECK(s.gfx_bw_demand == 0.5);
        CHECK(s.io_bw_demand == 1.0);
        CHECK(s.cpu_scalability == 0.7);
    }
}

TEST_CASE("static demand from the peripheral table")
{
    SocConfig cfg = table1();
    const auto &table = cfg.static_demand_table;
    PeripheralConfig one;
    one.displays = {{"HD", 60}};
    CHECK(static_demand(one, table) == doctest::Approx(0.17 * 25.6));
    CHECK(static_demand(one, table) == doctest::Approx(4.352));

    PeripheralConfig three;
    three.displays = {{"HD", 60}, {"HD", 60}, {"HD", 60}};
    CHECK(static_demand(three, table) == doctest::Approx(13.056));
    CHECK(static_demand(PeripheralConfig{}, table) == 0.0);

    PeripheralConfig k4;
    k4.displays = {{"4K", 60}};
    CHECK(static_demand(k4, table) == doctest::Approx(0.70 * 25.6));

    PeripheralConfig half_rate;
    half_rate.displays = {{"HD", 30}};
    CHECK(static_demand(half_rate, table) == doctest::Approx(4.352 / 2));

    PeripheralConfig unknown;
    unknown.cameras = {{"8K", 30}};
    CHECK_THROWS_AS(static_demand(unknown, table), LookupError);
}

TEST_CASE("static demand is additive and order independent")
{
    SocConfig cfg = table1();
    const char *displays[] = {"HD", "FHD", "4K"};
    const char *cameras[] = {"HD", "FHD"};
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        PeripheralConfig p;
        double sum = 0.0;
        for (std::size_t d = 0; d < rng() % 4; ++d) {
            p.displays.push_back({displays[rng() % 3], 30.0 + double(rng() % 90)});
            PeripheralConfig single;
            single.displays = {p.displays.back()};
            sum += static_demand(single, cfg.static_demand_table);
        }
        for (std::size_t c = 0; c < rng() % 3; ++c) {
            p.cameras.push_back({cameras[rng() % 2], 15.0 + double(rng() % 45)});
            PeripheralConfig single;
            single.cameras = {p.cameras.back()};
            sum += static_demand(single, cfg.static_demand_table);
        }
        double total = static_demand(p, cfg.static_demand_table);
        CHECK(total == doctest::Approx(sum).epsilon(1e-12));
        std::reverse(p.displays.begin(), p.displays.end());
        std::reverse(p.cameras.begin(), p.cameras.end());
        CHECK(static_demand(p, cfg.static_demand_table) == doctest::Approx(total).epsilon(1e-12));
    }
}

TEST_CASE("relative performance reference cases")
{
    SocConfig cfg = table1();
    OperatingPoint hi = high(cfg), lo = low(cfg);
    CHECK(relative_performance(cfg, slice(1, 0, 0, 20), lo, hi, true) == 1.0);
    CHECK(relative_performance(cfg, slice(0, 0, 1, 25.6), lo, hi, true) ==
          doctest::Approx(1.06 / 1.6).epsilon(1e-12));
    CHECK(relative_performance(cfg, slice(0, 0, 1, 25.6), lo, hi, true) ==
          doctest::Approx(0.6625).epsilon(1e-12));
    CHECK(memory_latency_ns(cfg.latency, hi) == doctest::Approx(40 + 10 / 0.8 + 20 / 1.6));

    WorkloadTrace cactus = synthesize(load_profile(data("profiles/cactusADM-like.json")), 3);
    for (const auto &s : cactus.slices)
        CHECK(relative_performance(cfg, s, lo, hi, true) < 0.90);
}

TEST_CASE("relative performance against an independent oracle")
{
    SocConfig cfg = table1();
    OperatingPoint hi = high(cfg), lo = low(cfg);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 5000; ++i) {
        TraceSlice s = random_slice(rng);
        bool opt = i % 3 != 0;
        CHECK(relative_performance(cfg, s, lo, hi, opt) ==
              doctest::Approx(oracle_perf(cfg, s, lo, hi, opt)).epsilon(1e-12));
        CHECK(relative_performance(cfg, s, hi, hi, true) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(relative_performance(cfg, s, lo, hi, true) <= 1.0 + 1e-15);
    }
}

TEST_CASE("raising any frequency never lowers performance")
{
    SocConfig cfg = table1();
    OperatingPoint hi = high(cfg);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        TraceSlice s = random_slice(rng);
        OperatingPoint op = hi;
        op.dram_freq_ghz = 0.8 + 0.8 * u(rng);
        op.mc_freq_ghz = 0.4 + 0.4 * u(rng);
        op.core_freq_ghz = 0.8 + 2.3 * u(rng);
        double base = relative_performance(cfg, s, op, hi, true);
        OperatingPoint up = op;
        switch (i % 3) {
        case 0: up.dram_freq_ghz *= 1.2; break;
        case 1: up.mc_freq_ghz *= 1.2; break;
        case 2: up.core_freq_ghz *= 1.2; break;
        }
        CHECK(relative_performance(cfg, s, up, hi, true) >= base);
    }
}

TEST_CASE("profile validation")
{
    PhaseProfile p;
    PhaseSpec ph;
    ph.mean.frac_compute = 0.0;
    p.phases = {ph};
    CHECK_THROWS_AS(synthesize(p, 1), InvariantError);
    p.phases[0].mean.frac_compute = 1.0;
    p.slice_ms = 0.0;
    CHECK_THROWS_AS(synthesize(p, 1), InvariantError);
    CHECK_THROWS_AS(load_profile(data("profiles/none.json")), ParseError);
    CHECK(workload_class_from_string("battery-life") == WorkloadClass::BatteryLife);
    CHECK_THROWS_AS(workload_class_from_string("server"), ParseError);
}
