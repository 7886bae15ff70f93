#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "sysscale/error.hpp"
#include "sysscale/governor.hpp"
#include "support.hpp"

using namespace sysscale;
using namespace testsupport;

namespace {

CalibrationRun run_with(double v, double degradation)
{
    CalibrationRun r;
    r.counters = {v, v, v, v, 0.0};
    r.degradation = degradation;
    return r;
}

PerfCounterSample random_counters(std::mt19937_64 &rng, const ThresholdSet &thr)
{
    std::uniform_real_distribution<double> u(0.0, 2.0);
    return {thr.gfx_thr * u(rng), thr.core_thr * u(rng), thr.lat_thr * u(rng),
            thr.io_thr * u(rng), 0.0};
}

ThresholdSet some_thresholds()
{
    ThresholdSet t;
    t.static_bw_thr = 15.264;
    t.gfx_thr = 3000;
    t.core_thr = 4;
    t.lat_thr = 11;
    t.io_thr = 0.6;
    return t;
}

} // namespace

TEST_CASE("mean plus population sigma")
{
    std::vector<CalibrationRun> runs{run_with(10, 0.0), run_with(12, 0.001),
                                     run_with(14, 0.005), run_with(1000, 0.5)};
    ThresholdSet t = calibrate_thresholds(runs, 0.01, 15.0);
    double expect = 12.0 + std::sqrt(8.0 / 3.0);
    CHECK(std::abs(t.gfx_thr - expect) < 1e-9);
    CHECK(std::abs(t.core_thr - 13.633) < 1e-3);
    CHECK(t.lat_thr == t.io_thr);
    CHECK(t.static_bw_thr == 15.0);
    CHECK(t.degradation_bound == 0.01);

    ThresholdSet s = calibrate_thresholds(runs, 0.01, 15.0, false);
    CHECK(s.gfx_thr == doctest::Approx(14.0).epsilon(1e-12));
}

TEST_CASE("single eligible run gives its own value")
{
    std::vector<CalibrationRun> runs{run_with(7.5, 0.0), run_with(99, 0.2)};
    ThresholdSet t = calibrate_thresholds(runs, 0.01, 1.0);
    CHECK(t.io_thr == 7.5);
}

TEST_CASE("a run exactly at the bound is not eligible")
{
    std::vector<CalibrationRun> runs{run_with(5, 0.01)};
    try {
        calibrate_thresholds(runs, 0.01, 1.0);
        FAIL("expected calibration error");
    } catch (const CalibrationError &e) {
        CHECK(std::string(e.what()).find("gfx_llc_misses") != std::string::npos);
        CHECK(e.code() == "calibration");
    }
    CHECK_THROWS_AS(calibrate_thresholds(std::vector<CalibrationRun>{}, 0.01, 1.0),
                    CalibrationError);
    CHECK_THROWS_AS(calibrate_thresholds(runs, 1.5, 1.0), CalibrationError);
}

TEST_CASE("static threshold is the low point's peak less the guard band")
{
    CHECK(static_bw_threshold(table1()) == doctest::Approx(16.0 * 1.06 * 0.9).epsilon(1e-12));
}

TEST_CASE("predict reference cases")
{
    ThresholdSet thr = some_thresholds();
    Decision d = predict({}, 0.0, thr, 1);
    CHECK(d.target_level == 0);
    CHECK(d.triggering.empty());

    PerfCounterSample io;
    io.io_rpq = std::nextafter(thr.io_thr, 1e9);
    d = predict(io, 0.0, thr, 0);
    CHECK(d.target_level == 1);
    CHECK(d.triggering == std::vector<Condition>{Condition::Io});

    PerfCounterSample tie{thr.gfx_thr, thr.core_thr, thr.lat_thr, thr.io_thr, 0.0};
    d = predict(tie, thr.static_bw_thr, thr, 1);
    CHECK(d.triggering.empty());
    CHECK(d.target_level == 0);

    d = predict({}, thr.static_bw_thr + 0.1, thr, 1);
    CHECK(d.target_level == 1);
    CHECK(d.triggering == std::vector<Condition>{Condition::Static});

    CHECK(predict({}, 0.0, thr, 0).target_level == 0);
}

TEST_CASE("predict moves at most one level and is scale invariant")
{
    ThresholdSet thr = some_thresholds();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 10000; ++i) {
        PerfCounterSample c = random_counters(rng, thr);
        double st = thr.static_bw_thr * u(rng);
        std::size_t levels = 2 + rng() % 4;
        std::size_t cur = rng() % levels;
        Decision d = predict(c, st, thr, cur, levels);
        CHECK(d.target_level < levels);
        CHECK(std::abs(double(d.target_level) - double(cur)) <= 1.0);

        double k = std::ldexp(1.0, int(rng() % 16) - 8);
        ThresholdSet ts = thr;
        ts.static_bw_thr *= k;
        ts.gfx_thr *= k;
        ts.core_thr *= k;
        ts.lat_thr *= k;
        ts.io_thr *= k;
        PerfCounterSample cs{c.gfx_llc_misses * k, c.llc_occupancy_tracer * k,
                             c.llc_stalls * k, c.io_rpq * k, 0.0};
        CHECK(predict(cs, st * k, ts, cur, levels) == d);
    }
}

TEST_CASE("per-level thresholds follow the counter ratios")
{
    SocConfig cfg = table1();
    ThresholdSet thr = some_thresholds();
    OperatingPoint hi = high(cfg), lo = low(cfg);
    CHECK(thresholds_at(thr, cfg, hi, hi) == thr);
    ThresholdSet t = thresholds_at(thr, cfg, lo, hi);
    CHECK(t.core_thr == doctest::Approx(thr.core_thr * 1.6 / 1.06));
    double lat_ratio = (40 + 10 / 0.53 + 20 / 1.06) / (40 + 10 / 0.8 + 20 / 1.6);
    CHECK(t.lat_thr == doctest::Approx(thr.lat_thr * lat_ratio));
    CHECK(t.io_thr == doctest::Approx(thr.io_thr * 2.0));
    CHECK(t.gfx_thr == thr.gfx_thr);
    CHECK(t.static_bw_thr == thr.static_bw_thr);

    // A slice's decision does not depend on where its counters were read.
    std::mt19937_64 rng(2);
    for (int i = 0; i < 2000; ++i) {
        TraceSlice s = random_slice(rng, 10.0);
        Decision at_hi = predict(sample_counters(cfg, s, hi), 0.0, thr, 1);
        Decision at_lo = predict(sample_counters(cfg, s, lo), 0.0, t, 1);
        CHECK(at_hi.triggering.size() == at_lo.triggering.size());
    }
}

TEST_CASE("budget redistribution conserves the TDP")
{
    IoMemPower hi{0.5, 1.5}, lo{0.3, 1.3};
    Decision down{0, {}}, up{1, {Condition::Core}};
    DomainBudgets bh = redistribute_budget(4.5, hi, lo, up, 1);
    DomainBudgets bl = redistribute_budget(4.5, hi, lo, down, 1);
    CHECK(bl.compute_w - bh.compute_w == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(bh.total() == 4.5);
    CHECK(bl.total() == 4.5);
    CHECK(redistribute_budget(4.5, hi, hi, down, 1).compute_w == bh.compute_w);
    CHECK_THROWS_AS(redistribute_budget(1.0, hi, lo, up, 1), InfeasibleTdpError);
    CHECK_THROWS_AS(redistribute_budget(4.5, lo, hi, up, 1), InvariantError);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        double tdp = 2.0 + 20.0 * u(rng);
        IoMemPower h{u(rng), u(rng)};
        IoMemPower l{h.io_w * u(rng), h.memory_w * u(rng)};
        Decision d{rng() % 2, {}};
        DomainBudgets b = redistribute_budget(tdp, h, l, d, 1);
        CHECK(b.total() == tdp);
        CHECK(b.compute_w >= 0.0);
        CHECK(b.io_w >= 0.0);
        CHECK(b.memory_w >= 0.0);
    }
}

TEST_CASE("compute P-state selection")
{
    SocConfig cfg = table1();
    const auto &k = cfg.power_coefficients;
    const auto &lim = cfg.compute;
    ActivitySample act;
    act.core_utilization = 1.0;
    double at_pn = compute_power_at(cfg, k, lim.core_pn_ghz, lim.gfx_pn_ghz, 1.0, 0.0).total();

    PStateChoice c = select_compute_pstate(cfg, k, at_pn, act, WorkloadClass::Cpu);
    CHECK(c.duty_cycle == 1.0);
    CHECK(c.core_freq_ghz == doctest::Approx(lim.core_pn_ghz).epsilon(1e-9));

    c = select_compute_pstate(cfg, k, at_pn / 2, act, WorkloadClass::Cpu);
    CHECK(c.duty_cycle == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.effective_core_ghz() == doctest::Approx(0.5 * lim.core_pn_ghz));

    c = select_compute_pstate(cfg, k, 100.0, act, WorkloadClass::Cpu);
    CHECK(c.core_freq_ghz == lim.core_max_ghz);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 3000; ++i) {
        double budget = 8.0 * u(rng);
        ActivitySample a;
        a.core_utilization = u(rng);
        a.gfx_utilization = u(rng);
        auto cls = static_cast<WorkloadClass>(rng() % 3);
        PStateChoice p = select_compute_pstate(cfg, k, budget, a, cls);
        CHECK(p.power_w <= budget + 1e-9);
        CHECK(p.duty_cycle > 0.0 - 1e-15);
        CHECK(p.duty_cycle <= 1.0);
        double modeled = p.duty_cycle * compute_power_at(cfg, k, p.core_freq_ghz, p.gfx_freq_ghz,
                                                         a.core_utilization,
                                                         a.gfx_utilization)
                                            .total();
        CHECK(modeled <= budget + 1e-9);
        if (cls != WorkloadClass::Cpu)
            CHECK(p.core_freq_ghz == lim.core_pn_ghz);
        if (cls == WorkloadClass::BatteryLife)
            CHECK(p.gfx_freq_ghz == lim.gfx_pn_ghz);

        PStateChoice more = select_compute_pstate(cfg, k, budget + 0.1, a, cls);
        CHECK(more.effective_core_ghz() >= p.effective_core_ghz() - 1e-9);
        CHECK(more.effective_gfx_ghz() >= p.effective_gfx_ghz() - 1e-9);
    }
}

TEST_CASE("graphics workloads keep the cores at Pn and grow graphics")
{
    SocConfig cfg = table1();
    ActivitySample a;
    a.core_utilization = 0.25;
    a.gfx_utilization = 1.0;
    PStateChoice small = select_compute_pstate(cfg, cfg.power_coefficients, 2.5, a,
                                               WorkloadClass::Graphics);
    PStateChoice big = select_compute_pstate(cfg, cfg.power_coefficients, 3.5, a,
                                             WorkloadClass::Graphics);
    CHECK(small.core_freq_ghz == cfg.compute.core_pn_ghz);
    CHECK(big.core_freq_ghz == cfg.compute.core_pn_ghz);
    CHECK(big.gfx_freq_ghz > small.gfx_freq_ghz);
}

TEST_CASE("performance projection")
{
    CHECK(project_perf_boost(1.0, 1.0, 0.0, 2.0) == 0.0);
    // Delta f / f = 10% at scalability 0.5.
    CHECK(project_perf_boost(0.2, 1.0, 0.5, 2.0) == doctest::Approx(0.05));
    // +100mW buys +100MHz with the bundled map.
    SocConfig cfg = table1();
    CHECK(0.1 * cfg.compute.core_ghz_per_watt == doctest::Approx(0.1));
    CHECK(project_perf_boost(0.1, cfg.compute.core_ghz_per_watt, 1.0, 1.0) ==
          doctest::Approx(0.1));
    CHECK_THROWS_AS(project_perf_boost(0.1, 1.0, 1.5, 1.0), InvariantError);
    CHECK(project_perf_boost(0.1, 1.0, 0.5, 0.0) == 0.0);
}

TEST_CASE("governor dwell and per-level thresholds")
{
    SocConfig cfg = table1();
    ThresholdSet thr = some_thresholds();
    std::vector<OperatingPoint> ladder{low(cfg), high(cfg)};
    Governor g(cfg, thr, ladder);
    CHECK(g.thresholds(1) == thr);
    CHECK(g.thresholds(0).core_thr > thr.core_thr);
    CHECK(g.step({}, 0.0, 1).target_level == 0);

    cfg.governor.min_dwell_intervals = 3;
    Governor slow(cfg, thr, ladder);
    CHECK(slow.step({}, 0.0, 1).target_level == 1);
    CHECK(slow.step({}, 0.0, 1).target_level == 1);
    CHECK(slow.step({}, 0.0, 1).target_level == 0);
    CHECK(slow.step({}, 99.0, 0).target_level == 0);

    ThresholdSet bad = thr;
    bad.io_thr = -1.0;
    CHECK_THROWS_AS(Governor(cfg, bad, ladder), InvariantError);
    CHECK_THROWS_AS(Governor(cfg, thr, {}), ConfigError);
}

TEST_CASE("threshold files")
{
    ThresholdSet thr = some_thresholds();
    json j = json{{"thresholds", thr}};
    CHECK(j.get<ThresholdSet>() == thr);
    auto path = std::filesystem::temp_directory_path() / "sysscale-thr.cfg";
    write_text_file(path.string(), j.dump());
    CHECK(load_thresholds(path.string()) == thr);
    write_text_file(path.string(), "{\"gfx_thr\": 1}");
    CHECK_THROWS_AS(load_thresholds(path.string()), ParseError);
    std::filesystem::remove(path);
    CHECK(load_thresholds(data("thresholds.cfg")).degradation_bound == 0.01);
}
