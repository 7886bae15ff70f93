#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "sysscale/error.hpp"
#include "sysscale/telemetry.hpp"
#include "support.hpp"

using namespace sysscale;
using namespace testsupport;

TEST_CASE("zero demand reads zero counters")
{
    SocConfig cfg = table1();
    PerfCounterSample s = sample_counters(cfg, slice(1, 0, 0), high(cfg), 3.0);
    CHECK(s.gfx_llc_misses == 0.0);
    CHECK(s.llc_occupancy_tracer == 0.0);
    CHECK(s.llc_stalls == 0.0);
    CHECK(s.io_rpq == 0.0);
    CHECK(s.timestamp_ms == 3.0);
}

TEST_CASE("counter values against hand-computed constants")
{
    SocConfig cfg = table1();
    TraceSlice s = slice(0.5, 0.3, 0.2, 8.0, 0.2, 4.0);
    PerfCounterSample hi = sample_counters(cfg, s, high(cfg));
    CHECK(hi.gfx_llc_misses == doctest::Approx(15625.0 * 0.2));
    CHECK(hi.llc_occupancy_tracer == doctest::Approx(32.0 * 8.0 / 25.6));
    CHECK(hi.llc_stalls == doctest::Approx(1000.0 * 0.3 * (40 + 12.5 + 12.5) / 100.0));
    CHECK(hi.io_rpq == doctest::Approx(16.0 * 4.0 / 16.0));

    PerfCounterSample lo = sample_counters(cfg, s, low(cfg));
    CHECK(lo.llc_occupancy_tracer > hi.llc_occupancy_tracer);
    CHECK(lo.llc_occupancy_tracer / hi.llc_occupancy_tracer ==
          doctest::Approx(1.6 / 1.06).epsilon(1e-12));
    CHECK(lo.gfx_llc_misses == hi.gfx_llc_misses);
}

TEST_CASE("self-refresh states read zero")
{
    SocConfig cfg = table1();
    TraceSlice s = slice(0.5, 0.3, 0.2, 8.0, 0.2, 4.0);
    for (auto st : {PowerState::C6, PowerState::C7, PowerState::C8}) {
        s.power_state = st;
        CHECK(sample_counters(cfg, s, high(cfg)) == PerfCounterSample{});
    }
}

TEST_CASE("counters are proportional and monotone in their demand")
{
    SocConfig cfg = table1();
    std::mt19937_64 rng(13);
    for (int i = 0; i < 2000; ++i) {
        TraceSlice s = random_slice(rng);
        PerfCounterSample a = sample_counters(cfg, s, high(cfg));
        TraceSlice d = s;
        d.gfx_bw_demand *= 2;
        CHECK(sample_counters(cfg, d, high(cfg)).gfx_llc_misses ==
              doctest::Approx(2 * a.gfx_llc_misses));
        d = s;
        d.core_bw_demand += 1.0;
        CHECK(sample_counters(cfg, d, high(cfg)).llc_occupancy_tracer > a.llc_occupancy_tracer);
        d = s;
        d.io_bw_demand += 1.0;
        CHECK(sample_counters(cfg, d, high(cfg)).io_rpq > a.io_rpq);
        d = s;
        d.frac_mem_latency += 0.01;
        CHECK(sample_counters(cfg, d, high(cfg)).llc_stalls > a.llc_stalls);
        for (double v : {a.gfx_llc_misses, a.llc_occupancy_tracer, a.llc_stalls, a.io_rpq})
            CHECK(v >= 0.0);
    }
}

TEST_CASE("noise is seeded, positive, and off by default")
{
    SocConfig cfg = table1();
    TraceSlice s = slice(0.5, 0.3, 0.2, 8.0, 0.2, 4.0);
    std::mt19937_64 r0(1);
    CHECK(sample_counters(cfg, s, high(cfg), r0) == sample_counters(cfg, s, high(cfg)));

    cfg.counters.noise_sigma = 0.2;
    std::mt19937_64 r1(99), r2(99);
    PerfCounterSample a = sample_counters(cfg, s, high(cfg), r1);
    PerfCounterSample b = sample_counters(cfg, s, high(cfg), r2);
    CHECK(a == b);
    CHECK(a != sample_counters(cfg, s, high(cfg)));
    CHECK(a.llc_stalls > 0.0);
}

TEST_CASE("window averaging")
{
    PerfCounterSample one{1.0, 2.0, 3.0, 4.0, 0.0};
    std::vector<PerfCounterSample> same(30, one);
    for (std::size_t i = 0; i < same.size(); ++i)
        same[i].timestamp_ms = double(i + 1);
    PerfCounterSample avg = average_window(same);
    CHECK(avg.gfx_llc_misses == doctest::Approx(1.0));
    CHECK(avg.io_rpq == doctest::Approx(4.0));
    CHECK(avg.timestamp_ms == 30.0);

    std::vector<PerfCounterSample> two{{0, 0, 0, 0, 1}, {2, 2, 2, 2, 2}};
    avg = average_window(two);
    CHECK(avg.gfx_llc_misses == 1.0);
    CHECK(avg.llc_stalls == 1.0);

    CHECK_THROWS_AS(average_window(std::vector<PerfCounterSample>{}), InvariantError);
}

TEST_CASE("averaging is permutation invariant")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<PerfCounterSample> w(30);
        for (auto &s : w)
            s = {u(rng), u(rng), u(rng), u(rng), 0.0};
        PerfCounterSample a = average_window(w);
        std::shuffle(w.begin(), w.end(), rng);
        PerfCounterSample b = average_window(w);
        CHECK(a.gfx_llc_misses == doctest::Approx(b.gfx_llc_misses).epsilon(1e-12));
        CHECK(a.llc_occupancy_tracer == doctest::Approx(b.llc_occupancy_tracer).epsilon(1e-12));
        CHECK(a.llc_stalls == doctest::Approx(b.llc_stalls).epsilon(1e-12));
        CHECK(a.io_rpq == doctest::Approx(b.io_rpq).epsilon(1e-12));
    }
}

TEST_CASE("CSV export")
{
    std::vector<PerfCounterSample> w{{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}};
    std::string csv = counters_to_csv(w);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("gfx_llc_misses") != std::string::npos);
}
