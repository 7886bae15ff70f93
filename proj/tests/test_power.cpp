#include <doctest.h>

#include <random>
#include <vector>

#include "sysscale/error.hpp"
#include "sysscale/power.hpp"
#include "support.hpp"

using namespace sysscale;
using namespace testsupport;

namespace {

ActivitySample active(double bw_gbps, double util)
{
    ActivitySample a;
    a.dram_read_write_bw_gbps = bw_gbps;
    a.interface_utilization = util;
    return a;
}

} // namespace

TEST_CASE("background power is linear in DRAM frequency")
{
    SocConfig cfg = table1();
    const auto &k = cfg.power_coefficients;
    OperatingPoint op = high(cfg);
    double full = memory_power(cfg, op, active(0, 0), k, true).background;
    op.dram_freq_ghz /= 2;
    double half = memory_power(cfg, op, active(0, 0), k, true).background;
    CHECK(half - k.p_refresh == doctest::Approx((full - k.p_refresh) / 2).epsilon(1e-12));

    op.dram_freq_ghz = 0.0;
    MemoryPower p = memory_power(cfg, op, active(0, 0), k, true);
    CHECK(p.background == k.p_refresh);
    CHECK(p.total() == k.p_refresh);
}

TEST_CASE("termination follows utilization at the same served bandwidth")
{
    SocConfig cfg = table1();
    const auto &k = cfg.power_coefficients;
    OperatingPoint hi = high(cfg), lo = low(cfg);
    double bw = 8.0;
    double t_hi = memory_power(cfg, hi, active(bw, bw / (16.0 * 1.6)), k, true).termination;
    double t_lo = memory_power(cfg, lo, active(bw, bw / (16.0 * 1.06)), k, true).termination;
    CHECK(t_lo / t_hi == doctest::Approx(1.6 / 1.06).epsilon(1e-12));
}

TEST_CASE("self-refresh leaves refresh power only")
{
    SocConfig cfg = table1();
    const auto &k = cfg.power_coefficients;
    for (auto s : {PowerState::C6, PowerState::C7, PowerState::C8}) {
        ActivitySample a;
        a.power_state = s;
        MemoryPower p = memory_power(cfg, high(cfg), a, k, true);
        CHECK(p.total() == k.p_refresh);
        CHECK(compute_power(cfg, high(cfg), a, k).total() == 0.0);
    }
}

TEST_CASE("memory-controller power: V^2 f dynamic term")
{
    SocConfig cfg = table1();
    PowerCoefficients k = cfg.power_coefficients;
    OperatingPoint hi = high(cfg), lo = low(cfg);
    auto dyn = [&](const OperatingPoint &op) {
        double v = op.voltage(kRailSa);
        return mc_power(op, k) - k.k_mc_static * v * k.temperature_factor;
    };
    CHECK(dyn(lo) / dyn(hi) == doctest::Approx(0.8 * 0.8 * 1.06 / 1.6).epsilon(1e-12));
    CHECK(dyn(lo) / dyn(hi) == doctest::Approx(0.424).epsilon(1e-9));

    OperatingPoint still = hi;
    still.mc_freq_ghz = 0.0;
    CHECK(mc_power(still, k) == doctest::Approx(k.k_mc_static * hi.voltage(kRailSa)));

    k.temperature_factor = 2.0;
    CHECK(mc_power(still, k) == doctest::Approx(2 * k.k_mc_static * hi.voltage(kRailSa)));
}

TEST_CASE("interconnect and compute terms")
{
    SocConfig cfg = table1();
    const auto &k = cfg.power_coefficients;
    OperatingPoint hi = high(cfg), lo = low(cfg);
    ActivitySample a;
    CHECK(io_domain_power(lo, a, k) / io_domain_power(hi, a, k) ==
          doctest::Approx(0.32).epsilon(1e-12));
    OperatingPoint half = hi;
    half.io_interconnect_freq_ghz /= 2;
    CHECK(io_domain_power(half, a, k) == doctest::Approx(io_domain_power(hi, a, k) / 2));

    a.core_utilization = 0.0;
    a.gfx_utilization = 0.0;
    ComputePower idle = compute_power(cfg, hi, a, k);
    CHECK(idle.core == doctest::Approx(k.k_core_leak * hi.voltage("V_CORE")));
    CHECK(idle.gfx == doctest::Approx(k.k_gfx_leak * hi.voltage("V_GFX")));

    a.core_utilization = 1.0;
    double v = hi.voltage("V_CORE");
    CHECK(compute_power(cfg, hi, a, k).core ==
          doctest::Approx(k.k_core_dyn * v * v * hi.core_freq_ghz + k.k_core_leak * v));
}

TEST_CASE("energy and EDP")
{
    std::vector<PowerSlice> s{{4.5, 2.0}};
    CHECK(energy(s) == 9.0);
    CHECK(edp(energy(s), 2.0) == 18.0);
    CHECK(energy(std::vector<PowerSlice>{}) == 0.0);
    CHECK(energy(std::vector<PowerSlice>{{4, 1}, {5, 1}}) == 9.0);
    CHECK_THROWS_AS(energy(std::vector<PowerSlice>{{4, -1}}), InvariantError);
}

TEST_CASE("unoptimized register penalty")
{
    auto [p, f] = mrc_penalty(1.0, 1.0);
    CHECK(p == doctest::Approx(1.22));
    CHECK(f == doctest::Approx(0.90));
    auto [p0, f0] = mrc_penalty(0.0, 1.0);
    CHECK(p0 == 0.0);
    CHECK(f0 == doctest::Approx(0.90));
    auto [bp, bf] = mrc_penalty_inverse(p, f);
    CHECK(bp == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bf == doctest::Approx(1.0).epsilon(1e-15));

    SocConfig cfg = table1();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        OperatingPoint op = i % 2 ? high(cfg) : low(cfg);
        double peak = 16.0 * op.dram_freq_ghz;
        double util = u(rng);
        ActivitySample a = active(util * peak, util);
        a.core_utilization = u(rng);
        auto opt = soc_power(cfg, op, a, cfg.power_coefficients, true);
        auto raw = soc_power(cfg, op, a, cfg.power_coefficients, false);
        CHECK(raw.memory() == doctest::Approx(1.22 * opt.memory()).epsilon(1e-12));
        CHECK(raw.io() == opt.io());
        CHECK(raw.compute.total() == opt.compute.total());
    }
}

TEST_CASE("power is monotone in voltage, frequency and activity")
{
    SocConfig cfg = table1();
    const auto &k = cfg.power_coefficients;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        OperatingPoint op = high(cfg);
        op.dram_freq_ghz = 0.8 + 0.8 * u(rng);
        op.mc_freq_ghz = op.dram_freq_ghz / 2;
        op.io_interconnect_freq_ghz = 0.2 + 0.6 * u(rng);
        op.core_freq_ghz = 0.8 + 2.3 * u(rng);
        for (auto &[rail, v] : op.rail_voltages)
            v *= 0.8 + 0.2 * u(rng);
        ActivitySample a = active(10 * u(rng), u(rng));
        a.core_utilization = u(rng);
        a.gfx_utilization = u(rng);
        double base = soc_power(cfg, op, a, k, true).total();

        OperatingPoint up = op;
        switch (i % 5) {
        case 0: up.dram_freq_ghz *= 1.1; break;
        case 1: up.io_interconnect_freq_ghz *= 1.1; break;
        case 2: up.core_freq_ghz *= 1.1; break;
        case 3: up.mc_freq_ghz *= 1.1; break;
        case 4: {
            auto it = up.rail_voltages.begin();
            std::advance(it, static_cast<long>(rng() % up.rail_voltages.size()));
            it->second *= 1.05;
            break;
        }
        }
        CHECK(soc_power(cfg, up, a, k, true).total() >= base);

        ActivitySample more = a;
        more.dram_read_write_bw_gbps += 1.0;
        more.interface_utilization = std::min(1.0, a.interface_utilization + 0.1);
        more.core_utilization = std::min(1.0, a.core_utilization + 0.1);
        more.gfx_utilization = std::min(1.0, a.gfx_utilization + 0.1);
        CHECK(soc_power(cfg, op, more, k, true).total() >= base);
    }
}

TEST_CASE("memory plus IO power is lower at the low point for any activity")
{
    SocConfig cfg = table1();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    OperatingPoint hi = high(cfg), lo = low(cfg);
    for (int i = 0; i < 1000; ++i) {
        double bw = 17.0 * u(rng);
        auto ph = soc_power(cfg, hi, active(bw, bw / 25.6), cfg.power_coefficients, true);
        auto pl = soc_power(cfg, lo, active(bw, bw / 16.96), cfg.power_coefficients, true);
        CHECK(pl.memory() + pl.io() < ph.memory() + ph.io());
    }
}

TEST_CASE("rail view adds up to the total")
{
    SocConfig cfg = table1();
    ActivitySample a = active(5, 0.2);
    a.core_utilization = 0.7;
    auto b = soc_power(cfg, high(cfg), a, cfg.power_coefficients, true);
    double sum = 0.0;
    for (const auto &[rail, w] : b.by_rail(cfg.compute))
        sum += w;
    CHECK(sum == doctest::Approx(b.total()).epsilon(1e-12));
}

TEST_CASE("activity checks")
{
    ActivitySample a;
    a.core_utilization = 1.5;
    CHECK_THROWS_AS(check_activity(a), InvariantError);
    a = {};
    a.power_state = PowerState::C8;
    a.dram_read_write_bw_gbps = 1.0;
    CHECK_THROWS_AS(check_activity(a), InvariantError);
    CHECK(power_state_from_string("C2") == PowerState::C2);
    CHECK_THROWS_AS(power_state_from_string("C3"), ParseError);
}
