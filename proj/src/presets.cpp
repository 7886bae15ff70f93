#include "sysscale/presets.hpp"

namespace sysscale {

SocConfig skylake_like_config()
{
    SocConfig cfg;
    cfg.name = "skylake-like";
    cfg.tdp_watts = 4.5;

    cfg.rails = {
        {kRailSa, 0.40, 0.50, 50.0},
        {kRailVddq, 1.20, 1.20, 50.0},
        {kRailIo, 0.595, 0.70, 50.0},
        {"V_CORE", 0.65, 1.10, 50.0},
        {"V_GFX", 0.65, 1.05, 50.0},
    };
    cfg.domains = {
        {"memory-controller", DomainKind::Memory, kRailSa, ClockId::MemoryController},
        {"io-interconnect", DomainKind::Io, kRailSa, ClockId::IoInterconnect},
        {"io-controllers", DomainKind::Io, kRailSa, ClockId::IoInterconnect},
        {"ddrio-digital", DomainKind::Memory, kRailIo, ClockId::Dram},
        {"io-interfaces", DomainKind::Io, kRailIo, ClockId::IoInterconnect},
        {"dram", DomainKind::Memory, kRailVddq, ClockId::Dram},
        {"ddrio-analog", DomainKind::Memory, kRailVddq, ClockId::Dram},
        {"cores", DomainKind::Compute, "V_CORE", ClockId::Core},
        {"graphics", DomainKind::Compute, "V_GFX", ClockId::Gfx},
    };
    cfg.dram_freq_bins_ghz = {0.8, 1.06, 1.6};
    cfg.vf_curves = {
        {kRailSa, VfCurve({{0.53, 0.40}, {0.80, 0.50}})},
        {kRailIo, VfCurve({{1.06, 0.595}, {1.60, 0.70}})},
        {"V_CORE", VfCurve({{0.80, 0.65}, {3.10, 1.10}})},
        {"V_GFX", VfCurve({{0.30, 0.65}, {1.00, 1.05}})},
    };

    PowerCoefficients &k = cfg.power_coefficients;
    // Memory and IO terms as fitted against data/targets/ratio-anchors.json.
    k.k_bg = 0.084;
    k.p_refresh = 0.0112;
    k.e_array = 0.28e-9;
    k.k_term = 0.14;
    k.k_io_ddr = 0.14;
    k.k_mc_dyn = 0.84;
    k.k_mc_static = 0.112;
    k.k_ic_dyn = 0.84;
    k.k_core_dyn = 2.5;
    k.k_core_leak = 1.5;
    k.k_gfx_dyn = 2.0;
    k.k_gfx_leak = 0.2;

    cfg.levels = {
        {1.06, 0.4, 1.2, 0.3, {}},
        {1.60, 0.8, 1.2, 0.3, {}},
    };
    cfg.mrc_bank = MrcBank({{"mrc-1600", 1.6, std::vector<std::uint8_t>(256)},
                            {"mrc-1067", 1.06, std::vector<std::uint8_t>(256)}},
                           512);

    // 17% and 70% of the 25.6GB/s peak for HD and 4K panels at 60Hz.
    cfg.static_demand_table = {
        {"display", "HD", 0.17 * 25.6, 60.0},
        {"display", "FHD", 0.30 * 25.6, 60.0},
        {"display", "4K", 0.70 * 25.6, 60.0},
        {"camera", "HD", 0.6, 30.0},
        {"camera", "FHD", 1.2, 30.0},
    };
    return cfg;
}

} // namespace sysscale
