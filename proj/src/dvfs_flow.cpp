#include "sysscale/dvfs_flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "sysscale/error.hpp"

namespace sysscale {

const char *to_string(StepKind k)
{
    switch (k) {
    case StepKind::RaiseVoltage: return "raise_voltage";
    case StepKind::BlockAndDrain: return "block_and_drain";
    case StepKind::EnterSelfRefresh: return "enter_self_refresh";
    case StepKind::LoadMrc: return "load_mrc";
    case StepKind::RelockPlls: return "relock_plls";
    case StepKind::LowerVoltage: return "lower_voltage";
    case StepKind::ExitSelfRefresh: return "exit_self_refresh";
    case StepKind::Unblock: return "unblock";
    }
    return "?";
}

namespace {

// Voltages are compared at microvolt resolution so that, for example,
// 0.5V -> 0.4V is exactly 100mV.
double delta_mv(double from_v, double to_v)
{
    return std::round(std::abs(to_v - from_v) * 1e6) / 1e3;
}

bool is_voltage_step(StepKind k)
{
    return k == StepKind::RaiseVoltage || k == StepKind::LowerVoltage;
}

} // namespace

std::string TransitionPlan::step_log() const
{
    std::ostringstream out;
    out << std::setprecision(6);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const Step &s = steps[i];
        out << i << ' ' << to_string(s.kind);
        if (is_voltage_step(s.kind))
            out << ' ' << s.rail << ' ' << s.from_v << "V->" << s.to_v << 'V';
        if (s.kind == StepKind::LoadMrc)
            out << ' ' << mrc_set << (mrc_optimized ? "" : " (unoptimized)");
        out << ' ' << s.latency_us << "us\n";
    }
    out << "total " << total_latency_us << "us\n";
    return out.str();
}

TransitionPlan plan_transition(const SocConfig &cfg, const OperatingPoint &from,
                               const OperatingPoint &to, const MrcBank &bank)
{
    if (from == to)
        throw TransitionError("transition from a point to itself");
    const MrcRegisterSet *set = bank.nearest(to.dram_freq_ghz);
    if (!set)
        throw TransitionError("MRC bank is empty");

    TransitionPlan plan;
    plan.from = from;
    plan.to = to;
    plan.mrc_set = set->id;
    plan.mrc_optimized = std::abs(set->optimized_for_ghz - to.dram_freq_ghz) <= kFreqEpsilon;
    plan.to.mrc_set = set->id;

    std::set<std::string> rails;
    for (const auto &[r, v] : from.rail_voltages)
        rails.insert(r);
    for (const auto &[r, v] : to.rail_voltages)
        rails.insert(r);

    std::vector<Step> raises, drops;
    for (const auto &r : rails) {
        auto fv = from.rail_voltages.find(r);
        auto tv = to.rail_voltages.find(r);
        if (fv == from.rail_voltages.end() || tv == to.rail_voltages.end())
            throw TransitionError("rail " + r + " missing from one endpoint");
        double mv = delta_mv(fv->second, tv->second);
        if (mv == 0.0)
            continue;
        const VoltageRail *spec = cfg.find_rail(r);
        double slew = spec ? spec->slew_rate_mv_per_us : 50.0;
        Step s{tv->second > fv->second ? StepKind::RaiseVoltage : StepKind::LowerVoltage,
               r, fv->second, tv->second, mv / slew};
        (s.kind == StepKind::RaiseVoltage ? raises : drops).push_back(s);
    }

    // Rails sharing a phase ramp together: the slowest one sets the phase
    // latency and the others cost nothing extra.
    auto add_phase = [&plan](std::vector<Step> &phase) {
        std::stable_sort(phase.begin(), phase.end(), [](const Step &a, const Step &b) {
            return a.latency_us > b.latency_us;
        });
        for (std::size_t i = 1; i < phase.size(); ++i)
            phase[i].latency_us = 0.0;
        plan.steps.insert(plan.steps.end(), phase.begin(), phase.end());
    };

    const TransitionLatencies &lat = cfg.transition;
    add_phase(raises);
    plan.steps.push_back({StepKind::BlockAndDrain, {}, 0, 0, lat.drain_us});
    plan.steps.push_back({StepKind::EnterSelfRefresh, {}, 0, 0, 0.0});
    plan.steps.push_back({StepKind::LoadMrc, {}, 0, 0, lat.mrc_load_us});
    plan.steps.push_back({StepKind::RelockPlls, {}, 0, 0, lat.firmware_us});
    add_phase(drops);
    plan.steps.push_back({StepKind::ExitSelfRefresh, {}, 0, 0, lat.self_refresh_exit_us});
    plan.steps.push_back({StepKind::Unblock, {}, 0, 0, 0.0});

    for (const auto &s : plan.steps)
        plan.total_latency_us += s.latency_us;
    return plan;
}

std::vector<OperatingPoint> step_states(const TransitionPlan &plan)
{
    std::vector<OperatingPoint> states;
    OperatingPoint cur = plan.from;
    states.push_back(cur);
    for (const auto &s : plan.steps) {
        switch (s.kind) {
        case StepKind::RaiseVoltage:
        case StepKind::LowerVoltage:
            cur.rail_voltages[s.rail] = s.to_v;
            break;
        case StepKind::LoadMrc:
            cur.mrc_set = plan.mrc_set;
            break;
        case StepKind::RelockPlls:
            cur.level = plan.to.level;
            cur.dram_freq_ghz = plan.to.dram_freq_ghz;
            cur.mc_freq_ghz = plan.to.mc_freq_ghz;
            cur.io_interconnect_freq_ghz = plan.to.io_interconnect_freq_ghz;
            cur.core_freq_ghz = plan.to.core_freq_ghz;
            cur.gfx_freq_ghz = plan.to.gfx_freq_ghz;
            break;
        default:
            break;
        }
        states.push_back(cur);
    }
    return states;
}

std::vector<std::string> undervolted_rails(const SocConfig &cfg,
                                           const OperatingPoint &op)
{
    std::vector<std::string> bad;
    for (const auto &[rail, v] : op.rail_voltages) {
        // Same microvolt resolution as the plan.
        double need = rail_requirement(cfg, rail, op);
        if (std::round(v * 1e6) < std::round(need * 1e6))
            bad.push_back(rail);
    }
    return bad;
}

TransitionResult execute_transition(const SocConfig &cfg, const TransitionPlan &plan,
                                    const SocState &state, double now_ms)
{
    OperatingPoint installed = state.point;
    OperatingPoint expected = plan.from;
    installed.mrc_set.reset();
    expected.mrc_set.reset();
    if (!(installed == expected))
        throw TransitionError("stale plan: installed point is level " +
                              std::to_string(state.point.level) + ", plan starts at level " +
                              std::to_string(plan.from.level));

    std::vector<OperatingPoint> states = step_states(plan);
    for (std::size_t i = 0; i < states.size(); ++i) {
        auto bad = undervolted_rails(cfg, states[i]);
        if (!bad.empty())
            throw TransitionError("rail " + bad.front() + " undervolted after step " +
                                  std::to_string(i));
    }

    TransitionResult r;
    r.state = state;
    r.state.point = plan.to;
    r.state.mrc_optimized = plan.mrc_optimized;
    r.state.last_transition_ms = now_ms;
    r.state.transitions = state.transitions + 1;
    r.stall_us = plan.total_latency_us;

    double before_block = 0.0;
    for (const auto &s : plan.steps) {
        if (s.kind == StepKind::BlockAndDrain)
            break;
        before_block += s.latency_us;
    }
    r.blocked_from_ms = now_ms + before_block / 1000.0;
    r.blocked_to_ms = now_ms + plan.total_latency_us / 1000.0;
    return r;
}

} // namespace sysscale
