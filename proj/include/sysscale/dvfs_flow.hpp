#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sysscale/soc.hpp"

namespace sysscale {

enum class StepKind {
    RaiseVoltage,
    BlockAndDrain,
    EnterSelfRefresh,
    LoadMrc,
    RelockPlls,
    LowerVoltage,
    ExitSelfRefresh,
    Unblock,
};

const char *to_string(StepKind k);

struct Step {
    StepKind kind;
    std::string rail;            ///< voltage steps only
    double from_v = 0.0;         ///< voltage steps only
    double to_v = 0.0;           ///< voltage steps only
    double latency_us = 0.0;
};

struct TransitionPlan {
    OperatingPoint from;
    OperatingPoint to;
    std::vector<Step> steps;
    double total_latency_us = 0.0;
    std::string mrc_set;          ///< register set the flow installs
    bool mrc_optimized = true;    ///< false when the set targets another frequency

    /// One line per step: "<index> <kind>[ <rail> <from>V-><to>V] <latency>us".
    std::string step_log() const;
};

/// Builds the flow between two points. Voltage raises happen before the
/// clocks change and drops after; rails that move together ramp
/// concurrently, so a phase costs the largest |dV| / slew. The MRC step
/// installs the entry for to.dram_freq or, failing that, the nearest one.
/// Throws TransitionError when from == to or the bank is empty.
TransitionPlan plan_transition(const SocConfig &cfg, const OperatingPoint &from,
                               const OperatingPoint &to, const MrcBank &bank);

/// Clocks and voltages as seen after each step of `plan`; the first entry
/// is plan.from, the last is plan.to (with the plan's MRC set).
std::vector<OperatingPoint> step_states(const TransitionPlan &plan);

/// Rails whose voltage is below the requirement of their fastest running
/// clock in `op`.
std::vector<std::string> undervolted_rails(const SocConfig &cfg,
                                           const OperatingPoint &op);

/// Installed hardware state, owned by one simulation.
struct SocState {
    OperatingPoint point;
    bool mrc_optimized = true;
    double last_transition_ms = -1.0;
    int transitions = 0;
};

struct TransitionResult {
    SocState state;
    double stall_us = 0.0;
    double blocked_from_ms = 0.0;  ///< memory service gap start
    double blocked_to_ms = 0.0;
};

/// Applies `plan` at time `now_ms`. Throws TransitionError when the state's
/// point is not plan.from, or when a step boundary would leave a rail
/// undervolted.
TransitionResult execute_transition(const SocConfig &cfg, const TransitionPlan &plan,
                                    const SocState &state, double now_ms);

/// DRAM bandwidth served at time t given a service gap: zero inside the
/// window, `demand` outside.
inline double served_bandwidth(double demand_gbps, double t_ms,
                               const TransitionResult &r)
{
    return t_ms >= r.blocked_from_ms && t_ms < r.blocked_to_ms ? 0.0 : demand_gbps;
}

} // namespace sysscale
