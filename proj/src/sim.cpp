#include "sysscale/sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "sysscale/dvfs_flow.hpp"
#include "sysscale/error.hpp"

namespace sysscale {

const char *to_string(Policy p)
{
    switch (p) {
    case Policy::Baseline: return "baseline";
    case Policy::MdDvfs: return "md-dvfs";
    case Policy::SysScale: return "sysscale";
    case Policy::MemScale: return "memscale";
    case Policy::CoScale: return "coscale";
    case Policy::MemScaleRedist: return "memscale-redist";
    case Policy::CoScaleRedist: return "coscale-redist";
    }
    return "?";
}

Policy policy_from_string(const std::string &s)
{
    for (auto p : {Policy::Baseline, Policy::MdDvfs, Policy::SysScale, Policy::MemScale,
                   Policy::CoScale, Policy::MemScaleRedist, Policy::CoScaleRedist}) {
        if (s == to_string(p))
            return p;
    }
    throw ParseError("unknown policy '" + s + "'");
}

OperatingPoint memscale_low_point(const SocConfig &cfg)
{
    OperatingPoint high = operating_point(cfg, cfg.top_level());
    OperatingPoint low = operating_point(cfg, 0);
    OperatingPoint op = high;
    op.level = 0;
    op.dram_freq_ghz = low.dram_freq_ghz;
    op.mc_freq_ghz = low.mc_freq_ghz;
    op.mrc_set.reset();
    return op;
}

namespace {

constexpr double kEps = 1e-9;

/// Compute-domain activity while executing. Cores idle in C2.
ActivitySample compute_activity(WorkloadClass cls, PowerState st)
{
    ActivitySample a;
    a.power_state = st;
    if (st != PowerState::C0)
        return a;
    switch (cls) {
    case WorkloadClass::Cpu:
        a.core_utilization = 1.0;
        break;
    case WorkloadClass::Graphics:
        a.core_utilization = 0.25;
        a.gfx_utilization = 1.0;
        break;
    case WorkloadClass::BatteryLife:
        a.core_utilization = 0.5;
        a.gfx_utilization = 0.5;
        break;
    }
    return a;
}

struct PolicyShape {
    std::vector<OperatingPoint> ladder;
    MrcBank bank;
    bool governed = false;
    bool redistribute = false;
    bool coscale = false;
};

PolicyShape shape_of(Policy p, const SocConfig &cfg)
{
    PolicyShape s;
    s.bank = cfg.mrc_bank;
    std::size_t top = cfg.top_level();
    switch (p) {
    case Policy::Baseline:
        s.ladder = {operating_point(cfg, top)};
        break;
    case Policy::MdDvfs:
        s.ladder = {operating_point(cfg, 0)};
        s.redistribute = true;
        break;
    case Policy::SysScale:
        for (std::size_t l = 0; l <= top; ++l)
            s.ladder.push_back(operating_point(cfg, l));
        s.governed = true;
        s.redistribute = true;
        break;
    case Policy::MemScale:
    case Policy::CoScale:
    case Policy::MemScaleRedist:
    case Policy::CoScaleRedist: {
        OperatingPoint high = operating_point(cfg, top);
        s.ladder = {memscale_low_point(cfg), high};
        // No retraining: only the boot-time set for the top frequency.
        std::vector<MrcRegisterSet> keep;
        for (const auto &e : cfg.mrc_bank.entries()) {
            if (std::abs(e.optimized_for_ghz - high.dram_freq_ghz) <= kFreqEpsilon)
                keep.push_back(e);
        }
        s.bank = MrcBank(keep, cfg.mrc_bank.sram_budget_bytes());
        s.governed = true;
        s.coscale = p == Policy::CoScale || p == Policy::CoScaleRedist;
        break;
    }
    }
    return s;
}

std::size_t ladder_index(const std::vector<OperatingPoint> &ladder, const OperatingPoint &op)
{
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        OperatingPoint a = ladder[i];
        OperatingPoint b = op;
        a.mrc_set.reset();
        b.mrc_set.reset();
        if (a == b)
            return i;
    }
    throw InvariantError("installed point is not on the policy ladder");
}

class Engine {
  public:
    Engine(const WorkloadTrace &trace, Policy policy, const SocConfig &cfg,
           const std::optional<ThresholdSet> &thr, const SimOptions &opts)
        : trace_(trace), policy_(policy), cfg_(cfg), opts_(opts),
          shape_(shape_of(policy, cfg)), rng_(opts.seed)
    {
        if (shape_.governed) {
            if (!thr)
                throw CalibrationError(std::string(to_string(policy)) +
                                       " needs calibrated thresholds");
            governor_.emplace(cfg, *thr, shape_.ladder);
            bound_ = thr->degradation_bound;
        }
        std::size_t start = shape_.ladder.size() - 1;
        state_.point = shape_.ladder[start];
        const MrcRegisterSet *set = shape_.bank.nearest(state_.point.dram_freq_ghz);
        state_.point.mrc_set = set ? std::optional<std::string>(set->id) : std::nullopt;
        state_.mrc_optimized =
            set && std::abs(set->optimized_for_ghz - state_.point.dram_freq_ghz) <= kFreqEpsilon;
        ref_ = operating_point(cfg, cfg.top_level());
        ref_.core_freq_ghz = cfg.compute.core_pn_ghz;
        ref_.gfx_freq_ghz = cfg.compute.gfx_pn_ghz;
        top_reserve_ = reserved_io_mem_power(cfg, shape_.ladder.back(),
                                             cfg.power_coefficients, true);
    }

    SimReport run();

  private:
    void update_compute();
    void close_interval(double t, bool decide);
    void try_apply(double t, const TraceSlice &s);
    void integrate(const TraceSlice &s, double a, double b);
    OperatingPoint compute_point() const;

    const WorkloadTrace &trace_;
    Policy policy_;
    const SocConfig &cfg_;
    SimOptions opts_;
    PolicyShape shape_;
    std::mt19937_64 rng_;
    std::optional<Governor> governor_;
    double bound_ = 0.01;
    SocState state_;
    OperatingPoint ref_;
    IoMemPower top_reserve_;

    DomainBudgets budgets_;
    PStateChoice pstate_;
    std::optional<double> fc_prev_;
    std::optional<std::size_t> pending_;

    double stall_from_ = 0.0, stall_to_ = 0.0;
    double block_from_ = 0.0, block_to_ = 0.0;

    // Current interval.
    std::vector<PerfCounterSample> window_;
    double window_static_ = 0.0;
    IntervalLog cur_;
    double cur_c0_ms_ = 0.0, cur_fc_ms_ = 0.0;
    std::map<std::string, double> cur_state_ms_;

    SimReport rep_;
    double c0_ms_ = 0.0, core_ghz_ms_ = 0.0, gfx_ghz_ms_ = 0.0;
    double energy_direct_ = 0.0;
    std::map<std::string, double> state_ms_;
    std::map<std::string, double> domain_j_, rail_j_;
};

OperatingPoint Engine::compute_point() const
{
    OperatingPoint op = state_.point;
    op.core_freq_ghz = pstate_.core_freq_ghz;
    op.gfx_freq_ghz = pstate_.gfx_freq_ghz;
    const ComputeLimits &lim = cfg_.compute;
    op.rail_voltages[lim.core_rail] = rail_requirement(cfg_, lim.core_rail, op);
    op.rail_voltages[lim.gfx_rail] = rail_requirement(cfg_, lim.gfx_rail, op);
    return op;
}

void Engine::update_compute()
{
    const PowerCoefficients &coef = cfg_.power_coefficients;
    IoMemPower reserve = shape_.redistribute
                             ? reserved_io_mem_power(cfg_, state_.point, coef,
                                                     state_.mrc_optimized)
                             : top_reserve_;
    budgets_ = budgets_for(cfg_.tdp_watts, reserve);
    ActivitySample act = compute_activity(trace_.cls, PowerState::C0);

    if (opts_.pin_compute) {
        pstate_ = {};
        pstate_.core_freq_ghz = state_.point.core_freq_ghz;
        pstate_.gfx_freq_ghz = state_.point.gfx_freq_ghz;
        pstate_.power_w = compute_power_at(cfg_, coef, pstate_.core_freq_ghz,
                                           pstate_.gfx_freq_ghz, act.core_utilization,
                                           act.gfx_utilization)
                              .total();
        return;
    }
    pstate_ = select_compute_pstate(cfg_, coef, budgets_.compute_w, act, trace_.cls);
    if (shape_.coscale && fc_prev_ && pstate_.duty_cycle >= 1.0) {
        // Give up core frequency until the compute slowdown reaches the bound.
        double fc = *fc_prev_;
        double scaled = fc > 0.0 ? pstate_.core_freq_ghz * fc / (fc + bound_)
                                 : cfg_.compute.core_pn_ghz;
        double f = std::max(cfg_.compute.core_pn_ghz, scaled);
        if (f < pstate_.core_freq_ghz) {
            pstate_.core_freq_ghz = f;
            pstate_.power_w = compute_power_at(cfg_, coef, f, pstate_.gfx_freq_ghz,
                                               act.core_utilization, act.gfx_utilization)
                                  .total();
        }
    }
}

void Engine::close_interval(double t, bool decide)
{
    cur_.duration_ms = t - cur_.start_ms;
    if (!window_.empty())
        cur_.counters = average_window(window_);
    cur_.static_bw_gbps = window_static_;
    cur_.decided_level = state_.point.level;
    if (decide && governor_ && !window_.empty()) {
        std::size_t installed = ladder_index(shape_.ladder, state_.point);
        Decision d = governor_->step(cur_.counters, window_static_, installed);
        cur_.triggering = d.triggering;
        cur_.decided_level = shape_.ladder[d.target_level].level;
        if (d.target_level != installed)
            pending_ = d.target_level;
        else
            pending_.reset();
    }
    if (cur_c0_ms_ > 0.0)
        fc_prev_ = cur_fc_ms_ / cur_c0_ms_;

    cur_.level = state_.point.level;
    cur_.budgets = budgets_;
    cur_.core_freq_ghz = pstate_.core_freq_ghz;
    cur_.gfx_freq_ghz = pstate_.gfx_freq_ghz;
    cur_.duty_cycle = pstate_.duty_cycle;
    cur_.compute_cap_w = pstate_.power_w;
    if (cur_.duration_ms > 0.0) {
        double s = cur_.duration_ms / 1000.0;
        cur_.avg_power_w = cur_.energy_j / s;
        cur_.avg_compute_w /= s;
        cur_.avg_io_w /= s;
        cur_.avg_memory_w /= s;
        cur_.avg_dram_w /= s;
    }
    for (auto &[st, w] : cur_.dram_w_by_state)
        w /= cur_state_ms_[st] / 1000.0;
    rep_.intervals.push_back(cur_);

    if (shape_.coscale)
        update_compute();

    IntervalLog next;
    next.index = cur_.index + 1;
    next.start_ms = t;
    cur_ = next;
    window_.clear();
    window_static_ = 0.0;
    cur_c0_ms_ = cur_fc_ms_ = 0.0;
    cur_state_ms_.clear();
}

void Engine::try_apply(double t, const TraceSlice &s)
{
    if (!pending_ || !dram_active(s.power_state) || t < stall_to_ - kEps)
        return;
    const OperatingPoint &target = shape_.ladder[*pending_];
    TransitionPlan plan = plan_transition(cfg_, state_.point, target, shape_.bank);
    TransitionResult r = execute_transition(cfg_, plan, state_, t);
    TransitionEvent ev;
    ev.time_ms = t;
    ev.from_level = state_.point.level;
    ev.to_level = target.level;
    ev.power_state = to_string(s.power_state);
    ev.latency_us = plan.total_latency_us;
    ev.mrc_optimized = plan.mrc_optimized;
    rep_.transitions.push_back(ev);

    state_ = r.state;
    stall_from_ = t;
    stall_to_ = t + plan.total_latency_us / 1000.0;
    block_from_ = r.blocked_from_ms;
    block_to_ = r.blocked_to_ms;
    rep_.total_stall_us += r.stall_us;
    cur_.stall_us += r.stall_us;
    ++cur_.transitions;
    pending_.reset();
    update_compute();
}

void Engine::integrate(const TraceSlice &s, double a, double b)
{
    double dt_ms = b - a;
    if (dt_ms <= 0.0)
        return;
    double dt_s = dt_ms / 1000.0;
    const PowerCoefficients &coef = cfg_.power_coefficients;
    const OperatingPoint &op = state_.point;
    bool stalled = a >= stall_from_ - kEps && a < stall_to_ - kEps;
    bool blocked = a >= block_from_ - kEps && a < block_to_ - kEps;

    ActivitySample mem;
    mem.power_state = blocked ? PowerState::C8 : s.power_state;
    if (dram_active(mem.power_state)) {
        double peak = peak_bandwidth_gbps(cfg_, op);
        double served = std::min(s.total_bw_demand(), peak);
        mem.dram_read_write_bw_gbps = served;
        mem.interface_utilization = peak > 0.0 ? served / peak : 0.0;
        mem.io_engine_activity = std::min(1.0, s.io_bw_demand / io_capacity_gbps(cfg_, op));
    }

    PowerBreakdown p;
    p.dram = memory_power(cfg_, op, mem, coef, state_.mrc_optimized);
    p.mc = mc_power(op, coef) * (state_.mrc_optimized ? 1.0 : cfg_.mrc_penalty.power_factor);
    p.io_interconnect = io_domain_power(op, mem, coef);
    ActivitySample cact = compute_activity(trace_.cls, s.power_state);
    p.compute = compute_power(cfg_, compute_point(), cact, coef);
    if (s.power_state == PowerState::C0) {
        p.compute.core *= pstate_.duty_cycle;
        p.compute.gfx *= pstate_.duty_cycle;
    }

    double e = p.total() * dt_s;
    energy_direct_ += e;
    cur_.energy_j += e;
    cur_.avg_compute_w += p.compute.total() * dt_s;
    cur_.avg_io_w += p.io() * dt_s;
    cur_.avg_memory_w += p.memory() * dt_s;
    cur_.avg_dram_w += p.dram.total() * dt_s;
    std::string st = to_string(s.power_state);
    cur_.dram_w_by_state[st] += p.dram.total() * dt_s;
    cur_state_ms_[st] += dt_ms;
    state_ms_[st] += dt_ms;
    if (dram_active(s.power_state))
        cur_.dvfs_eligible = true;

    domain_j_["compute"] += p.compute.total() * dt_s;
    domain_j_["io"] += p.io() * dt_s;
    domain_j_["memory"] += p.memory() * dt_s;
    for (const auto &[rail, w] : p.by_rail(cfg_.compute))
        rail_j_[rail] += w * dt_s;

    if (s.power_state == PowerState::C0) {
        c0_ms_ += dt_ms;
        cur_c0_ms_ += dt_ms;
        cur_fc_ms_ += s.frac_compute * dt_ms;
        core_ghz_ms_ += pstate_.effective_core_ghz() * dt_ms;
        gfx_ghz_ms_ += pstate_.effective_gfx_ghz() * dt_ms;
        if (!stalled) {
            OperatingPoint eff = op;
            eff.core_freq_ghz = pstate_.effective_core_ghz();
            eff.gfx_freq_ghz = pstate_.effective_gfx_ghz();
            rep_.work += dt_ms * relative_performance(cfg_, s, eff, ref_,
                                                      state_.mrc_optimized, trace_.cls);
        }
    }
}

SimReport Engine::run()
{
    rep_.trace = trace_.name;
    rep_.policy = to_string(policy_);
    rep_.seed = opts_.seed;
    rep_.tdp_watts = cfg_.tdp_watts;
    update_compute();

    const auto &slices = trace_.slices;
    std::vector<double> ends(slices.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        acc += slices[i].duration_ms;
        ends[i] = acc;
    }
    const double total = acc;
    const double period = cfg_.sample_period_ms;
    const auto per_interval = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg_.evaluation_interval_ms / period)));

    double t = 0.0;
    std::size_t i = 0;
    std::size_t k = 0;
    while (t < total - kEps) {
        while (i + 1 < slices.size() && ends[i] <= t + kEps)
            ++i;
        const TraceSlice &s = slices[i];
        double tk = static_cast<double>(k) * period;
        if (t >= tk - kEps) {
            if (k > 0 && k % per_interval == 0)
                close_interval(t, true);
            try_apply(t, s);
            window_.push_back(sample_counters(cfg_, s, state_.point, rng_, t));
            if (dram_active(s.power_state))
                window_static_ = std::max(
                    window_static_,
                    static_demand(s.peripheral_config, cfg_.static_demand_table));
            ++k;
        }
        double end = std::min(total, static_cast<double>(k) * period);
        if (ends[i] > t + kEps)
            end = std::min(end, ends[i]);
        for (double edge : {stall_to_, block_from_, block_to_}) {
            if (edge > t + kEps)
                end = std::min(end, edge);
        }
        integrate(s, t, end);
        t = end;
    }
    if (t > 0.0 || !window_.empty())
        close_interval(t, false);

    rep_.wall_time_s = total / 1000.0;
    double sum = 0.0;
    for (const auto &iv : rep_.intervals)
        sum += iv.energy_j;
    rep_.total_energy_j = sum;
    rep_.transitions_count = static_cast<int>(rep_.transitions.size());
    if (rep_.wall_time_s > 0.0) {
        rep_.avg_power_w = rep_.total_energy_j / rep_.wall_time_s;
        for (const auto &[d, j] : domain_j_)
            rep_.avg_power_by_domain[d] = j / rep_.wall_time_s;
        for (const auto &[r, j] : rail_j_)
            rep_.avg_power_by_rail[r] = j / rep_.wall_time_s;
        for (const auto &[st, ms] : state_ms_)
            rep_.c_state_residencies[st] = ms / total;
    }
    if (c0_ms_ > 0.0) {
        rep_.avg_core_freq_ghz = core_ghz_ms_ / c0_ms_;
        rep_.avg_gfx_freq_ghz = gfx_ghz_ms_ / c0_ms_;
    }
    if (!opts_.record_intervals)
        rep_.intervals.clear();
    return rep_;
}

void finish(SimReport &r)
{
    r.delay_s = r.performance_ratio > 0.0 ? r.wall_time_s / r.performance_ratio : 0.0;
    r.edp = edp(r.total_energy_j, r.delay_s);
}

double mean_c0_scalability(const WorkloadTrace &trace)
{
    double ms = 0.0, acc = 0.0;
    for (const auto &s : trace.slices) {
        if (s.power_state != PowerState::C0)
            continue;
        ms += s.duration_ms;
        acc += s.cpu_scalability * s.duration_ms;
    }
    return ms > 0.0 ? acc / ms : 0.0;
}

} // namespace

SimReport simulate(const WorkloadTrace &trace, Policy policy, const SocConfig &cfg,
                   const std::optional<ThresholdSet> &thr, const SimOptions &opts)
{
    if (cfg.levels.empty())
        throw ConfigError("no operating levels configured");
    validate_trace(trace);

    Policy run_as = policy;
    if (policy == Policy::MemScaleRedist)
        run_as = Policy::MemScale;
    if (policy == Policy::CoScaleRedist)
        run_as = Policy::CoScale;

    SimReport rep = Engine(trace, run_as, cfg, thr, opts).run();
    rep.policy = to_string(policy);

    if (policy == Policy::Baseline) {
        rep.baseline_work = rep.work;
        rep.performance_ratio = 1.0;
        finish(rep);
        return rep;
    }

    SimOptions base_opts = opts;
    base_opts.record_intervals = false;
    SimReport base = Engine(trace, Policy::Baseline, cfg, std::nullopt, base_opts).run();
    rep.baseline_work = base.work;
    rep.performance_ratio = base.work > 0.0 ? rep.work / base.work : 1.0;

    if (policy == Policy::MemScaleRedist || policy == Policy::CoScaleRedist) {
        bool gfx = trace.cls == WorkloadClass::Graphics;
        const ComputeLimits &lim = cfg.compute;
        double ghz_per_w = gfx ? lim.gfx_ghz_per_watt : lim.core_ghz_per_watt;
        double f_base = gfx ? base.avg_gfx_freq_ghz : base.avg_core_freq_ghz;
        double f_max = gfx ? lim.gfx_max_ghz : lim.core_max_ghz;
        double saving = std::max(0.0, base.avg_power_w - rep.avg_power_w);
        double headroom_w = ghz_per_w > 0.0 ? std::max(0.0, f_max - f_base) / ghz_per_w : 0.0;
        // Battery-life runs keep compute at Pn; nothing to spend the saving on.
        double spent = trace.cls == WorkloadClass::BatteryLife ? 0.0
                                                               : std::min(saving, headroom_w);
        rep.projected_gain =
            project_perf_boost(spent, ghz_per_w, mean_c0_scalability(trace), f_base);
        rep.performance_ratio *= 1.0 + rep.projected_gain;
        // The saving is spent on compute, so it shows up as energy again.
        if (spent > 0.0) {
            for (auto &iv : rep.intervals) {
                iv.energy_j += spent * iv.duration_ms / 1000.0;
                iv.avg_power_w += spent;
                iv.avg_compute_w += spent;
            }
            rep.total_energy_j += spent * rep.wall_time_s;
            rep.avg_power_w += spent;
            rep.avg_power_by_domain["compute"] += spent;
            rep.avg_power_by_rail[gfx ? lim.gfx_rail : lim.core_rail] += spent;
        }
    }
    finish(rep);
    return rep;
}

std::vector<SimReport> compare_policies(const WorkloadTrace &trace, const SocConfig &cfg,
                                        const std::optional<ThresholdSet> &thr,
                                        std::span<const Policy> policies,
                                        const SimOptions &opts)
{
    std::vector<SimReport> out;
    for (Policy p : policies)
        out.push_back(simulate(trace, p, cfg, thr, opts));
    return out;
}

void to_json(json &j, const SimReport &r)
{
    j = json::object();
    j["trace"] = r.trace;
    j["policy"] = r.policy;
    j["seed"] = r.seed;
    j["tdp_watts"] = r.tdp_watts;
    j["wall_time_s"] = r.wall_time_s;
    j["total_energy_j"] = r.total_energy_j;
    j["avg_power_w"] = {{"soc", r.avg_power_w},
                        {"domain", r.avg_power_by_domain},
                        {"rail", r.avg_power_by_rail}};
    j["work"] = r.work;
    j["baseline_work"] = r.baseline_work;
    j["performance_ratio"] = r.performance_ratio;
    j["projected_gain"] = r.projected_gain;
    j["delay_s"] = r.delay_s;
    j["edp"] = r.edp;
    j["transitions_count"] = r.transitions_count;
    j["total_stall_us"] = r.total_stall_us;
    j["avg_core_freq_ghz"] = r.avg_core_freq_ghz;
    j["avg_gfx_freq_ghz"] = r.avg_gfx_freq_ghz;
    j["c_state_residencies"] = r.c_state_residencies;

    j["transitions"] = json::array();
    for (const auto &t : r.transitions)
        j["transitions"].push_back({{"time_ms", t.time_ms},
                                    {"from_level", t.from_level},
                                    {"to_level", t.to_level},
                                    {"power_state", t.power_state},
                                    {"latency_us", t.latency_us},
                                    {"mrc_optimized", t.mrc_optimized}});
    j["intervals"] = json::array();
    for (const auto &iv : r.intervals) {
        json trig = json::array();
        for (auto c : iv.triggering)
            trig.push_back(to_string(c));
        j["intervals"].push_back(
            {{"index", iv.index},
             {"start_ms", iv.start_ms},
             {"duration_ms", iv.duration_ms},
             {"level", iv.level},
             {"decided_level", iv.decided_level},
             {"dvfs_eligible", iv.dvfs_eligible},
             {"counters",
              {{"gfx_llc_misses", iv.counters.gfx_llc_misses},
               {"llc_occupancy_tracer", iv.counters.llc_occupancy_tracer},
               {"llc_stalls", iv.counters.llc_stalls},
               {"io_rpq", iv.counters.io_rpq}}},
             {"static_bw_gbps", iv.static_bw_gbps},
             {"triggering", trig},
             {"budgets",
              {{"compute_w", iv.budgets.compute_w},
               {"io_w", iv.budgets.io_w},
               {"memory_w", iv.budgets.memory_w}}},
             {"core_freq_ghz", iv.core_freq_ghz},
             {"gfx_freq_ghz", iv.gfx_freq_ghz},
             {"duty_cycle", iv.duty_cycle},
             {"compute_cap_w", iv.compute_cap_w},
             {"energy_j", iv.energy_j},
             {"avg_power_w", iv.avg_power_w},
             {"avg_compute_w", iv.avg_compute_w},
             {"avg_io_w", iv.avg_io_w},
             {"avg_memory_w", iv.avg_memory_w},
             {"avg_dram_w", iv.avg_dram_w},
             {"dram_w_by_state", iv.dram_w_by_state},
             {"transitions", iv.transitions},
             {"stall_us", iv.stall_us}});
    }
}

std::string report_to_json(const SimReport &r)
{
    json j = r;
    return j.dump(2) + "\n";
}

std::string intervals_to_csv(const SimReport &r)
{
    std::ostringstream out;
    out << std::setprecision(17);
    out << "index,start_ms,duration_ms,level,decided_level,dvfs_eligible,"
           "gfx_llc_misses,llc_occupancy_tracer,llc_stalls,io_rpq,static_bw_gbps,"
           "compute_budget_w,io_budget_w,memory_budget_w,core_freq_ghz,gfx_freq_ghz,"
           "duty_cycle,energy_j,avg_power_w,avg_compute_w,avg_io_w,avg_memory_w,"
           "avg_dram_w,transitions,stall_us\n";
    for (const auto &iv : r.intervals) {
        out << iv.index << ',' << iv.start_ms << ',' << iv.duration_ms << ',' << iv.level
            << ',' << iv.decided_level << ',' << (iv.dvfs_eligible ? 1 : 0) << ','
            << iv.counters.gfx_llc_misses << ',' << iv.counters.llc_occupancy_tracer << ','
            << iv.counters.llc_stalls << ',' << iv.counters.io_rpq << ','
            << iv.static_bw_gbps << ',' << iv.budgets.compute_w << ',' << iv.budgets.io_w
            << ',' << iv.budgets.memory_w << ',' << iv.core_freq_ghz << ','
            << iv.gfx_freq_ghz << ',' << iv.duty_cycle << ',' << iv.energy_j << ','
            << iv.avg_power_w << ',' << iv.avg_compute_w << ',' << iv.avg_io_w << ','
            << iv.avg_memory_w << ',' << iv.avg_dram_w << ',' << iv.transitions << ','
            << iv.stall_us << '\n';
    }
    return out.str();
}

std::string comparison_to_csv(std::span<const SimReport> reports)
{
    std::ostringstream out;
    out << std::setprecision(10);
    out << "metric";
    for (const auto &r : reports)
        out << ',' << r.policy;
    out << '\n';
    auto row = [&](const char *name, auto get) {
        out << name;
        for (const auto &r : reports)
            out << ',' << get(r);
        out << '\n';
    };
    row("performance_ratio", [](const SimReport &r) { return r.performance_ratio; });
    row("avg_power_w", [](const SimReport &r) { return r.avg_power_w; });
    row("total_energy_j", [](const SimReport &r) { return r.total_energy_j; });
    row("edp", [](const SimReport &r) { return r.edp; });
    row("projected_gain", [](const SimReport &r) { return r.projected_gain; });
    row("transitions", [](const SimReport &r) { return r.transitions_count; });
    row("stall_us", [](const SimReport &r) { return r.total_stall_us; });
    row("avg_core_freq_ghz", [](const SimReport &r) { return r.avg_core_freq_ghz; });
    row("avg_gfx_freq_ghz", [](const SimReport &r) { return r.avg_gfx_freq_ghz; });
    return out.str();
}

double slice_degradation(const SocConfig &cfg, const TraceSlice &slice,
                         const OperatingPoint &high, const OperatingPoint &low,
                         WorkloadClass cls)
{
    return 1.0 - relative_performance(cfg, slice, low, high, true, cls);
}

double trace_degradation(const SocConfig &cfg, const WorkloadTrace &trace,
                         const OperatingPoint &high, const OperatingPoint &low)
{
    double d = 0.0, slowed = 0.0;
    for (const auto &s : trace.slices) {
        if (s.power_state != PowerState::C0)
            continue;
        double r = relative_performance(cfg, s, low, high, true, trace.cls);
        d += s.duration_ms;
        slowed += s.duration_ms / r;
    }
    return slowed > 0.0 ? 1.0 - d / slowed : 0.0;
}

std::size_t oracle_decide(const SocConfig &cfg, const TraceSlice &slice,
                          const OperatingPoint &high, const OperatingPoint &low,
                          double bound, WorkloadClass cls)
{
    return slice_degradation(cfg, slice, high, low, cls) < bound ? low.level : high.level;
}

} // namespace sysscale
