// simctl: command-line front end for the simulator.
//
// Every failure prints one JSON object {"error": <code>, "message": ...}
// on stderr. Exit status 2 is a usage error, 1 a library error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sysscale/calib.hpp"
#include "sysscale/corpus.hpp"
#include "sysscale/error.hpp"
#include "sysscale/json_io.hpp"
#include "sysscale/presets.hpp"
#include "sysscale/sim.hpp"

using namespace sysscale;
namespace fs = std::filesystem;

namespace {

int fail(const std::string &code, const std::string &message, int status)
{
    std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
    return status;
}

void emit(const std::string &out, const std::string &text)
{
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text_file(out, text);
}

struct ModelOpts {
    std::string cfg;
    std::string coef;
    std::string thr;
    double tdp = 0.0;
};

void add_model_opts(CLI::App *sub, ModelOpts &m, bool with_thr)
{
    sub->add_option("--cfg", m.cfg, "SoC config (default: built-in skylake-like)");
    sub->add_option("--coef", m.coef, "power coefficients from calibrate-power");
    sub->add_option("--tdp", m.tdp, "override the config TDP, W");
    if (with_thr)
        sub->add_option("--thr", m.thr, "thresholds from calibrate-thresholds");
}

SocConfig model_config(const ModelOpts &m)
{
    SocConfig cfg = m.cfg.empty() ? skylake_like_config() : load_config(m.cfg);
    if (!m.coef.empty()) {
        json j = read_json_file(m.coef);
        try {
            cfg.power_coefficients =
                j.contains("power_coefficients")
                    ? j.at("power_coefficients").get<PowerCoefficients>()
                    : j.get<PowerCoefficients>();
        } catch (const json::exception &e) {
            throw ParseError(m.coef + ": " + e.what());
        }
    }
    if (m.tdp > 0.0)
        cfg.tdp_watts = m.tdp;
    auto report = validate_config(cfg);
    if (!report.ok())
        throw ConfigError(report.violations.front().path + ": " +
                          report.violations.front().message);
    return cfg;
}

std::optional<ThresholdSet> model_thresholds(const ModelOpts &m)
{
    if (m.thr.empty())
        return std::nullopt;
    return load_thresholds(m.thr);
}

/// Traces are CSV; a .json argument is treated as a phase profile.
WorkloadTrace load_input_trace(const std::string &path, std::uint64_t seed)
{
    if (fs::path(path).extension() == ".json")
        return synthesize(load_profile(path), seed);
    return load_trace(path);
}

std::vector<Policy> parse_policies(const std::vector<std::string> &names)
{
    std::vector<Policy> out;
    for (const auto &n : names)
        out.push_back(policy_from_string(n));
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"SoC multi-domain DVFS simulator"};
    app.require_subcommand(1);

    // validate
    std::string validate_path;
    auto *validate = app.add_subcommand("validate", "check a SoC config file");
    validate->add_option("cfg", validate_path)->required();

    // calibrate-thresholds
    std::string corpus_dir, thr_out;
    double bound = 0.01;
    ModelOpts cal_m;
    auto *cal_thr = app.add_subcommand("calibrate-thresholds",
                                       "fit counter thresholds on a corpus");
    cal_thr->add_option("corpus", corpus_dir)->required();
    cal_thr->add_option("--bound", bound, "allowed degradation at the low point");
    cal_thr->add_option("-o,--output", thr_out);
    add_model_opts(cal_thr, cal_m, false);

    // calibrate-power
    std::string targets_path, coef_out;
    ModelOpts calp_m;
    auto *cal_pow = app.add_subcommand("calibrate-power",
                                       "fit power coefficients to ratio anchors");
    cal_pow->add_option("targets", targets_path)->required();
    cal_pow->add_option("-o,--output", coef_out);
    add_model_opts(cal_pow, calp_m, false);

    // run
    std::string run_trace, run_policy = "sysscale", run_out, run_csv;
    std::uint64_t seed = 0;
    bool pin = false;
    ModelOpts run_m;
    auto *run = app.add_subcommand("run", "simulate one trace under one policy");
    run->add_option("trace", run_trace)->required();
    run->add_option("--policy", run_policy);
    run->add_option("--seed", seed);
    run->add_option("-o,--output", run_out);
    run->add_option("--intervals-csv", run_csv, "per-interval timeline");
    run->add_flag("--pin-compute", pin, "hold compute at the level clocks");
    add_model_opts(run, run_m, true);

    // compare
    std::string cmp_trace, cmp_out;
    std::vector<std::string> cmp_policies{"baseline", "sysscale", "memscale-redist",
                                          "coscale-redist"};
    bool cmp_json = false;
    ModelOpts cmp_m;
    auto *cmp = app.add_subcommand("compare", "run several policies on one trace");
    cmp->add_option("trace", cmp_trace)->required();
    cmp->add_option("--policies", cmp_policies)->delimiter(',');
    cmp->add_option("--seed", seed);
    cmp->add_option("-o,--output", cmp_out);
    cmp->add_flag("--json", cmp_json, "full reports instead of the CSV table");
    add_model_opts(cmp, cmp_m, true);

    // sweep-tdp
    std::string sweep_corpus, sweep_policy = "sysscale", sweep_out;
    std::vector<double> tdps{3.5, 4.5, 7.0};
    ModelOpts sweep_m;
    auto *sweep = app.add_subcommand("sweep-tdp", "mean gain per TDP over a corpus");
    sweep->add_option("corpus", sweep_corpus)->required();
    sweep->add_option("--tdps", tdps)->delimiter(',');
    sweep->add_option("--policy", sweep_policy);
    sweep->add_option("--seed", seed);
    sweep->add_option("-o,--output", sweep_out);
    add_model_opts(sweep, sweep_m, true);

    // synth
    std::string profile_path, synth_out;
    auto *synth = app.add_subcommand("synth", "synthesize a trace from a phase profile");
    synth->add_option("profile", profile_path)->required();
    synth->add_option("--seed", seed);
    synth->add_option("-o,--output", synth_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*validate) {
            SocConfig cfg = load_config(validate_path);
            auto report = validate_config(cfg);
            json out{{"config", validate_path}, {"ok", report.ok()},
                     {"violations", json::array()}};
            for (const auto &v : report.violations)
                out["violations"].push_back({{"path", v.path}, {"message", v.message}});
            if (!report.ok()) {
                std::cerr << json{{"error", "config"},
                                  {"message", "config has violations"},
                                  {"violations", out["violations"]}}
                                 .dump()
                          << '\n';
                return 1;
            }
            std::cout << out.dump(2) << '\n';
        } else if (*cal_thr) {
            SocConfig cfg = model_config(cal_m);
            auto corpus = load_corpus(corpus_dir);
            ThresholdSet thr = calibrate_from_corpus(cfg, corpus, bound);
            auto evals = evaluate_corpus(cfg, corpus);
            Agreement a = oracle_agreement(cfg, thr, evals);
            json out{{"thresholds", thr},
                     {"corpus", {{"path", corpus_dir},
                                 {"traces", corpus.size()},
                                 {"accuracy", a.accuracy()},
                                 {"false_positives", a.false_positives},
                                 {"false_negatives", a.false_negatives}}}};
            emit(thr_out, out.dump(2) + "\n");
        } else if (*cal_pow) {
            SocConfig cfg = model_config(calp_m);
            FitResult fit = calibrate_coefficients(load_targets(targets_path), cfg);
            emit(coef_out, fit_to_json(fit));
        } else if (*run) {
            SocConfig cfg = model_config(run_m);
            SimOptions o;
            o.seed = seed;
            o.pin_compute = pin;
            SimReport r = simulate(load_input_trace(run_trace, seed),
                                   policy_from_string(run_policy), cfg,
                                   model_thresholds(run_m), o);
            if (!run_csv.empty())
                write_text_file(run_csv, intervals_to_csv(r));
            emit(run_out, report_to_json(r));
        } else if (*cmp) {
            SocConfig cfg = model_config(cmp_m);
            SimOptions o;
            o.seed = seed;
            auto policies = parse_policies(cmp_policies);
            auto reports = compare_policies(load_input_trace(cmp_trace, seed), cfg,
                                            model_thresholds(cmp_m), policies, o);
            if (cmp_json) {
                json out = json::array();
                for (const auto &r : reports)
                    out.push_back(r);
                emit(cmp_out, out.dump(2) + "\n");
            } else {
                emit(cmp_out, comparison_to_csv(reports));
            }
        } else if (*sweep) {
            SocConfig cfg = model_config(sweep_m);
            SimOptions o;
            o.seed = seed;
            o.record_intervals = false;
            auto corpus = load_corpus(sweep_corpus);
            auto rows = tdp_sweep(corpus, cfg, model_thresholds(sweep_m), tdps,
                                  policy_from_string(sweep_policy), o);
            std::string csv = "tdp_watts,mean_gain,min_gain,max_gain,traces\n";
            for (const auto &r : rows) {
                char line[160];
                std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%zu\n",
                              r.tdp_watts, r.mean_gain, r.min_gain, r.max_gain,
                              r.gains.size());
                csv += line;
            }
            emit(sweep_out, csv);
        } else if (*synth) {
            WorkloadTrace t = synthesize(load_profile(profile_path), seed);
            if (synth_out.empty() || synth_out == "-")
                std::cout << trace_to_csv(t);
            else
                write_trace(t, synth_out);
        }
    } catch (const Error &e) {
        return fail(e.code(), e.what(), 1);
    } catch (const std::exception &e) {
        return fail("internal", e.what(), 1);
    }
    return 0;
}
