#pragma once

// Command-line surface: five subcommands tying the simulation lab and the
// analysis pipeline together into reproducible artifact-producing runs.
//
//   simulate-train   train the tabular agent, write its transition log
//   simulate-deploy  run a frozen policy under an optional injected fault
//   analyze          turn a transition log into a signature CSV
//   baseline         capture a healthy-segment baseline from a log
//   diagnose         classify drift in a log against a stored baseline

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infosig/errors.hpp"
#include "infosig/log_io.hpp"
#include "infosig/monitor.hpp"
#include "infosig/sim.hpp"

namespace infosig {

namespace detail {

inline noise_channel fault_flag_to_channel(const std::string& fault) {
    if (fault == "none") return noise_channel::none;
    if (fault == "obs") return noise_channel::observation;
    if (fault == "act") return noise_channel::action;
    throw config_error("--fault: expected none|obs|act, got '" + fault + "'");
}

} // namespace detail

// Runs the CLI on `args` (program name excluded). Writes normal output to
// `out` and diagnostics to `err`; returns the process exit status.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information-theoretic signature monitoring for transition streams"};
    app.name("infosig");
    app.require_subcommand(1);

    // --- simulate-train ---
    struct {
        std::uint64_t seed = 1;
        std::uint64_t steps = 200000;
        std::string out_path;
        std::string policy_out;
    } train;
    auto* train_cmd = app.add_subcommand("simulate-train",
                                         "Train the built-in tabular agent on the reach task "
                                         "and write the full transition log");
    train_cmd->add_option("--seed", train.seed, "RNG seed")->capture_default_str();
    train_cmd->add_option("--steps", train.steps, "Environment steps to run")
        ->capture_default_str();
    train_cmd->add_option("--out", train.out_path, "Transition log path (line-delimited records)")
        ->required();
    train_cmd->add_option("--policy-out", train.policy_out,
                          "Optional path to save the trained policy");
    train_cmd->callback([&]() {
        const scenario_config cfg;
        const training_result result = run_training(train.seed, train.steps, cfg);
        write_log(result.log, train.out_path, cfg.grid.dims);
        const episode_stats st = tally_episodes(result.log);
        out << train.steps << " transitions written to " << train.out_path << " ("
            << st.episodes << " episodes, " << st.successes << " successes)\n";
        if (!train.policy_out.empty()) {
            save_policy(result.agent, train.policy_out);
            out << "policy written to " << train.policy_out << '\n';
        }
    });

    // --- simulate-deploy ---
    struct {
        std::uint64_t seed = 1;
        std::string policy_path;
        std::uint64_t steps = 20000;
        std::string fault = "none";
        double sigma2 = 0.0;
        std::uint64_t onset = 10000;
        std::string out_path;
    } deploy;
    auto* deploy_cmd = app.add_subcommand(
        "simulate-deploy", "Run a frozen greedy policy, optionally injecting a fault");
    deploy_cmd->add_option("--seed", deploy.seed, "RNG seed")->capture_default_str();
    deploy_cmd->add_option("--policy", deploy.policy_path, "Trained policy file")->required();
    deploy_cmd->add_option("--steps", deploy.steps, "Environment steps to run")
        ->capture_default_str();
    deploy_cmd->add_option("--fault", deploy.fault, "Fault channel to corrupt")
        ->check(CLI::IsMember({"none", "obs", "act"}))
        ->capture_default_str();
    deploy_cmd->add_option("--sigma2", deploy.sigma2, "Gaussian noise variance per component")
        ->capture_default_str();
    deploy_cmd->add_option("--onset", deploy.onset, "First step at which the fault applies")
        ->capture_default_str();
    deploy_cmd->add_option("--out", deploy.out_path, "Transition log path")->required();
    deploy_cmd->callback([&]() {
        const tabular_agent policy = load_policy(deploy.policy_path);
        noise_spec fault;
        fault.channel = detail::fault_flag_to_channel(deploy.fault);
        fault.sigma2 = deploy.sigma2;
        fault.onset = deploy.onset;
        const reach_env_config env_cfg;
        const std::vector<transition_record> log =
            run_deployment(deploy.seed, policy, deploy.steps, fault, env_cfg);
        write_log(log, deploy.out_path, policy.grid().dims);
        const episode_stats st = tally_episodes(log);
        out << deploy.steps << " transitions written to " << deploy.out_path << " ("
            << st.episodes << " episodes, " << st.successes << " successes, fault "
            << deploy.fault << " sigma2 " << deploy.sigma2 << ")\n";
    });

    // Shared analysis-config flags (analyze / baseline / diagnose).
    struct analysis_flags {
        std::string config_path;
        std::uint64_t window = 2000;
        std::uint64_t boundary = 5000;
        std::uint64_t stride = 100;
        std::string stream = "truth";
        CLI::Option* window_opt = nullptr;
        CLI::Option* boundary_opt = nullptr;
        CLI::Option* stride_opt = nullptr;
        CLI::Option* stream_opt = nullptr;

        void attach(CLI::App* cmd) {
            cmd->add_option("--config", config_path,
                            "Run-configuration file (grid, windows, thresholds); explicit "
                            "flags override its values");
            window_opt = cmd->add_option("--window", window, "Sliding window length W")
                             ->capture_default_str();
            boundary_opt = cmd->add_option("--boundary", boundary, "Cumulative snapshot spacing B")
                               ->capture_default_str();
            stride_opt = cmd->add_option("--stride", stride, "Sliding emission stride")
                             ->capture_default_str();
            stream_opt = cmd->add_option("--stream", stream,
                                         "Observation channel to symbolize (observed|truth)")
                             ->check(CLI::IsMember({"observed", "truth"}))
                             ->capture_default_str();
        }

        run_config resolve() const {
            run_config cfg;
            if (!config_path.empty())
                cfg = load_run_config(config_path);
            if (window_opt->count() > 0)
                cfg.window = window;
            if (boundary_opt->count() > 0)
                cfg.boundary = boundary;
            if (stride_opt->count() > 0)
                cfg.stride = stride;
            if (stream_opt->count() > 0)
                cfg.stream = stream_choice_from_string(stream);
            cfg.validate();
            return cfg;
        }
    };

    // --- analyze ---
    struct {
        std::string log_path;
        std::string mode = "sliding";
        std::string out_path;
        analysis_flags cfg;
    } an;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Compute the signature series of a transition log");
    analyze_cmd->add_option("--log", an.log_path, "Transition log to analyze")->required();
    analyze_cmd->add_option("--mode", an.mode, "Windowing mode (cumulative|sliding)")
        ->check(CLI::IsMember({"cumulative", "sliding"}))
        ->capture_default_str();
    analyze_cmd->add_option("--out", an.out_path, "Signature CSV path")->required();
    an.cfg.attach(analyze_cmd);
    analyze_cmd->callback([&]() {
        const run_config cfg = an.cfg.resolve();
        const analysis_mode mode = analysis_mode_from_string(an.mode);
        const std::vector<info_signature> sigs = analyze_file(an.log_path, cfg, mode);
        emit_csv(sigs, an.out_path);
        out << sigs.size() << " signatures written to " << an.out_path << '\n';
    });

    // --- baseline ---
    struct {
        std::string log_path;
        std::uint64_t from_step = 8000;
        std::uint64_t to_step = 10000;
        std::string out_path;
        analysis_flags cfg;
    } base;
    auto* baseline_cmd = app.add_subcommand(
        "baseline", "Capture a baseline from the sliding windows ending inside a healthy segment");
    baseline_cmd->add_option("--log", base.log_path, "Transition log of a healthy run")->required();
    baseline_cmd->add_option("--from-step", base.from_step,
                             "First window-end step_index included")
        ->capture_default_str();
    baseline_cmd->add_option("--to-step", base.to_step, "Last window-end step_index included")
        ->capture_default_str();
    baseline_cmd->add_option("--out", base.out_path, "Baseline file path")->required();
    base.cfg.attach(baseline_cmd);
    baseline_cmd->callback([&]() {
        if (base.from_step > base.to_step)
            throw config_error("baseline: --from-step must not exceed --to-step");
        const run_config cfg = base.cfg.resolve();
        const std::vector<info_signature> sigs =
            analyze_file(base.log_path, cfg, analysis_mode::sliding);
        std::vector<info_signature> segment;
        for (const auto& sig : sigs)
            if (sig.step_index >= base.from_step && sig.step_index <= base.to_step)
                segment.push_back(sig);
        const baseline b = capture_baseline(segment);
        save_baseline(b, base.out_path);
        out << "baseline over " << segment.size() << " windows (step_index " << b.from_step
            << ".." << b.to_step << ") written to " << base.out_path << '\n';
    });

    // --- diagnose ---
    struct {
        std::string log_path;
        std::string baseline_path;
        std::uint64_t onset = 10000;
        std::string out_path;
        std::string thresholds = "default";
        CLI::Option* thresholds_opt = nullptr;
        analysis_flags cfg;
    } diag;
    auto* diagnose_cmd = app.add_subcommand(
        "diagnose", "Classify drift in a deployment log against a stored baseline");
    diagnose_cmd->add_option("--log", diag.log_path, "Deployment transition log")->required();
    diagnose_cmd->add_option("--baseline", diag.baseline_path, "Baseline file")->required();
    diagnose_cmd->add_option("--onset", diag.onset,
                             "Suspected fault onset step; windows ending at or after "
                             "onset + W are diagnosed")
        ->capture_default_str();
    diagnose_cmd->add_option("--out", diag.out_path, "Optional report file path");
    diag.thresholds_opt =
        diagnose_cmd
            ->add_option("--thresholds", diag.thresholds,
                         "Threshold preset; desk-rig pairs with wide (20k-step) windows")
            ->check(CLI::IsMember({"default", "desk-rig"}))
            ->capture_default_str();
    diag.cfg.attach(diagnose_cmd);
    diagnose_cmd->callback([&]() {
        run_config cfg = diag.cfg.resolve();
        if (diag.thresholds_opt->count() > 0 && diag.thresholds == "desk-rig")
            cfg.thresholds = desk_rig_thresholds();
        const baseline b = load_baseline(diag.baseline_path);
        const std::vector<info_signature> sigs =
            analyze_file(diag.log_path, cfg, analysis_mode::sliding);
        std::vector<signature_delta> post;
        for (const auto& sig : sigs)
            if (sig.step_index >= diag.onset + cfg.window)
                post.push_back(delta(sig, b));
        const diagnosis_report rep = diagnose(post, cfg.thresholds);
        out << render_report_text(rep);
        if (!diag.out_path.empty()) {
            save_report(rep, diag.out_path);
            out << "report written to " << diag.out_path << '\n';
        }
    });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace infosig
