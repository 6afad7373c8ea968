// End-to-end drill in one process: train the built-in reach agent, deploy it
// three times -- once clean, once with an observation fault, once with an
// actuator fault switching on mid-run -- and print what the monitor concludes
// about each deployment.
//
//   $ ./fault_drill [seed]
//
// Each deployment is monitored the same way: sliding 20,000-step windows on a
// 500-step stride, a healthy baseline captured from the pre-onset stretch of
// the same run, and a diagnosis issued on the windows that lie entirely in
// the post-onset regime. Expect a few seconds of training, then three
// verdicts: nominal, sensor_fault, actuator_fault.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include <infosig/infosig.hpp>

using namespace infosig;

namespace {

constexpr std::uint64_t deploy_steps = 100000;
constexpr std::uint64_t onset = 50000; // fault switch-on step
constexpr std::uint64_t baseline_from = 25000;
constexpr std::uint64_t baseline_to = 45000;

diagnosis_report drill(const tabular_agent& policy, std::uint64_t seed, const noise_spec& fault,
                       const run_config& cfg) {
    const std::vector<transition_record> log =
        run_deployment(seed, policy, deploy_steps, fault, reach_env_config{});
    const std::vector<info_signature> sigs = analyze(log, cfg, analysis_mode::sliding);

    // The run baselines itself: its own pre-onset windows define "healthy".
    std::vector<info_signature> segment;
    for (const info_signature& sig : sigs)
        if (sig.step_index >= baseline_from && sig.step_index <= baseline_to)
            segment.push_back(sig);
    const baseline base = capture_baseline(segment);

    std::vector<signature_delta> post;
    for (const info_signature& sig : sigs)
        if (sig.step_index >= onset + cfg.window) // windows free of pre-onset data
            post.push_back(delta(sig, base));
    return diagnose(post, cfg.thresholds);
}

} // namespace

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;

    std::printf("training (seed %llu)...\n", static_cast<unsigned long long>(seed));
    const training_result trained = run_training(seed, 200000, scenario_config{});
    const episode_stats train_stats = tally_episodes(trained.log);
    std::printf("  %zu episodes, %zu successes\n\n", train_stats.episodes, train_stats.successes);

    run_config cfg;
    cfg.window = 20000;
    cfg.stride = 500;
    cfg.thresholds = desk_rig_thresholds();

    const struct {
        const char* label;
        noise_spec fault;
    } scenarios[] = {{"nominal run", {noise_channel::none, 0.0, onset}},
                     {"observation noise 0.1", {noise_channel::observation, 0.1, onset}},
                     {"action noise 0.1", {noise_channel::action, 0.1, onset}}};

    for (const auto& sc : scenarios) {
        const diagnosis_report rep = drill(trained.agent, seed + 2000, sc.fault, cfg);
        std::printf("--- %s ---\n%s\n", sc.label, render_report_text(rep).c_str());
    }
    return 0;
}
