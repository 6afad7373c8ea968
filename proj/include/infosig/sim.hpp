#pragma once

// Desk-scale simulation lab: a discrete goal-reaching environment, a tabular
// Q-learning agent over the symbolizer grid, and fault-injection runners that
// emit transition logs in the analyzer's record format.
//
// Everything here is deterministic given (seed, config). Deployment runs keep
// the environment and the fault injector on separate seed streams so a run
// with sigma2 = 0 is byte-identical to a fault-free run.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infosig/errors.hpp"
#include "infosig/random.hpp"
#include "infosig/records.hpp"
#include "infosig/symbolize.hpp"

namespace infosig {

// ---------------------------------------------------------------------------
// Environment

struct reach_env_config {
    int dims = 3;
    double workspace_halfwidth = 0.5; // position is clamped to [-w, w]^dims
    double target_halfwidth = 0.45;   // targets are sampled uniformly in [-t, t]^dims;
                                      // near-full-workspace targets keep the nominal
                                      // policy exercising the whole observation grid
    double success_radius = 0.1;      // Euclidean distance threshold
    double step_scale = 0.1;          // meters of travel per unit of action
    double effort_weight = 0.15;      // per-step penalty effort_weight * mean(a^2);
                                      // breaks step-count ties toward the smallest
                                      // sufficient action, keeping the policy unique
    int max_episode_steps = 60;       // short leash: a wandering episode ends quickly
                                      // instead of polluting the stream for hundreds
                                      // of steps

    void validate() const {
        if (dims < 1)
            throw config_error("reach_env_config: dims must be >= 1");
        if (!(workspace_halfwidth > 0.0) || !std::isfinite(workspace_halfwidth))
            throw config_error("reach_env_config: workspace_halfwidth must be positive");
        if (!(target_halfwidth > 0.0) || target_halfwidth > workspace_halfwidth)
            throw config_error("reach_env_config: target_halfwidth must be in (0, workspace_halfwidth]");
        if (!(success_radius > 0.0) || !std::isfinite(success_radius))
            throw config_error("reach_env_config: success_radius must be positive");
        if (!(step_scale > 0.0) || !std::isfinite(step_scale))
            throw config_error("reach_env_config: step_scale must be positive");
        if (effort_weight < 0.0 || !std::isfinite(effort_weight))
            throw config_error("reach_env_config: effort_weight must be >= 0");
        if (max_episode_steps < 1)
            throw config_error("reach_env_config: max_episode_steps must be >= 1");
    }
};

struct env_step_result {
    std::vector<double> observation; // target - position, after the move
    double reward = -1.0;            // -(1 + effort penalty) per step; 0 on success
    bool done = false;
    bool success = false;
};

// Point-mass reach task. The observation is the displacement to the target,
// so one policy table serves every sampled target.
class reach_env {
  public:
    explicit reach_env(reach_env_config cfg) : cfg_(cfg) {
        cfg_.validate();
        position_.assign(static_cast<std::size_t>(cfg_.dims), 0.0);
        target_.assign(static_cast<std::size_t>(cfg_.dims), 0.0);
    }

    // Starts a new episode: home the position, sample a fresh target.
    std::vector<double> reset(rng& g) {
        for (auto& p : position_)
            p = 0.0;
        for (auto& t : target_)
            t = g.uniform_range(-cfg_.target_halfwidth, cfg_.target_halfwidth);
        episode_step_ = 0;
        in_episode_ = true;
        return observation();
    }

    env_step_result step(std::span<const double> action) {
        if (!in_episode_)
            throw config_error("reach_env: step called before reset");
        if (static_cast<int>(action.size()) != cfg_.dims)
            throw malformed_input("reach_env: action dimensionality mismatch");
        for (const double a : action)
            if (!std::isfinite(a))
                throw malformed_input("reach_env: non-finite action component");

        for (std::size_t d = 0; d < position_.size(); ++d) {
            const double moved = position_[d] + cfg_.step_scale * action[d];
            position_[d] = std::min(cfg_.workspace_halfwidth,
                                    std::max(-cfg_.workspace_halfwidth, moved));
        }
        ++episode_step_;

        env_step_result out;
        out.observation = observation();
        double dist2 = 0.0;
        for (const double o : out.observation)
            dist2 += o * o;
        out.success = std::sqrt(dist2) < cfg_.success_radius;
        out.done = out.success || episode_step_ >= cfg_.max_episode_steps;
        if (out.success) {
            out.reward = 0.0;
        } else {
            double effort = 0.0;
            for (const double a : action)
                effort += a * a;
            out.reward = -1.0 - cfg_.effort_weight * effort / static_cast<double>(cfg_.dims);
        }
        if (out.done)
            in_episode_ = false;
        return out;
    }

    const reach_env_config& config() const { return cfg_; }
    int episode_step() const { return episode_step_; }

  private:
    std::vector<double> observation() const {
        std::vector<double> obs(position_.size());
        for (std::size_t d = 0; d < position_.size(); ++d)
            obs[d] = target_[d] - position_[d];
        return obs;
    }

    reach_env_config cfg_;
    std::vector<double> position_;
    std::vector<double> target_;
    int episode_step_ = 0;
    bool in_episode_ = false;
};

// ---------------------------------------------------------------------------
// Agent

struct agent_params {
    double alpha = 0.3;                    // Q-learning step size
    double alpha_tau = 25.0;               // visit-count step-size decay: the
                                           // effective rate is alpha / (1 + n/tau)
                                           // after n updates of a pair; 0 disables.
                                           // Settles well-visited pairs so the frozen
                                           // greedy policy stops churning late in a run
    double gamma = 0.95;                   // discount
    double eps0 = 1.0;                     // start from a maximum-entropy policy, the
                                           // same high-exploration regime a fresh
                                           // stochastic learner passes through
    double eps_min = 0.05;                 // floor after decay; a little jitter keeps
                                           // tie-locked table entries from freezing on
                                           // a bad first estimate
    std::uint64_t eps_decay_steps = 40000; // linear decay horizon (global steps)
    double q_init = -20.0;                 // pessimistic start: untried actions never
                                           // outrank anything the agent has evaluated
    int action_levels = 3;                 // control lattice size per dimension; the
                                           // agent commands this many quantized levels
                                           // (odd, so a hold action exists). 0 inherits
                                           // the grid's action bins unchanged. A coarse
                                           // lattice keeps the table small enough that
                                           // every pair is visited many times.

    void validate() const {
        if (!(alpha > 0.0) || alpha > 1.0)
            throw config_error("agent_params: alpha must be in (0, 1]");
        if (alpha_tau < 0.0 || !std::isfinite(alpha_tau))
            throw config_error("agent_params: alpha_tau must be >= 0");
        if (gamma < 0.0 || gamma >= 1.0)
            throw config_error("agent_params: gamma must be in [0, 1)");
        if (eps0 < 0.0 || eps0 > 1.0 || eps_min < 0.0 || eps_min > eps0)
            throw config_error("agent_params: need 0 <= eps_min <= eps0 <= 1");
        if (eps_decay_steps < 1)
            throw config_error("agent_params: eps_decay_steps must be >= 1");
        if (!std::isfinite(q_init))
            throw config_error("agent_params: q_init must be finite");
        if (action_levels < 0 || (action_levels > 0 && action_levels % 2 == 0))
            throw config_error("agent_params: action_levels must be 0 or a positive odd count");
    }
};

// Dense tabular Q-learning over the symbolizer's (state, action) grid. When
// params.action_levels is set, the agent commands a coarser control lattice
// than the full grid (its stored grid reflects the lattice it acts on).
// Greedy ties resolve to the grid's center action first (hold position), then
// to the lowest action code, so the policy is a pure function of the table.
class tabular_agent {
  public:
    tabular_agent(symbolizer_config grid, agent_params params)
        : grid_(std::move(grid)), params_(params) {
        validate(grid_);
        params_.validate();
        if (params_.action_levels > 0)
            for (int& bins : grid_.action_bins)
                bins = params_.action_levels;
        n_states_ = n_state_codes(grid_);
        n_actions_ = n_action_codes(grid_);
        constexpr Code max_entries = Code{1} << 26;
        if (n_states_ > max_entries / n_actions_)
            throw config_error("tabular_agent: grid too large for a dense table");
        q_.assign(static_cast<std::size_t>(n_states_ * n_actions_), params_.q_init);
        if (params_.alpha_tau > 0.0)
            visits_.assign(q_.size(), 0);

        std::vector<int> center(grid_.action_bins.size());
        for (std::size_t d = 0; d < center.size(); ++d)
            center[d] = grid_.action_bins[d] / 2;
        default_action_ = detail::encode_levels(center, grid_.action_bins);
    }

    double epsilon(std::uint64_t step) const {
        if (step >= params_.eps_decay_steps)
            return params_.eps_min;
        const double frac = static_cast<double>(step) / static_cast<double>(params_.eps_decay_steps);
        return params_.eps0 + (params_.eps_min - params_.eps0) * frac;
    }

    Code greedy(Code s) const {
        const double* row = &q_[index(s, 0)];
        Code best_a = default_action_;
        double best_q = row[default_action_];
        for (Code a = 0; a < n_actions_; ++a) {
            if (row[a] > best_q) {
                best_q = row[a];
                best_a = a;
            }
        }
        return best_a;
    }

    // epsilon-greedy draw for training; deployment should call greedy().
    Code act(Code s, std::uint64_t step, rng& g) {
        if (g.uniform01() < epsilon(step))
            return static_cast<Code>(g.uniform_below(static_cast<std::uint64_t>(n_actions_)));
        return greedy(s);
    }

    // One-step Q-learning backup. `terminal` cuts bootstrapping (success
    // only; a timeout is a state like any other and still bootstraps).
    void update(Code s, Code a, double r, Code s_next, bool terminal) {
        if (!std::isfinite(r))
            throw malformed_input("tabular_agent: non-finite reward");
        const double target = r + (terminal ? 0.0 : params_.gamma * row_max(s_next));
        const std::size_t i = index(s, a);
        double rate = params_.alpha;
        if (params_.alpha_tau > 0.0)
            rate = params_.alpha / (1.0 + static_cast<double>(visits_[i]++) / params_.alpha_tau);
        q_[i] += rate * (target - q_[i]);
    }

    double q(Code s, Code a) const { return q_[index(s, a)]; }
    void set_q(Code s, Code a, double v) {
        if (!std::isfinite(v))
            throw malformed_input("tabular_agent: non-finite Q value");
        q_[index(s, a)] = v;
    }

    Code default_action() const { return default_action_; }
    Code n_states() const { return n_states_; }
    Code n_actions() const { return n_actions_; }
    const symbolizer_config& grid() const { return grid_; }
    const agent_params& params() const { return params_; }

  private:
    std::size_t index(Code s, Code a) const {
        if (s < 0 || s >= n_states_ || a < 0 || a >= n_actions_)
            throw malformed_input("tabular_agent: state or action code out of range");
        return static_cast<std::size_t>(s * n_actions_ + a);
    }

    double row_max(Code s) const {
        const double* row = &q_[index(s, 0)];
        double best = row[0];
        for (Code a = 1; a < n_actions_; ++a)
            best = std::max(best, row[a]);
        return best;
    }

    symbolizer_config grid_;
    agent_params params_;
    Code n_states_ = 0;
    Code n_actions_ = 0;
    Code default_action_ = 0;
    std::vector<double> q_;
    std::vector<std::uint32_t> visits_;
};

// ---------------------------------------------------------------------------
// Fault injection

enum class noise_channel { none, observation, action };

inline std::string to_string(noise_channel c) {
    switch (c) {
    case noise_channel::none: return "none";
    case noise_channel::observation: return "observation";
    case noise_channel::action: return "action";
    }
    throw config_error("noise_channel: unknown value");
}

inline noise_channel noise_channel_from_string(const std::string& s) {
    if (s == "none") return noise_channel::none;
    if (s == "observation") return noise_channel::observation;
    if (s == "action") return noise_channel::action;
    throw config_error("noise_channel: expected none|observation|action, got '" + s + "'");
}

struct noise_spec {
    noise_channel channel = noise_channel::none;
    double sigma2 = 0.0;      // per-component Gaussian variance
    std::uint64_t onset = 0;  // first global step at which noise applies

    void validate() const {
        if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
            throw config_error("noise_spec: sigma2 must be finite and >= 0");
    }
};

// Adds iid N(0, sigma2) noise per component when the fault is active at
// `step`. Inactive calls return the input exactly and consume no draws, so a
// zero-variance fault run replays the fault-free trajectory byte for byte.
inline std::vector<double> inject_noise(std::vector<double> v, const noise_spec& spec,
                                        std::uint64_t step, rng& g) {
    if (spec.channel == noise_channel::none || spec.sigma2 == 0.0 || step < spec.onset)
        return v;
    const double sigma = std::sqrt(spec.sigma2);
    for (double& x : v)
        x += g.normal(sigma);
    return v;
}

// ---------------------------------------------------------------------------
// Scenario runners

struct scenario_config {
    reach_env_config env{};
    symbolizer_config grid = default_symbolizer_config();
    agent_params agent{};
    // Reach curriculum: episodes that begin before `curriculum_steps` draw their
    // target range and episode cap from a linear ramp that starts at the warm-up
    // values below and reaches the configured environment's values at the end of
    // the ramp. 0 trains at full difficulty from the first episode.
    std::uint64_t curriculum_steps = 40000;
    double curriculum_target0 = 0.05; // warm-up target half-width, meters
    int curriculum_cap0 = 12;         // warm-up episode cap, steps

    void validate() const {
        env.validate();
        infosig::validate(grid);
        agent.validate();
        if (env.dims != grid.dims)
            throw config_error("scenario_config: environment and grid dimensionality differ");
        if (curriculum_steps > 0) {
            if (!(curriculum_target0 > 0.0) || curriculum_target0 > env.target_halfwidth)
                throw config_error(
                    "scenario_config: curriculum_target0 must be in (0, env.target_halfwidth]");
            if (curriculum_cap0 < 1 || curriculum_cap0 > env.max_episode_steps)
                throw config_error(
                    "scenario_config: curriculum_cap0 must be in [1, env.max_episode_steps]");
        }
    }
};

struct training_result {
    std::vector<transition_record> log;
    tabular_agent agent;
};

// Trains a fresh agent for `steps` environment transitions and returns the
// full transition log alongside the learned table.
inline training_result run_training(std::uint64_t seed, std::uint64_t steps,
                                    const scenario_config& cfg) {
    cfg.validate();
    const auto env_for_episode = [&cfg](std::uint64_t t) {
        reach_env_config e = cfg.env;
        if (t < cfg.curriculum_steps) {
            const double f = static_cast<double>(t) / static_cast<double>(cfg.curriculum_steps);
            e.target_halfwidth =
                cfg.curriculum_target0 + f * (e.target_halfwidth - cfg.curriculum_target0);
            e.max_episode_steps =
                cfg.curriculum_cap0 +
                static_cast<int>(f * static_cast<double>(e.max_episode_steps - cfg.curriculum_cap0));
        }
        return e;
    };
    reach_env env(env_for_episode(0));
    tabular_agent agent(cfg.grid, cfg.agent);
    rng g(seed, 0);

    std::vector<transition_record> log;
    log.reserve(steps);
    std::vector<double> obs = env.reset(g);
    for (std::uint64_t t = 0; t < steps; ++t) {
        const Code s_code = symbolize_state(obs, cfg.grid);
        const Code a_code = agent.act(s_code, t, g);
        const std::vector<double> a_vec = action_center(a_code, agent.grid());
        env_step_result res = env.step(a_vec);
        const Code s_next_code = symbolize_state(res.observation, cfg.grid);
        agent.update(s_code, a_code, res.reward, s_next_code, res.success);

        transition_record rec;
        rec.t = t;
        rec.s = obs;
        rec.a = a_vec;
        rec.s_next = res.observation;
        rec.r = res.reward;
        rec.done = res.done;
        log.push_back(std::move(rec));

        if (res.done) {
            if (cfg.curriculum_steps > 0)
                env = reach_env(env_for_episode(t + 1));
            obs = env.reset(g);
        } else {
            obs = std::move(res.observation);
        }
    }
    return {std::move(log), std::move(agent)};
}

// Runs a frozen greedy policy for `steps` transitions under an optional fault.
//
// Observation faults corrupt what the policy (and the log's s/s_next fields)
// see; the physics, rewards, and termination all follow the true state, which
// is preserved in s_true/s_next_true. Action faults corrupt execution only:
// the log keeps the commanded action, and the fault shows up through s_next.
// An observation sensed at global step t is noisy iff t >= onset, so the
// policy's input is corrupted from exactly the onset step onward.
inline std::vector<transition_record> run_deployment(std::uint64_t seed, const tabular_agent& policy,
                                                     std::uint64_t steps, const noise_spec& fault,
                                                     const reach_env_config& env_cfg) {
    fault.validate();
    env_cfg.validate();
    if (env_cfg.dims != policy.grid().dims)
        throw config_error("run_deployment: environment and policy grid dimensionality differ");
    const bool obs_fault = fault.channel == noise_channel::observation;
    const bool act_fault = fault.channel == noise_channel::action;

    reach_env env(env_cfg);
    rng env_rng(seed, 0);
    rng noise_rng(seed, 1);

    std::vector<transition_record> log;
    log.reserve(steps);
    std::vector<double> obs_true = env.reset(env_rng);
    std::vector<double> obs_seen =
        obs_fault ? inject_noise(obs_true, fault, 0, noise_rng) : obs_true;

    for (std::uint64_t t = 0; t < steps; ++t) {
        const Code s_code = symbolize_state(obs_seen, policy.grid());
        const Code a_code = policy.greedy(s_code);
        std::vector<double> a_vec = action_center(a_code, policy.grid());
        const std::vector<double> executed =
            act_fault ? inject_noise(a_vec, fault, t, noise_rng) : a_vec;
        env_step_result res = env.step(executed);
        const std::vector<double> next_true = res.observation;
        const std::vector<double> next_seen =
            obs_fault ? inject_noise(next_true, fault, t + 1, noise_rng) : next_true;

        transition_record rec;
        rec.t = t;
        rec.s = obs_seen;
        rec.a = std::move(a_vec);
        rec.s_next = next_seen;
        rec.r = res.reward;
        rec.done = res.done;
        if (obs_fault) {
            rec.s_true = obs_true;
            rec.s_next_true = next_true;
        }
        log.push_back(std::move(rec));

        if (res.done) {
            obs_true = env.reset(env_rng);
            obs_seen = obs_fault ? inject_noise(obs_true, fault, t + 1, noise_rng) : obs_true;
        } else {
            obs_true = next_true;
            obs_seen = next_seen;
        }
    }
    return log;
}

// ---------------------------------------------------------------------------
// Log summaries

struct episode_stats {
    std::uint64_t episodes = 0;  // completed episodes (done records)
    std::uint64_t successes = 0; // completed with the success reward
};

inline episode_stats tally_episodes(std::span<const transition_record> log) {
    episode_stats st;
    for (const auto& rec : log) {
        if (!rec.done)
            continue;
        ++st.episodes;
        if (rec.r == 0.0)
            ++st.successes;
    }
    return st;
}

} // namespace infosig
