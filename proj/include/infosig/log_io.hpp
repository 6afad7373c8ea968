#pragma once

// Transition-log ingestion and validation, streaming signature analysis, and
// serialization of every durable artifact: signature CSVs, baselines, run
// configurations, diagnosis reports, and trained policies.
//
// The log format is line-delimited JSON, one self-describing record per line
// with fields t, s, a, s_next, r (optional), done, and optional s_true /
// s_next_true. Serialized doubles use shortest round-trip formatting, so
// write -> parse is exact and fixed inputs give byte-identical outputs.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "infosig/counts.hpp"
#include "infosig/errors.hpp"
#include "infosig/metrics.hpp"
#include "infosig/monitor.hpp"
#include "infosig/records.hpp"
#include "infosig/sim.hpp"
#include "infosig/symbolize.hpp"

namespace infosig {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Run configuration

enum class stream_choice { observed, truth };

inline std::string to_string(stream_choice s) {
    return s == stream_choice::observed ? "observed" : "truth";
}

inline stream_choice stream_choice_from_string(const std::string& s) {
    if (s == "observed") return stream_choice::observed;
    if (s == "truth") return stream_choice::truth;
    throw config_error("stream choice: expected observed|truth, got '" + s + "'");
}

enum class analysis_mode { cumulative, sliding };

inline std::string to_string(analysis_mode m) {
    return m == analysis_mode::cumulative ? "cumulative" : "sliding";
}

inline analysis_mode analysis_mode_from_string(const std::string& s) {
    if (s == "cumulative") return analysis_mode::cumulative;
    if (s == "sliding") return analysis_mode::sliding;
    throw config_error("analysis mode: expected cumulative|sliding, got '" + s + "'");
}

struct run_config {
    symbolizer_config grid = default_symbolizer_config();
    std::uint64_t window = 2000;   // W: sliding window length
    std::uint64_t boundary = 5000; // B: cumulative snapshot spacing
    std::uint64_t stride = 100;    // sliding emission stride
    threshold_set thresholds{};
    bool include_terminal = true;  // episode-boundary policy: count done records
    // The monitor is assumed to sit on platform-side telemetry: records carrying a
    // true-state annotation are analyzed through it, and records without one fall
    // back to the logged observation. Symbolizing what the corrupted sensor reports
    // instead would scatter the state symbols and bury the conditional structure
    // the fault rules read.
    stream_choice stream = stream_choice::truth;

    void validate() const {
        infosig::validate(grid);
        if (window < 1)
            throw config_error("run_config: window must be >= 1");
        if (boundary < 1)
            throw config_error("run_config: boundary must be >= 1");
        if (stride < 1)
            throw config_error("run_config: stride must be >= 1");
        for (const double v : {thresholds.drift, thresholds.sensor, thresholds.deep,
                               thresholds.stable})
            if (!(v >= 0.0) || !std::isfinite(v))
                throw config_error("run_config: thresholds must be finite and >= 0");
        // ha is a signed bound: the sensor rule tests delta H(A) < -ha, and a
        // negative ha admits rigs whose sensor faults leave H(A) flat or
        // slightly raised instead of collapsed.
        if (!std::isfinite(thresholds.ha))
            throw config_error("run_config: thresholds must be finite");
    }
};

// ---------------------------------------------------------------------------
// JSON helpers (shared by every artifact reader)

namespace detail {

inline const json& require_field(const json& j, const char* key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end())
        throw schema_error(where + ": missing field '" + key + "'");
    return *it;
}

inline double as_finite_number(const json& j, const char* key, const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_number())
        throw schema_error(where + ": field '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw schema_error(where + ": field '" + key + "' must be finite");
    return x;
}

inline std::uint64_t as_uint(const json& j, const char* key, const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_number_unsigned())
        throw schema_error(where + ": field '" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline void check_schema_version(const json& j, int supported, const std::string& where) {
    const json& v = require_field(j, "schema_version", where);
    if (!v.is_number_integer())
        throw schema_error(where + ": schema_version must be an integer");
    const int got = v.get<int>();
    if (got != supported)
        throw schema_error(where + ": incompatible schema_version " + std::to_string(got) +
                           " (supported: " + std::to_string(supported) + ")");
}

inline json metric_vector_to_json(const metric_vector& m) {
    json j = json::object();
    for (const auto& f : metric_fields)
        j[f.name] = m.*(f.ptr);
    return j;
}

inline metric_vector metric_vector_from_json(const json& j, const std::string& where) {
    if (!j.is_object())
        throw schema_error(where + ": expected an object of metric fields");
    metric_vector m;
    for (const auto& f : metric_fields)
        m.*(f.ptr) = as_finite_number(j, f.name, where);
    return m;
}

inline json grid_to_json(const symbolizer_config& g) {
    return json{{"dims", g.dims},
                {"state_lo", g.state_lo},     {"state_hi", g.state_hi},
                {"state_bins", g.state_bins}, {"action_lo", g.action_lo},
                {"action_hi", g.action_hi},   {"action_bins", g.action_bins}};
}

inline symbolizer_config grid_from_json(const json& j, const std::string& where) {
    if (!j.is_object())
        throw schema_error(where + ": grid must be an object");
    symbolizer_config g;
    try {
        const json& d = require_field(j, "dims", where);
        if (!d.is_number_integer())
            throw schema_error(where + ": grid dims must be an integer");
        g.dims = d.get<int>();
        require_field(j, "state_lo", where).get_to(g.state_lo);
        require_field(j, "state_hi", where).get_to(g.state_hi);
        require_field(j, "state_bins", where).get_to(g.state_bins);
        require_field(j, "action_lo", where).get_to(g.action_lo);
        require_field(j, "action_hi", where).get_to(g.action_hi);
        require_field(j, "action_bins", where).get_to(g.action_bins);
    } catch (const json::exception& e) {
        throw schema_error(where + ": malformed grid: " + e.what());
    }
    infosig::validate(g);
    return g;
}

inline json load_json_file(const std::string& path, const std::string& where) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error(where + ": cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw schema_error(where + ": '" + path + "' is not valid structured text: " + e.what());
    }
    if (!j.is_object())
        throw schema_error(where + ": '" + path + "' must contain a single object");
    return j;
}

inline void save_json_file(const json& j, const std::string& path, const std::string& where) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error(where + ": cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out)
        throw io_error(where + ": failed writing '" + path + "'");
}

} // namespace detail

inline constexpr int run_config_schema_version = 1;

inline void save_run_config(const run_config& cfg, const std::string& path) {
    cfg.validate();
    json j{{"schema_version", run_config_schema_version},
           {"grid", detail::grid_to_json(cfg.grid)},
           {"window", cfg.window},
           {"boundary", cfg.boundary},
           {"stride", cfg.stride},
           {"thresholds",
            {{"drift", cfg.thresholds.drift},
             {"sensor", cfg.thresholds.sensor},
             {"ha", cfg.thresholds.ha},
             {"deep", cfg.thresholds.deep},
             {"stable", cfg.thresholds.stable}}},
           {"include_terminal", cfg.include_terminal},
           {"stream", to_string(cfg.stream)}};
    detail::save_json_file(j, path, "run_config");
}

inline run_config load_run_config(const std::string& path) {
    const std::string where = "run_config";
    const json j = detail::load_json_file(path, where);
    detail::check_schema_version(j, run_config_schema_version, where);
    run_config cfg;
    cfg.grid = detail::grid_from_json(detail::require_field(j, "grid", where), where);
    cfg.window = detail::as_uint(j, "window", where);
    cfg.boundary = detail::as_uint(j, "boundary", where);
    cfg.stride = detail::as_uint(j, "stride", where);
    const json& th = detail::require_field(j, "thresholds", where);
    cfg.thresholds.drift = detail::as_finite_number(th, "drift", where + ".thresholds");
    cfg.thresholds.sensor = detail::as_finite_number(th, "sensor", where + ".thresholds");
    cfg.thresholds.ha = detail::as_finite_number(th, "ha", where + ".thresholds");
    cfg.thresholds.deep = detail::as_finite_number(th, "deep", where + ".thresholds");
    cfg.thresholds.stable = detail::as_finite_number(th, "stable", where + ".thresholds");
    const json& inc = detail::require_field(j, "include_terminal", where);
    if (!inc.is_boolean())
        throw schema_error(where + ": include_terminal must be a boolean");
    cfg.include_terminal = inc.get<bool>();
    const json& st = detail::require_field(j, "stream", where);
    if (!st.is_string())
        throw schema_error(where + ": stream must be a string");
    cfg.stream = stream_choice_from_string(st.get<std::string>());
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Transition logs

namespace detail {

inline std::vector<double> vector_field(const json& j, const char* key, int dims,
                                        const std::string& where) {
    const json& v = require_field(j, key, where);
    if (!v.is_array() || static_cast<int>(v.size()) != dims)
        throw malformed_input(where + ": field '" + key + "' must be an array of " +
                              std::to_string(dims) + " numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number())
            throw malformed_input(where + ": field '" + key + "' must contain only numbers");
        const double d = x.get<double>();
        if (!std::isfinite(d))
            throw malformed_input(where + ": field '" + key + "' has a non-finite component");
        out.push_back(d);
    }
    return out;
}

inline void check_vector_writable(const std::vector<double>& v, const char* key, int dims,
                                  std::uint64_t t) {
    if (static_cast<int>(v.size()) != dims)
        throw malformed_input("write_log: record t=" + std::to_string(t) + " field '" + key +
                              "' has wrong dimensionality");
    for (const double x : v)
        if (!std::isfinite(x))
            throw malformed_input("write_log: record t=" + std::to_string(t) + " field '" + key +
                                  "' has a non-finite component");
}

} // namespace detail

inline json record_to_json(const transition_record& rec) {
    json j{{"t", rec.t}, {"s", rec.s}, {"a", rec.a}, {"s_next", rec.s_next}, {"done", rec.done}};
    if (rec.r)
        j["r"] = *rec.r;
    if (rec.s_true)
        j["s_true"] = *rec.s_true;
    if (rec.s_next_true)
        j["s_next_true"] = *rec.s_next_true;
    return j;
}

inline void write_log(std::span<const transition_record> log, std::ostream& out, int dims = 3) {
    for (const auto& rec : log) {
        detail::check_vector_writable(rec.s, "s", dims, rec.t);
        detail::check_vector_writable(rec.a, "a", dims, rec.t);
        detail::check_vector_writable(rec.s_next, "s_next", dims, rec.t);
        if (rec.s_true)
            detail::check_vector_writable(*rec.s_true, "s_true", dims, rec.t);
        if (rec.s_next_true)
            detail::check_vector_writable(*rec.s_next_true, "s_next_true", dims, rec.t);
        out << record_to_json(rec).dump() << '\n';
    }
    if (!out)
        throw io_error("write_log: stream write failed");
}

inline void write_log(std::span<const transition_record> log, const std::string& path,
                      int dims = 3) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("write_log: cannot open '" + path + "' for writing");
    write_log(log, out, dims);
}

// Streaming line-by-line reader. Validates structure, dimensionality,
// finiteness, and strictly increasing t; errors name the offending line.
class log_reader {
  public:
    explicit log_reader(const std::string& path, int dims = 3)
        : in_(path, std::ios::binary), path_(path), dims_(dims) {
        if (dims_ < 1)
            throw config_error("log_reader: dims must be >= 1");
        if (!in_)
            throw io_error("log_reader: cannot open '" + path + "'");
    }

    // Next record, or nullopt at end of file. Blank lines are skipped.
    std::optional<transition_record> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            return parse_line(line);
        }
        if (in_.bad())
            throw io_error("log_reader: read failed on '" + path_ + "'");
        return std::nullopt;
    }

    std::uint64_t line_number() const { return line_; }

  private:
    transition_record parse_line(const std::string& line) {
        const std::string where = "log line " + std::to_string(line_);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw malformed_input(where + ": not a valid record: " + e.what());
        }
        if (!j.is_object())
            throw malformed_input(where + ": record must be an object");

        transition_record rec;
        const json& t = detail::require_field(j, "t", where);
        if (!t.is_number_unsigned())
            throw malformed_input(where + ": field 't' must be a non-negative integer");
        rec.t = t.get<std::uint64_t>();
        if (have_prev_ && rec.t <= prev_t_)
            throw malformed_input(where + ": field 't' must be strictly increasing (got " +
                                  std::to_string(rec.t) + " after " + std::to_string(prev_t_) + ")");
        have_prev_ = true;
        prev_t_ = rec.t;

        rec.s = detail::vector_field(j, "s", dims_, where);
        rec.a = detail::vector_field(j, "a", dims_, where);
        rec.s_next = detail::vector_field(j, "s_next", dims_, where);
        if (const auto it = j.find("r"); it != j.end()) {
            if (!it->is_number())
                throw malformed_input(where + ": field 'r' must be a number");
            const double r = it->get<double>();
            if (!std::isfinite(r))
                throw malformed_input(where + ": field 'r' must be finite");
            rec.r = r;
        }
        const json& done = detail::require_field(j, "done", where);
        if (!done.is_boolean())
            throw malformed_input(where + ": field 'done' must be a boolean");
        rec.done = done.get<bool>();
        if (j.contains("s_true"))
            rec.s_true = detail::vector_field(j, "s_true", dims_, where);
        if (j.contains("s_next_true"))
            rec.s_next_true = detail::vector_field(j, "s_next_true", dims_, where);
        return rec;
    }

    std::ifstream in_;
    std::string path_;
    int dims_;
    std::uint64_t line_ = 0;
    bool have_prev_ = false;
    std::uint64_t prev_t_ = 0;
};

inline std::vector<transition_record> read_log(const std::string& path, int dims = 3) {
    log_reader reader(path, dims);
    std::vector<transition_record> out;
    while (auto rec = reader.next())
        out.push_back(std::move(*rec));
    return out;
}

// ---------------------------------------------------------------------------
// Signature analysis

// Incremental record consumer emitting signatures per the analysis mode:
// cumulative signatures at every boundary-step multiple over all data so far,
// sliding signatures over the trailing window every stride steps once the
// window has filled. step_index counts consumed records, so memory stays
// proportional to the window regardless of log length.
class signature_stream {
  public:
    signature_stream(run_config cfg, analysis_mode mode)
        : cfg_(std::move(cfg)), mode_(mode),
          acc_(static_cast<std::size_t>(cfg_.window), cfg_.boundary) {
        cfg_.validate();
    }

    void consume(const transition_record& rec, std::vector<info_signature>& out) {
        if (!cfg_.include_terminal && rec.done)
            return;
        const bool use_truth = cfg_.stream == stream_choice::truth;
        const std::vector<double>& s = use_truth && rec.s_true ? *rec.s_true : rec.s;
        const std::vector<double>& s_next =
            use_truth && rec.s_next_true ? *rec.s_next_true : rec.s_next;
        const symbol_triple triple{symbolize_state(s, cfg_.grid),
                                   symbolize_action(rec.a, cfg_.grid),
                                   symbolize_state(s_next, cfg_.grid)};
        acc_.record(triple);
        ++consumed_;
        if (mode_ == analysis_mode::cumulative) {
            if (consumed_ % cfg_.boundary == 0)
                out.push_back(signature(acc_.cumulative_view(), consumed_));
        } else {
            if (consumed_ >= cfg_.window && (consumed_ - cfg_.window) % cfg_.stride == 0)
                out.push_back(signature(acc_.sliding_view(), consumed_));
        }
    }

    std::uint64_t consumed() const { return consumed_; }
    const run_config& config() const { return cfg_; }

  private:
    run_config cfg_;
    analysis_mode mode_;
    windowed_accumulator acc_;
    std::uint64_t consumed_ = 0;
};

inline std::vector<info_signature> analyze(std::span<const transition_record> log,
                                           const run_config& cfg, analysis_mode mode) {
    signature_stream stream(cfg, mode);
    std::vector<info_signature> out;
    for (const auto& rec : log)
        stream.consume(rec, out);
    if (mode == analysis_mode::sliding && stream.consumed() < cfg.window)
        throw insufficient_data("analyze: log has " + std::to_string(stream.consumed()) +
                                " usable records, shorter than one sliding window of " +
                                std::to_string(cfg.window));
    return out;
}

inline std::vector<info_signature> analyze_file(const std::string& path, const run_config& cfg,
                                                analysis_mode mode) {
    log_reader reader(path, cfg.grid.dims);
    signature_stream stream(cfg, mode);
    std::vector<info_signature> out;
    while (auto rec = reader.next())
        stream.consume(*rec, out);
    if (mode == analysis_mode::sliding && stream.consumed() < cfg.window)
        throw insufficient_data("analyze: log has " + std::to_string(stream.consumed()) +
                                " usable records, shorter than one sliding window of " +
                                std::to_string(cfg.window));
    return out;
}

// ---------------------------------------------------------------------------
// Signature CSV

inline constexpr const char* signature_csv_header =
    "step,h_s,h_a,h_snext,mi_sa,mi_asnext,mi_ssnext,mi_sa_snext,n,support_s,support_a,support_snext";

inline void emit_csv(std::span<const info_signature> sigs, std::ostream& out) {
    if (sigs.empty())
        throw insufficient_data("emit_csv: no signatures to emit");
    out << signature_csv_header << '\n';
    char buf[256];
    for (const auto& sig : sigs) {
        std::snprintf(buf, sizeof(buf),
                      "%llu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%llu,%zu,%zu,%zu",
                      static_cast<unsigned long long>(sig.step_index), sig.h_s, sig.h_a,
                      sig.h_snext, sig.mi_sa, sig.mi_asnext, sig.mi_ssnext, sig.mi_sa_snext,
                      static_cast<unsigned long long>(sig.n), sig.support.states,
                      sig.support.actions, sig.support.next_states);
        out << buf << '\n';
    }
    if (!out)
        throw io_error("emit_csv: stream write failed");
}

inline void emit_csv(std::span<const info_signature> sigs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("emit_csv: cannot open '" + path + "' for writing");
    emit_csv(sigs, out);
}

// ---------------------------------------------------------------------------
// Baseline files

inline void save_baseline(const baseline& b, const std::string& path) {
    json j{{"schema_version", b.schema_version},
           {"window", b.window},
           {"from_step", b.from_step},
           {"to_step", b.to_step},
           {"mean", detail::metric_vector_to_json(b.mean)},
           {"stddev", detail::metric_vector_to_json(b.stddev)}};
    detail::save_json_file(j, path, "baseline");
}

inline baseline load_baseline(const std::string& path) {
    const std::string where = "baseline";
    const json j = detail::load_json_file(path, where);
    detail::check_schema_version(j, baseline_schema_version, where);
    baseline b;
    b.schema_version = baseline_schema_version;
    b.window = detail::as_uint(j, "window", where);
    b.from_step = detail::as_uint(j, "from_step", where);
    b.to_step = detail::as_uint(j, "to_step", where);
    b.mean = detail::metric_vector_from_json(detail::require_field(j, "mean", where), where + ".mean");
    b.stddev =
        detail::metric_vector_from_json(detail::require_field(j, "stddev", where), where + ".stddev");
    return b;
}

// ---------------------------------------------------------------------------
// Diagnosis reports

inline constexpr int report_schema_version = 1;

inline json report_to_json(const diagnosis_report& rep) {
    json triggered = json::array();
    for (const auto& t : rep.triggered)
        triggered.push_back(
            {{"metric", t.metric}, {"delta_bits", t.delta_bits}, {"threshold_bits", t.threshold_bits}});
    return json{{"schema_version", report_schema_version},
                {"verdict", to_string(rep.result)},
                {"severity_bits", rep.severity_bits},
                {"from_step", rep.from_step},
                {"to_step", rep.to_step},
                {"mean_delta", detail::metric_vector_to_json(rep.deltas)},
                {"mean_z", detail::metric_vector_to_json(rep.z)},
                {"thresholds",
                 {{"drift", rep.thresholds.drift},
                  {"sensor", rep.thresholds.sensor},
                  {"ha", rep.thresholds.ha},
                  {"deep", rep.thresholds.deep},
                  {"stable", rep.thresholds.stable}}},
                {"triggered", triggered}};
}

inline void save_report(const diagnosis_report& rep, const std::string& path) {
    detail::save_json_file(report_to_json(rep), path, "report");
}

// Human-readable rendering for terminals; same content as the JSON artifact.
inline std::string render_report_text(const diagnosis_report& rep) {
    std::ostringstream out;
    char buf[160];
    out << "verdict: " << to_string(rep.result) << '\n';
    std::snprintf(buf, sizeof(buf), "severity_bits: %.6f\n", rep.severity_bits);
    out << buf;
    out << "segment: step_index " << rep.from_step << ".." << rep.to_step << '\n';
    out << "mean deltas vs baseline (bits, z):\n";
    for (const auto& f : metric_fields) {
        std::snprintf(buf, sizeof(buf), "  %-12s %+10.6f  (z %+8.3f)\n", f.name,
                      rep.deltas.*(f.ptr), rep.z.*(f.ptr));
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "thresholds: drift %.3f sensor %.3f ha %.3f deep %.3f stable %.3f\n",
                  rep.thresholds.drift, rep.thresholds.sensor, rep.thresholds.ha,
                  rep.thresholds.deep, rep.thresholds.stable);
    out << buf;
    if (rep.triggered.empty()) {
        out << "triggered: none\n";
    } else {
        out << "triggered:\n";
        for (const auto& t : rep.triggered) {
            std::snprintf(buf, sizeof(buf), "  %-12s %+10.6f  (threshold %+10.6f)\n",
                          t.metric.c_str(), t.delta_bits, t.threshold_bits);
            out << buf;
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Policy files

inline constexpr int policy_schema_version = 1;

inline void save_policy(const tabular_agent& agent, const std::string& path) {
    json entries = json::array();
    const double q_init = agent.params().q_init;
    for (Code s = 0; s < agent.n_states(); ++s)
        for (Code a = 0; a < agent.n_actions(); ++a) {
            const double q = agent.q(s, a);
            if (q != q_init)
                entries.push_back({s, a, q});
        }
    const agent_params& p = agent.params();
    json j{{"schema_version", policy_schema_version},
           {"grid", detail::grid_to_json(agent.grid())},
           {"params",
            {{"alpha", p.alpha},
             {"alpha_tau", p.alpha_tau},
             {"gamma", p.gamma},
             {"eps0", p.eps0},
             {"eps_min", p.eps_min},
             {"eps_decay_steps", p.eps_decay_steps},
             {"q_init", p.q_init},
             {"action_levels", p.action_levels}}},
           {"q", std::move(entries)}};
    detail::save_json_file(j, path, "policy");
}

inline tabular_agent load_policy(const std::string& path) {
    const std::string where = "policy";
    const json j = detail::load_json_file(path, where);
    detail::check_schema_version(j, policy_schema_version, where);
    const symbolizer_config grid =
        detail::grid_from_json(detail::require_field(j, "grid", where), where);
    const json& p = detail::require_field(j, "params", where);
    agent_params params;
    params.alpha = detail::as_finite_number(p, "alpha", where + ".params");
    params.alpha_tau = detail::as_finite_number(p, "alpha_tau", where + ".params");
    params.gamma = detail::as_finite_number(p, "gamma", where + ".params");
    params.eps0 = detail::as_finite_number(p, "eps0", where + ".params");
    params.eps_min = detail::as_finite_number(p, "eps_min", where + ".params");
    params.eps_decay_steps = detail::as_uint(p, "eps_decay_steps", where + ".params");
    params.q_init = detail::as_finite_number(p, "q_init", where + ".params");
    params.action_levels = static_cast<int>(detail::as_uint(p, "action_levels", where + ".params"));

    tabular_agent agent(grid, params);
    const json& q = detail::require_field(j, "q", where);
    if (!q.is_array())
        throw schema_error(where + ": field 'q' must be an array of [s, a, value] entries");
    for (const auto& e : q) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
            !e[1].is_number_integer() || !e[2].is_number())
            throw schema_error(where + ": q entries must be [s, a, value] triples");
        const Code s = e[0].get<Code>();
        const Code a = e[1].get<Code>();
        const double v = e[2].get<double>();
        if (!std::isfinite(v))
            throw schema_error(where + ": q value must be finite");
        if (s < 0 || s >= agent.n_states() || a < 0 || a >= agent.n_actions())
            throw schema_error(where + ": q entry indexes outside the grid");
        agent.set_q(s, a, v);
    }
    return agent;
}

} // namespace infosig
