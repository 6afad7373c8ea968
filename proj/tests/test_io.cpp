#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "infosig/errors.hpp"
#include "infosig/infosig.hpp"
#include "oracle.hpp"

using namespace infosig;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Scratch directory for artifact round trips; recreated fresh per run.
std::filesystem::path scratch() {
    static const std::filesystem::path dir = [] {
        const auto p = std::filesystem::temp_directory_path() / "infosig_test_io";
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

std::string path_of(const std::string& name) { return (scratch() / name).string(); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A record whose s/a/s_next sit on grid-cell centers chosen by raw level.
transition_record centered_record(std::uint64_t t, int s_level, int a_level, int next_level) {
    const symbolizer_config g = default_symbolizer_config();
    auto state_point = [&](int level) {
        const double width = (g.state_hi[0] - g.state_lo[0]) / g.state_bins[0];
        const double v = g.state_lo[0] + (level + 0.5) * width;
        return std::vector<double>{v, v, v};
    };
    auto action_point = [&](int level) {
        const double width = (g.action_hi[0] - g.action_lo[0]) / g.action_bins[0];
        const double v = g.action_lo[0] + (level + 0.5) * width;
        return std::vector<double>{v, v, v};
    };
    transition_record rec;
    rec.t = t;
    rec.s = state_point(s_level);
    rec.a = action_point(a_level);
    rec.s_next = state_point(next_level);
    rec.r = -1.0;
    rec.done = false;
    return rec;
}

} // namespace

TEST_CASE("transition logs round-trip exactly") {
    training_result run = run_training(11, 400, scenario_config{});
    // decorate a few records with the optional truth fields
    run.log[5].s_true = run.log[5].s;
    run.log[5].s_next_true = std::vector<double>{0.125, -0.25, 0.0625};
    run.log[7].r.reset();

    const std::string path = path_of("roundtrip.ndjson");
    write_log(run.log, path);
    CHECK(read_log(path) == run.log);

    SECTION("writing twice is byte-identical") {
        const std::string again = path_of("roundtrip2.ndjson");
        write_log(run.log, again);
        CHECK(slurp(path) == slurp(again));
    }
    SECTION("write_log validates dimensionality and finiteness") {
        std::vector<transition_record> bad = run.log;
        bad[3].s_next = {0.0, 0.0};
        CHECK_THROWS_AS(write_log(bad, path_of("bad.ndjson")), malformed_input);
        bad = run.log;
        bad[3].a[1] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(write_log(bad, path_of("bad.ndjson")), malformed_input);
    }
}

TEST_CASE("log reader rejects malformed input and names the line") {
    const std::string good =
        R"({"a":[0.0,0.0,0.0],"done":false,"r":-1.0,"s":[0.1,0.1,0.1],"s_next":[0.2,0.2,0.2],"t":0})";
    auto expect_throw = [&](const std::string& body, const std::string& fragment) {
        const std::string path = path_of("reject.ndjson");
        write_text(path, body);
        CHECK_THROWS_WITH(read_log(path), ContainsSubstring(fragment));
    };

    SECTION("unparseable line") { expect_throw(good + "\n{not a record\n", "log line 2"); }
    SECTION("wrong dimensionality") {
        expect_throw(R"({"a":[0.0,0.0,0.0],"done":false,"s":[0.1,0.1],"s_next":[0.2,0.2,0.2],"t":0})",
                     "'s'");
    }
    SECTION("non-finite component") {
        expect_throw(
            R"({"a":[0.0,0.0,null],"done":false,"s":[0.1,0.1,0.1],"s_next":[0.2,0.2,0.2],"t":0})",
            "'a'");
    }
    SECTION("missing field") {
        expect_throw(R"({"a":[0.0,0.0,0.0],"done":false,"s":[0.1,0.1,0.1],"t":0})", "s_next");
    }
    SECTION("done must be boolean") {
        expect_throw(
            R"({"a":[0.0,0.0,0.0],"done":1,"s":[0.1,0.1,0.1],"s_next":[0.2,0.2,0.2],"t":0})",
            "'done'");
    }
    SECTION("t must not repeat or decrease") {
        std::string body = good + "\n" + good + "\n";
        expect_throw(body, "strictly increasing");
    }
    SECTION("blank lines are skipped, not errors") {
        const std::string path = path_of("blanks.ndjson");
        write_text(path, "\n" + good + "\n   \n");
        CHECK(read_log(path).size() == 1);
    }
    SECTION("an empty file yields an empty log") {
        const std::string path = path_of("empty.ndjson");
        write_text(path, "");
        CHECK(read_log(path).empty());
    }
    SECTION("a missing file is an io_error") {
        CHECK_THROWS_AS(read_log(path_of("no_such_file.ndjson")), io_error);
    }
}

TEST_CASE("analysis emission schedule") {
    run_config cfg;

    SECTION("cumulative: 10000 records at boundary 5000 give exactly two signatures") {
        const training_result run = run_training(2, 10000, scenario_config{});
        const auto sigs = analyze(run.log, cfg, analysis_mode::cumulative);
        REQUIRE(sigs.size() == 2);
        CHECK(sigs[0].step_index == 5000);
        CHECK(sigs[1].step_index == 10000);
        CHECK(sigs[0].n == 5000);
        CHECK(sigs[1].n == 10000);
    }
    SECTION("sliding: window 100, stride 10, 130 records emit at 100..130") {
        cfg.window = 100;
        cfg.stride = 10;
        std::vector<transition_record> log;
        for (std::uint64_t t = 0; t < 130; ++t)
            log.push_back(centered_record(t, static_cast<int>(t % 7), 1, static_cast<int>(t % 5)));
        const auto sigs = analyze(log, cfg, analysis_mode::sliding);
        REQUIRE(sigs.size() == 4);
        const std::uint64_t expect[] = {100, 110, 120, 130};
        for (int i = 0; i < 4; ++i) {
            CHECK(sigs[i].step_index == expect[i]);
            CHECK(sigs[i].n == 100);
        }
    }
    SECTION("sliding signatures depend only on the trailing window") {
        cfg.window = 50;
        cfg.stride = 1;
        std::vector<transition_record> log;
        for (std::uint64_t t = 0; t < 200; ++t)
            log.push_back(
                centered_record(t, static_cast<int>(t % 9), static_cast<int>(t % 4), static_cast<int>(t % 6)));
        const auto sigs = analyze(log, cfg, analysis_mode::sliding);
        REQUIRE(!sigs.empty());
        // recompute the last window directly from the tail records
        std::vector<transition_record> tail(log.end() - 50, log.end());
        count_table table;
        for (const auto& rec : tail)
            table.add({symbolize_state(rec.s, cfg.grid), symbolize_action(rec.a, cfg.grid),
                       symbolize_state(rec.s_next, cfg.grid)});
        const info_signature direct = signature(table, 200);
        CHECK(sigs.back() == direct);
    }
    SECTION("a log shorter than one window cannot be slid over") {
        const training_result run = run_training(3, 500, scenario_config{});
        CHECK_THROWS_AS(analyze(run.log, cfg, analysis_mode::sliding), insufficient_data);
    }
    SECTION("a constant stream has an all-zero signature") {
        std::vector<transition_record> log;
        for (std::uint64_t t = 0; t < 5000; ++t)
            log.push_back(centered_record(t, 4, 2, 4));
        const auto sigs = analyze(log, cfg, analysis_mode::cumulative);
        REQUIRE(sigs.size() == 1);
        CHECK(sigs[0].h_s == 0.0);
        CHECK(sigs[0].h_a == 0.0);
        CHECK(sigs[0].h_snext == 0.0);
        CHECK(sigs[0].mi_sa == 0.0);
        CHECK(sigs[0].mi_asnext == 0.0);
        CHECK(sigs[0].mi_ssnext == 0.0);
        CHECK(sigs[0].mi_sa_snext == 0.0);
        CHECK(sigs[0].support.states == 1);
    }
    SECTION("excluding terminal records drops them from the counts") {
        cfg.include_terminal = false;
        cfg.boundary = 10;
        std::vector<transition_record> log;
        for (std::uint64_t t = 0; t < 12; ++t) {
            auto rec = centered_record(t, 1, 1, 1);
            rec.done = (t % 3 == 2); // 4 of the 12 records are terminal
            log.push_back(rec);
        }
        const auto sigs = analyze(log, cfg, analysis_mode::cumulative);
        // only 8 records are consumed, so the 10-record boundary is never hit
        CHECK(sigs.empty());
    }
    SECTION("the truth stream falls back to observed when truth fields are absent") {
        cfg.stream = stream_choice::truth;
        cfg.boundary = 100;
        std::vector<transition_record> corrupted, clean;
        for (std::uint64_t t = 0; t < 100; ++t) {
            auto rec = centered_record(t, static_cast<int>(t % 5), 2, static_cast<int>(t % 5));
            clean.push_back(rec);
            rec.s_true = rec.s;
            rec.s_next_true = rec.s_next;
            // corrupt the observed stream; truth analysis must see through it
            rec.s = centered_record(t, static_cast<int>(t % 2), 2, 0).s;
            rec.s_next = centered_record(t, 0, 2, static_cast<int>(t % 2)).s_next;
            corrupted.push_back(rec);
        }
        const auto truth_sigs = analyze(corrupted, cfg, analysis_mode::cumulative);
        const auto clean_sigs = analyze(clean, cfg, analysis_mode::cumulative);
        REQUIRE(truth_sigs.size() == 1);
        CHECK(truth_sigs[0] == clean_sigs[0]);
        // observed-stream analysis of the same log differs
        cfg.stream = stream_choice::observed;
        const auto seen_sigs = analyze(corrupted, cfg, analysis_mode::cumulative);
        CHECK(seen_sigs[0].h_s != truth_sigs[0].h_s);
    }
    SECTION("analyze_file matches in-memory analyze") {
        const training_result run = run_training(4, 6000, scenario_config{});
        const std::string path = path_of("analyze_file.ndjson");
        write_log(run.log, path);
        CHECK(analyze_file(path, cfg, analysis_mode::sliding) ==
              analyze(run.log, cfg, analysis_mode::sliding));
    }
}

TEST_CASE("signature CSV emission") {
    SECTION("header text is pinned") {
        CHECK(std::string(signature_csv_header) ==
              "step,h_s,h_a,h_snext,mi_sa,mi_asnext,mi_ssnext,mi_sa_snext,n,"
              "support_s,support_a,support_snext");
    }
    SECTION("one signature yields a header line plus one row") {
        count_table table;
        table.add({0, 0, 0});
        table.add({1, 1, 1});
        std::ostringstream out;
        emit_csv(std::vector<info_signature>{signature(table, 2)}, out);
        const std::string text = out.str();
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        CHECK(text.rfind(signature_csv_header, 0) == 0);
    }
    SECTION("a deterministic copy chain prints 1.000000 in every MI column") {
        // two equally likely triples with s = a = s_next identity coupling
        std::vector<transition_record> log;
        for (std::uint64_t t = 0; t < 100; ++t) {
            const int level = static_cast<int>(t % 2);
            log.push_back(centered_record(t, level * 9, level * 6, level * 9));
        }
        run_config cfg;
        cfg.boundary = 100;
        const auto sigs = analyze(log, cfg, analysis_mode::cumulative);
        std::ostringstream out;
        emit_csv(sigs, out);
        CHECK(out.str() == std::string(signature_csv_header) +
                               "\n100,1.000000,1.000000,1.000000,1.000000,1.000000,1.000000,"
                               "1.000000,100,2,2,2\n");
    }
    SECTION("file emission is byte-identical across repeats") {
        const training_result run = run_training(5, 7000, scenario_config{});
        const auto sigs = analyze(run.log, run_config{}, analysis_mode::sliding);
        const std::string p1 = path_of("sigs1.csv"), p2 = path_of("sigs2.csv");
        emit_csv(sigs, p1);
        emit_csv(sigs, p2);
        CHECK(slurp(p1) == slurp(p2));
        CHECK(!slurp(p1).empty());
    }
    SECTION("emitting nothing is an error") {
        std::ostringstream out;
        CHECK_THROWS_AS(emit_csv(std::vector<info_signature>{}, out), insufficient_data);
    }
}

TEST_CASE("baseline files") {
    const training_result run = run_training(6, 10000, scenario_config{});
    const auto sigs = analyze(run.log, run_config{}, analysis_mode::sliding);
    std::vector<info_signature> segment;
    for (const auto& sig : sigs)
        if (sig.step_index >= 8000)
            segment.push_back(sig);
    const baseline b = capture_baseline(segment);
    const std::string path = path_of("baseline.json");

    SECTION("round trip preserves every field") {
        save_baseline(b, path);
        CHECK(load_baseline(path) == b);
        save_baseline(b, path_of("baseline2.json"));
        CHECK(slurp(path) == slurp(path_of("baseline2.json")));
    }
    SECTION("zero-stddev baselines survive the trip") {
        baseline z = b;
        z.stddev = metric_vector{};
        save_baseline(z, path);
        CHECK(load_baseline(path) == z);
    }
    SECTION("schema version mismatches are rejected") {
        save_baseline(b, path);
        json j = detail::load_json_file(path, "test");
        j["schema_version"] = 2;
        detail::save_json_file(j, path, "test");
        CHECK_THROWS_AS(load_baseline(path), schema_error);
    }
    SECTION("a missing metric field is rejected") {
        save_baseline(b, path);
        json j = detail::load_json_file(path, "test");
        j["mean"].erase("mi_ssnext");
        detail::save_json_file(j, path, "test");
        CHECK_THROWS_AS(load_baseline(path), schema_error);
    }
    SECTION("window mismatch surfaces when the baseline is applied") {
        save_baseline(b, path);
        const baseline loaded = load_baseline(path);
        run_config wide;
        wide.window = 4000;
        const auto wide_sigs = analyze(run.log, wide, analysis_mode::sliding);
        CHECK_THROWS_AS(delta(wide_sigs.back(), loaded), config_error);
    }
}

TEST_CASE("run configuration files") {
    run_config cfg;
    cfg.window = 1500;
    cfg.stride = 50;
    cfg.boundary = 3000;
    cfg.include_terminal = false;
    cfg.stream = stream_choice::truth;
    cfg.thresholds.drift = 0.2;
    const std::string path = path_of("run_config.json");
    save_run_config(cfg, path);
    const run_config loaded = load_run_config(path);
    CHECK(loaded.window == cfg.window);
    CHECK(loaded.stride == cfg.stride);
    CHECK(loaded.boundary == cfg.boundary);
    CHECK(loaded.include_terminal == cfg.include_terminal);
    CHECK(loaded.stream == cfg.stream);
    CHECK(loaded.thresholds.drift == cfg.thresholds.drift);
    CHECK(loaded.thresholds.deep == cfg.thresholds.deep);
    CHECK(loaded.grid.state_bins == cfg.grid.state_bins);

    SECTION("unknown stream strings are rejected") {
        json j = detail::load_json_file(path, "test");
        j["stream"] = "psychic";
        detail::save_json_file(j, path, "test");
        CHECK_THROWS_AS(load_run_config(path), config_error);
    }
}

TEST_CASE("policy files") {
    const training_result run = run_training(7, 30000, scenario_config{});
    const std::string path = path_of("policy.json");
    save_policy(run.agent, path);
    const tabular_agent loaded = load_policy(path);

    SECTION("q-values and greedy choices match everywhere") {
        REQUIRE(loaded.n_states() == run.agent.n_states());
        REQUIRE(loaded.n_actions() == run.agent.n_actions());
        for (Code s = 0; s < loaded.n_states(); ++s) {
            CHECK(loaded.greedy(s) == run.agent.greedy(s));
            for (Code a = 0; a < loaded.n_actions(); ++a)
                if (loaded.q(s, a) != run.agent.q(s, a))
                    FAIL("q mismatch at s=" << s << " a=" << a);
        }
    }
    SECTION("saving twice is byte-identical") {
        save_policy(run.agent, path_of("policy2.json"));
        CHECK(slurp(path) == slurp(path_of("policy2.json")));
    }
    SECTION("out-of-grid q entries are rejected") {
        json j = detail::load_json_file(path, "test");
        j["q"].push_back({999999, 0, 1.0});
        detail::save_json_file(j, path, "test");
        CHECK_THROWS_AS(load_policy(path), schema_error);
    }
}

TEST_CASE("diagnosis reports") {
    // drive a tiny but real pipeline: healthy run -> baseline -> faulty run
    const training_result run = run_training(8, 20000, scenario_config{});
    const run_config cfg;
    const auto sigs = analyze(run.log, cfg, analysis_mode::sliding);
    std::vector<info_signature> segment;
    for (const auto& sig : sigs)
        if (sig.step_index >= 8000 && sig.step_index <= 10000)
            segment.push_back(sig);
    const baseline b = capture_baseline(segment);
    std::vector<signature_delta> post;
    for (const auto& sig : sigs)
        if (sig.step_index >= 12000)
            post.push_back(delta(sig, b));
    const diagnosis_report rep = diagnose(post, cfg.thresholds);
    const std::string path = path_of("report.json");
    save_report(rep, path);

    SECTION("the JSON artifact carries the verdict and the evidence") {
        const json j = detail::load_json_file(path, "test");
        CHECK(j.at("schema_version") == report_schema_version);
        CHECK(j.at("verdict").is_string());
        CHECK(j.at("severity_bits").is_number());
        CHECK(j.at("mean_delta").contains("mi_ssnext"));
        CHECK(j.at("mean_z").contains("h_a"));
        CHECK(j.at("thresholds").at("drift") == cfg.thresholds.drift);
        CHECK(j.at("triggered").is_array());
    }
    SECTION("text rendering is stable and self-describing") {
        const std::string text = render_report_text(rep);
        CHECK_THAT(text, ContainsSubstring("verdict: "));
        CHECK_THAT(text, ContainsSubstring("severity_bits: "));
        CHECK_THAT(text, ContainsSubstring("mi_ssnext"));
        CHECK(render_report_text(rep) == text);
    }
    SECTION("saving twice is byte-identical") {
        save_report(rep, path_of("report2.json"));
        CHECK(slurp(path) == slurp(path_of("report2.json")));
    }
}

TEST_CASE("command-line pipeline produces the full artifact chain") {
    auto run = [&](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int rc = run_cli(std::move(args), out, err);
        INFO(err.str());
        return std::pair<int, std::string>{rc, out.str()};
    };

    const std::string log = path_of("cli_train.ndjson");
    const std::string policy = path_of("cli_policy.json");
    const std::string csv = path_of("cli_sigs.csv");
    const std::string base = path_of("cli_baseline.json");
    const std::string deploy_log = path_of("cli_deploy.ndjson");
    const std::string report = path_of("cli_report.json");

    auto [rc1, out1] = run({"simulate-train", "--seed", "1", "--steps", "20000", "--out", log,
                            "--policy-out", policy});
    REQUIRE(rc1 == 0);
    CHECK_THAT(out1, ContainsSubstring("20000 transitions"));

    auto [rc2, out2] = run({"analyze", "--log", log, "--mode", "cumulative", "--out", csv});
    REQUIRE(rc2 == 0);
    CHECK_THAT(out2, ContainsSubstring("4 signatures"));

    auto [rc3, out3] = run({"baseline", "--log", log, "--from-step", "8000", "--to-step", "10000",
                            "--out", base});
    REQUIRE(rc3 == 0);
    CHECK_THAT(out3, ContainsSubstring("21 windows"));

    auto [rc4, out4] = run({"simulate-deploy", "--seed", "2", "--policy", policy, "--steps",
                            "16000", "--fault", "none", "--out", deploy_log});
    REQUIRE(rc4 == 0);

    auto [rc5, out5] = run({"diagnose", "--log", deploy_log, "--baseline", base, "--onset",
                            "10000", "--out", report});
    REQUIRE(rc5 == 0);
    CHECK_THAT(out5, ContainsSubstring("verdict: "));
    CHECK(std::filesystem::exists(report));

    SECTION("bad flags exit nonzero without throwing") {
        auto [rc, text] = run({"analyze", "--log", log, "--mode", "psychic", "--out", csv});
        CHECK(rc != 0);
        (void)text;
    }
    SECTION("missing input files exit nonzero with a readable message") {
        std::ostringstream out, err;
        const int rc = run_cli({"analyze", "--log", path_of("nope.ndjson"), "--out", csv}, out, err);
        CHECK(rc != 0);
        CHECK_THAT(err.str(), ContainsSubstring("error:"));
    }
}
