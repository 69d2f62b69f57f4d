#include <doctest.h>

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "support/harness.hpp"

using testsupport::CmdResult;
using testsupport::TempDir;

namespace {

std::string cli() { return (testsupport::bin_dir() / "neaiaas").string(); }

CmdResult run(const std::string& args) { return testsupport::run_command(cli() + " " + args); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

const std::vector<std::string>& all_cause_names() {
    static const std::vector<std::string> names = {
        "policy_denial",        "compute_scarcity",   "qos_scarcity",
        "no_feasible_binding",  "sovereignty_violation", "model_unavailable",
        "deadline_expiry",      "consent_violation",  "state_transfer_failure",
    };
    return names;
}

}  // namespace

TEST_CASE("validate config summarizes the file or rejects it with exit 2") {
    std::string shipped = (testsupport::configs_dir() / "example.toml").string();
    CmdResult ok = run("validate-config --config " + shipped);
    CHECK(ok.exit_code == 0);
    CHECK(ok.out == "ok: " + shipped + " (catalog entries: 8, load points: 19, speed points: 7)\n");
    CHECK(ok.err.empty());

    CmdResult missing_flag = run("validate-config");
    CHECK(missing_flag.exit_code == 2);
    CHECK(missing_flag.err.find("config error at --config") != std::string::npos);

    CmdResult no_file = run("validate-config --config /does/not/exist.toml");
    CHECK(no_file.exit_code == 2);
    CHECK(no_file.err.find("config error") != std::string::npos);

    TempDir dir;
    testsupport::write_file(dir.path() / "bad.toml", "[asp]\np95_bound_ms = 250\n");
    CmdResult bad = run("validate-config --config " + (dir.path() / "bad.toml").string());
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("config error at asp") != std::string::npos);
    CHECK(bad.err.find("p95_bound") != std::string::npos);

    testsupport::write_file(dir.path() / "junk.toml", "[asp]\nwhat = = =\n");
    CmdResult junk = run("validate-config --config " + (dir.path() / "junk.toml").string());
    CHECK(junk.exit_code == 2);
    CHECK(junk.err.find("line 2") != std::string::npos);
}

TEST_CASE("argument errors exit with the config code") {
    CHECK(run("").exit_code == 2);                    // a subcommand is required
    CHECK(run("--bogus").exit_code == 2);
    CHECK(run("load-sweep --bogus").exit_code == 2);
    CHECK(run("no-such-command").exit_code == 2);
    CmdResult samples = run("load-sweep --samples 0 --out /tmp/unused");
    CHECK(samples.exit_code == 2);
    CHECK(samples.err.find("--samples") != std::string::npos);
}

TEST_CASE("load sweep emits the pinned csv and identical bytes per seed") {
    TempDir dir;
    std::string base = " --samples 400 --seed 3 --threads 1 --out ";
    CmdResult a = run("load-sweep" + base + (dir.path() / "a").string());
    REQUIRE(a.exit_code == 0);
    CHECK(a.out.find("load_sweep.csv (19 rows)") != std::string::npos);

    std::string csv = testsupport::slurp(dir.path() / "a" / "load_sweep.csv");
    auto rows = lines_of(csv);
    REQUIRE(rows.size() == 20);  // header + the 19 default load points
    CHECK(rows[0] == "rho,p99_endpoint_ms,p99_neaiaas_ms,viol_endpoint,viol_neaiaas,admit_rate");
    CHECK(rows[1].substr(0, 5) == "0.05,");
    CHECK(rows[19].substr(0, 5) == "0.95,");

    CmdResult b = run("load-sweep" + base + (dir.path() / "b").string());
    REQUIRE(b.exit_code == 0);
    CHECK(testsupport::slurp(dir.path() / "b" / "load_sweep.csv") == csv);

    CmdResult par = run("load-sweep --samples 400 --seed 3 --threads 4 --out " +
                        (dir.path() / "par").string());
    REQUIRE(par.exit_code == 0);
    CHECK(testsupport::slurp(dir.path() / "par" / "load_sweep.csv") == csv);

    CmdResult other = run("load-sweep --samples 400 --seed 4 --threads 1 --out " +
                          (dir.path() / "c").string());
    REQUIRE(other.exit_code == 0);
    CHECK(testsupport::slurp(dir.path() / "c" / "load_sweep.csv") != csv);
}

TEST_CASE("mobility sweep covers zero speed with an all-zero row") {
    TempDir dir;
    testsupport::write_file(dir.path() / "cfg.toml",
                            "[mobility]\n"
                            "speed_grid = [0, 12]\n"
                            "samples_per_point = 300\n");
    CmdResult r = run("mobility-sweep --config " + (dir.path() / "cfg.toml").string() +
                      " --seed 2 --out " + (dir.path() / "m").string());
    REQUIRE(r.exit_code == 0);
    auto rows = lines_of(testsupport::slurp(dir.path() / "m" / "mobility_sweep.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "speed_mps,p_interrupt_teardown,p_interrupt_mbb");
    CHECK(rows[1] == "0,0,0");
    CHECK(rows[2].substr(0, 3) == "12,");
}

TEST_CASE("lifecycle trace writes a connected jsonl walk") {
    TempDir dir;
    CmdResult r = run("lifecycle-trace --seed 1 --out " + (dir.path() / "t").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("final state: released") != std::string::npos);

    auto rows = lines_of(testsupport::slurp(dir.path() / "t" / "lifecycle_trace.jsonl"));
    REQUIRE(rows.size() >= 5);

    std::string prev_state = "idle";
    double prev_t = 0;
    for (const std::string& line : rows) {
        auto j = nlohmann::json::parse(line);
        REQUIRE(j.contains("timestamp"));
        REQUIRE(j.contains("session_id"));
        REQUIRE(j.contains("state_before"));
        REQUIRE(j.contains("event"));
        REQUIRE(j.contains("state_after"));
        CHECK(j["session_id"].get<std::uint64_t>() == 1);
        CHECK(j["state_before"].get<std::string>() == prev_state);
        CHECK(j["timestamp"].get<double>() >= prev_t);
        prev_state = j["state_after"].get<std::string>();
        prev_t = j["timestamp"].get<double>();
    }
    CHECK(prev_state == "released");

    auto first = nlohmann::json::parse(rows.front());
    CHECK(first["event"].get<std::string>() == "discover_done");
    auto last = nlohmann::json::parse(rows.back());
    CHECK(last["event"].get<std::string>() == "release");
    CHECK_FALSE(last.contains("cause"));

    // Same seed, same bytes.
    CmdResult again = run("lifecycle-trace --seed 1 --out " + (dir.path() / "t2").string());
    REQUIRE(again.exit_code == 0);
    CHECK(testsupport::slurp(dir.path() / "t2" / "lifecycle_trace.jsonl") ==
          testsupport::slurp(dir.path() / "t" / "lifecycle_trace.jsonl"));
}

TEST_CASE("a qos fault at prepare fails before anything commits") {
    TempDir dir;
    CmdResult r = run("lifecycle-trace --inject qos_scarcity@prepare --out " +
                      (dir.path() / "t").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("final state: failed cause=qos_scarcity") != std::string::npos);

    auto rows = lines_of(testsupport::slurp(dir.path() / "t" / "lifecycle_trace.jsonl"));
    REQUIRE(rows.size() == 3);
    auto last = nlohmann::json::parse(rows.back());
    CHECK(last["state_before"].get<std::string>() == "anchored");
    CHECK(last["event"].get<std::string>() == "phase_failed");
    CHECK(last["state_after"].get<std::string>() == "failed");
    CHECK(last["cause"].get<std::string>() == "qos_scarcity");
    for (const std::string& line : rows) {
        CHECK(line.find("committed") == std::string::npos);
        CHECK(line.find("serving") == std::string::npos);
    }
}

TEST_CASE("injected faults surface exactly one closed cause code") {
    // Every injectable cause, at its natural stage. policy_denial is the
    // validation-only cause and is rejected below.
    const std::vector<std::string> injectable = {
        "no_feasible_binding", "sovereignty_violation", "model_unavailable",
        "compute_scarcity",    "qos_scarcity",          "deadline_expiry",
        "consent_violation",   "state_transfer_failure",
    };
    TempDir dir;
    for (const std::string& cause : injectable) {
        CAPTURE(cause);
        auto out_dir = dir.path() / cause;
        CmdResult r = run("lifecycle-trace --inject " + cause + " --out " + out_dir.string());
        REQUIRE(r.exit_code == 0);

        std::string haystack = r.out + r.err +
                               testsupport::slurp(out_dir / "lifecycle_trace.jsonl");
        int distinct = 0;
        for (const std::string& name : all_cause_names()) {
            if (haystack.find(name) != std::string::npos) ++distinct;
        }
        CHECK(haystack.find(cause) != std::string::npos);
        CHECK(distinct == 1);
    }

    // Stage-qualified grammars reach the same closed set.
    CmdResult at = run("lifecycle-trace --inject deadline_expiry@page --out " +
                       (dir.path() / "g1").string());
    CHECK(at.exit_code == 0);
    CHECK(at.out.find("cause=deadline_expiry") != std::string::npos);
    CmdResult at_word = run("lifecycle-trace --inject deadline_expiry_at_page --out " +
                            (dir.path() / "g2").string());
    CHECK(at_word.exit_code == 0);
    CHECK(at_word.out.find("cause=deadline_expiry") != std::string::npos);

    // Outside the grammar: config errors, not silent acceptance.
    CmdResult unknown = run("lifecycle-trace --inject banana --out " + (dir.path() / "x").string());
    CHECK(unknown.exit_code == 2);
    CHECK(unknown.err.find("unknown failure cause 'banana'") != std::string::npos);
    CmdResult stage = run("lifecycle-trace --inject deadline_expiry@nowhere --out " +
                          (dir.path() / "x").string());
    CHECK(stage.exit_code == 2);
    CHECK(stage.err.find("unknown lifecycle stage 'nowhere'") != std::string::npos);
    CmdResult policy = run("lifecycle-trace --inject policy_denial --out " +
                           (dir.path() / "x").string());
    CHECK(policy.exit_code == 2);
    CHECK(policy.err.find("policy_denial") != std::string::npos);

    // An injection that cannot surface is an honest runtime failure.
    CmdResult absurd = run("lifecycle-trace --inject state_transfer_failure@commit --out " +
                           (dir.path() / "x").string());
    CHECK(absurd.exit_code == 3);
    CHECK(absurd.err.find("did not surface") != std::string::npos);
}

TEST_CASE("runtime failures use exit 3 and say what broke") {
    TempDir dir;
    testsupport::write_file(dir.path() / "blocker", "");
    CmdResult r = run("load-sweep --samples 10 --out " +
                      (dir.path() / "blocker" / "sub").string());
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("runtime failure") != std::string::npos);
}

TEST_CASE("traceability prints the ten requirement rows") {
    CmdResult r = run("traceability");
    REQUIRE(r.exit_code == 0);
    auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 10);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(rows[i]);
        CHECK(rows[i].rfind("R" + std::to_string(i + 1) + "|", 0) == 0);
        int pipes = 0;
        for (char c : rows[i]) pipes += c == '|';
        CHECK(pipes == 3);
    }
    // This binary owns the R9 case; the name must match the registry.
    CHECK(rows[8] ==
          "R9|neaiaas_cli_tests|injected faults surface exactly one closed cause code|"
          "failures carry explicit cause codes and timer semantics");
}
