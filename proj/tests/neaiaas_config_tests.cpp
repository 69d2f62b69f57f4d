#include <doctest.h>

#include <string>

#include "neaiaas/config.hpp"
#include "neaiaas/toml.hpp"
#include "support/harness.hpp"

using namespace neaiaas;

namespace {

// Parses inline text as a config file.
ConfigResult parse_text(const testsupport::TempDir& dir, const std::string& text) {
    auto p = dir.path() / "cfg.toml";
    testsupport::write_file(p, text);
    return parse_config(p);
}

// Value for `catalog = ...` pointing at the shipped file by absolute path.
std::string shipped_catalog_value() {
    return "\"" + (testsupport::configs_dir() / "catalog.json").string() + "\"";
}

}  // namespace

TEST_CASE("toml subset reads sections values and arrays") {
    auto r = TomlTable::parse_string(
        "# leading comment\n"
        "[alpha]\n"
        "num = 15\n"
        "neg = -2.5e-1\n"
        "flag = true\n"
        "name = \"hello # not a comment\"  # trailing\n"
        "arr = [1, 2.5, 3]\n"
        "empty = []\n"
        "\n"
        "[beta]\n"
        "num = 7\n");
    REQUIRE(std::holds_alternative<TomlTable>(r));
    const TomlTable& t = std::get<TomlTable>(r);

    CHECK(t.has("alpha", "num"));
    CHECK_FALSE(t.has("alpha", "missing"));
    CHECK_FALSE(t.has("gamma", "num"));
    CHECK(t.get_number("alpha", "num") == 15.0);
    CHECK(t.get_number("alpha", "neg") == -0.25);
    CHECK(t.get_bool("alpha", "flag") == true);
    CHECK(t.get_string("alpha", "name") == "hello # not a comment");
    CHECK(t.get_array("alpha", "arr") == std::vector<double>{1, 2.5, 3});
    CHECK(t.get_array("alpha", "empty")->empty());
    CHECK(t.get_number("beta", "num") == 7.0);

    // Type-mismatched reads come back empty instead of coercing.
    CHECK_FALSE(t.get_string("alpha", "num").has_value());
    CHECK_FALSE(t.get_number("alpha", "name").has_value());
    CHECK_FALSE(t.get_array("alpha", "num").has_value());
    CHECK_FALSE(t.get_bool("alpha", "num").has_value());

    auto paths = t.paths();
    CHECK(paths == std::vector<std::string>{"alpha.arr", "alpha.empty", "alpha.flag",
                                            "alpha.name", "alpha.neg", "alpha.num",
                                            "beta.num"});
}

TEST_CASE("toml rejections carry the offending line") {
    auto expect_err = [](const std::string& text, int line, const std::string& frag) {
        auto r = TomlTable::parse_string(text);
        REQUIRE(std::holds_alternative<TomlError>(r));
        const TomlError& e = std::get<TomlError>(r);
        CAPTURE(text);
        CHECK(e.line == line);
        CHECK(e.message.find(frag) != std::string::npos);
    };
    expect_err("[broken\n", 1, "unterminated section");
    expect_err("[a b]\n", 1, "invalid section name");
    expect_err("[a]\njust words\n", 2, "expected key = value");
    expect_err("[a]\nk!ey = 1\n", 2, "invalid key");
    expect_err("k = 1\n", 1, "outside any [section]");
    expect_err("[a]\nk = 1\nk = 2\n", 3, "duplicate key 'a.k'");
    expect_err("[a]\nk =\n", 2, "missing value");
    expect_err("[a]\nk = \"open\n", 2, "unterminated string");
    expect_err("[a]\nk = \"a\"b\"\n", 2, "embedded quotes");
    expect_err("[a]\nk = [1,\n", 2, "arrays must close on the same line");
    expect_err("[a]\nk = [1, x]\n", 2, "'x' is not a number");
    expect_err("[a]\nk = maybe\n", 2, "not a number, bool or string");
}

TEST_CASE("the shipped example file equals the compiled defaults") {
    ConfigResult r = parse_config(testsupport::configs_dir() / "example.toml");
    REQUIRE(config_ok(r));
    const ExperimentConfig& c = config_value(r);
    ExperimentConfig d = default_config();

    CHECK(c.asp.digest() == d.asp.digest());
    CHECK(c.timers.tau_disc == d.timers.tau_disc);
    CHECK(c.timers.tau_page == d.timers.tau_page);
    CHECK(c.timers.tau_prep == d.timers.tau_prep);
    CHECK(c.timers.tau_com == d.timers.tau_com);
    CHECK(c.timers.tau_mig == d.timers.tau_mig);
    CHECK(c.timers.lease_duration == d.timers.lease_duration);
    CHECK(c.model.service_mean == d.model.service_mean);
    CHECK(c.model.infer_median == d.model.infer_median);
    CHECK(c.model.infer_sigma == d.model.infer_sigma);
    CHECK(c.model.net_qos_base == d.model.net_qos_base);
    CHECK(c.model.ttfb_fraction == d.model.ttfb_fraction);
    CHECK(c.sweep.rho_grid == d.sweep.rho_grid);
    CHECK(c.sweep.speed_grid == d.sweep.speed_grid);
    CHECK(c.sweep.samples_per_point == d.sweep.samples_per_point);
    CHECK(c.sweep.admission_cap == d.sweep.admission_cap);
    CHECK(c.sweep.mbb_loss_mode == MbbLossMode::TransferDestructive);
    CHECK(c.policy.delta == d.policy.delta);
    CHECK(c.policy.tau_mig == c.timers.tau_mig);  // single-sourced
    CHECK(c.weights.w1 == d.weights.w1);
    CHECK(c.hazard.kappa_edge == d.hazard.kappa_edge);
    CHECK(c.ctx.default_load == d.ctx.default_load);
    CHECK(c.ctx.mobility_speed == d.ctx.mobility_speed);
    CHECK(c.lambda == d.lambda);
    CHECK(c.seed == 1);
    CHECK(c.sweep.seed == 1);
    CHECK(c.output_dir == "out");
    CHECK(c.trace_serve_samples == d.trace_serve_samples);
    CHECK(c.catalog.entries().size() == 8);
    CHECK_FALSE(c.catalog_path.empty());
    CHECK(d.catalog.entries().size() == 8);  // compiled-in copy matches
}

TEST_CASE("overrides land on the right fields and defaults survive") {
    testsupport::TempDir dir;
    ConfigResult r = parse_text(dir,
                                "[asp]\n"
                                "ttfb_bound_ms = 90\n"
                                "quality_tier = 3\n"
                                "fallback_ladder = [2, 1]\n"
                                "privacy_scope = \"sovereign\"\n"
                                "[timers]\n"
                                "tau_mig_ms = 70\n"
                                "[load_sweep]\n"
                                "rho_grid = [0.3, 0.6]\n"
                                "[mobility]\n"
                                "loss_mode = \"lease_clock\"\n"
                                "[context]\n"
                                "backhaul_rtt_regional_ms = 9\n"
                                "[experiment]\n"
                                "seed = 77\n"
                                "catalog = " + shipped_catalog_value() + "\n");
    REQUIRE(config_ok(r));
    const ExperimentConfig& c = config_value(r);
    CHECK(c.asp->ttfb_bound == 90.0);
    CHECK(c.asp->p95_bound == 180.0);  // untouched default
    CHECK(c.asp->quality_tier == 3);
    CHECK(c.asp->fallback_ladder == std::vector<int>{2, 1});
    CHECK(c.asp->privacy_scope == PrivacyScope::Sovereign);
    CHECK(c.timers.tau_mig == 70.0);
    CHECK(c.policy.tau_mig == 70.0);
    CHECK(c.sweep.rho_grid == std::vector<double>{0.3, 0.6});
    CHECK(c.sweep.mbb_loss_mode == MbbLossMode::LeaseClock);
    REQUIRE(c.ctx.backhaul_rtt_regional.has_value());
    CHECK(*c.ctx.backhaul_rtt_regional == 9.0);
    CHECK_FALSE(c.ctx.backhaul_rtt_edge.has_value());
    CHECK(c.seed == 77);
    CHECK(c.sweep.seed == 77);
}

TEST_CASE("schema failures name the offending key") {
    testsupport::TempDir dir;
    auto expect = [&](const std::string& text, const std::string& path,
                      const std::string& frag) {
        ConfigResult r = parse_text(dir, text);
        REQUIRE_FALSE(config_ok(r));
        const ConfigError& e = config_error(r);
        CAPTURE(text);
        CHECK(e.field_path == path);
        CHECK(e.message.find(frag) != std::string::npos);
        CHECK_FALSE(e.cause.has_value());
    };
    expect("[asp]\nnope = 1\n", "asp.nope", "unknown key");
    expect("[asp]\nttfb_bound_ms = \"fast\"\n", "asp.ttfb_bound_ms", "expected a number");
    expect("[asp]\nquality_tier = 2.5\n", "asp.quality_tier", "expected an integer");
    expect("[asp]\nfallback_ladder = [0.5]\n", "asp.fallback_ladder",
           "expected integer elements");
    expect("[asp]\nmodality = \"smoke\"\n", "asp.modality", "unknown modality 'smoke'");
    expect("[load_sweep]\nrho_grid = 5\n", "load_sweep.rho_grid",
           "expected an array of numbers");
    expect("[experiment]\nseed = -1\n", "experiment.seed", "nonnegative integer");
    expect("[experiment]\nseed = 1.5\n", "experiment.seed", "nonnegative integer");
    expect("[experiment]\noutput_dir = 5\n", "experiment.output_dir", "expected a string");
    expect("[mobility]\nloss_mode = \"best_effort\"\n", "mobility.loss_mode",
           "unknown loss mode");

    // Unreadable file: the message carries the path, no field applies.
    ConfigResult missing = parse_config(dir.path() / "not-there.toml");
    REQUIRE_FALSE(config_ok(missing));
    CHECK(config_error(missing).field_path.empty());
    CHECK(config_error(missing).message.find("cannot open file") != std::string::npos);

    // Syntax errors surface the line number.
    ConfigResult syntax = parse_text(dir, "[asp]\nttfb_bound_ms\n");
    REQUIRE_FALSE(config_ok(syntax));
    CHECK(config_error(syntax).message.find("line 2") != std::string::npos);
}

TEST_CASE("domain failures carry the originating cause") {
    testsupport::TempDir dir;
    auto expect = [&](const std::string& text, const std::string& path,
                      const std::string& frag, FailureCause cause) {
        ConfigResult r = parse_text(dir, text);
        REQUIRE_FALSE(config_ok(r));
        const ConfigError& e = config_error(r);
        CAPTURE(text);
        CHECK(e.field_path == path);
        CHECK(e.message.find(frag) != std::string::npos);
        REQUIRE(e.cause.has_value());
        CHECK(*e.cause == cause);
    };
    expect("[asp]\np95_bound_ms = 250\n", "asp", "p95_bound", FailureCause::PolicyDenial);
    expect("[asp]\nfallback_ladder = [2]\n", "asp", "strictly decrease",
           FailureCause::PolicyDenial);
    expect("[timers]\ntau_page_ms = 5\n", "timers", "tau_page", FailureCause::PolicyDenial);
    expect("[timers]\ntau_mig_ms = 600\n", "timers", "hard_timeout",
           FailureCause::PolicyDenial);
    expect("[latency_model]\nservice_mean_ms = 0\n", "latency_model", "service_mean",
           FailureCause::PolicyDenial);
    expect("[load_sweep]\nrho_grid = [0.5, 0.2]\n", "load_sweep/mobility",
           "strictly increase", FailureCause::PolicyDenial);
    expect("[load_sweep]\nadmission_cap = 1\n", "load_sweep/mobility", "admission_cap",
           FailureCause::PolicyDenial);
    expect("[migration_policy]\ndelta = -0.5\n", "migration_policy", "delta",
           FailureCause::PolicyDenial);
    expect("[risk]\nw1 = -1\n", "risk", "risk weights", FailureCause::PolicyDenial);
    expect("[hazard]\nkappa_central = 2\n", "hazard.kappa_edge", "kappa",
           FailureCause::PolicyDenial);
    expect("[context]\ndefault_load = 1.5\n", "context.default_load", "[0, 1)",
           FailureCause::PolicyDenial);
    expect("[trace]\nserve_samples = 0\n", "trace.serve_samples", ">= 1",
           FailureCause::PolicyDenial);
    expect("[experiment]\ncatalog = \"not-there.json\"\n", "experiment.catalog",
           "not readable", FailureCause::PolicyDenial);

    // A structurally broken catalog surfaces the per-entry complaint.
    testsupport::write_file(dir.path() / "bad.json", "[{\"model_id\": \"x\"}]");
    expect("[experiment]\ncatalog = \"bad.json\"\n", "experiment.catalog",
           "catalog entry 0", FailureCause::PolicyDenial);
}

TEST_CASE("config error strings compose path message and cause") {
    CHECK(ConfigError{"", "boom", std::nullopt}.to_string() == "config error: boom");
    CHECK(ConfigError{"asp.x", "bad", std::nullopt}.to_string() ==
          "config error at asp.x: bad");
    CHECK(ConfigError{"asp", "bad", FailureCause::PolicyDenial}.to_string() ==
          "config error at asp: bad [policy_denial]");
}
