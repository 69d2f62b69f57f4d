#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "neaiaas/anchoring.hpp"
#include "neaiaas/catalog.hpp"
#include "neaiaas/latency_model.hpp"
#include "neaiaas/migration.hpp"
#include "neaiaas/profile.hpp"
#include "neaiaas/runner.hpp"
#include "neaiaas/sim.hpp"

namespace neaiaas {

// A config problem: either a schema error (missing file, bad type, unknown
// key) or a domain validator failure, in which case `cause` carries the
// originating failure class. `field_path` names the offending key as
// "section.key" where one applies.
struct ConfigError {
    std::string field_path;
    std::string message;
    std::optional<FailureCause> cause;

    std::string to_string() const;
};

// Fully validated experiment setup. Everything the CLI commands need.
struct ExperimentConfig {
    ValidatedProfile asp;
    TimerConfig timers;
    LatencyModel model;
    SweepConfig sweep;
    MigrationPolicy policy;
    RiskWeights weights;
    HandoverHazard hazard;
    ContextSummary ctx;
    double lambda = 0.05;  // cost weight in the slack score

    Catalog catalog;
    std::filesystem::path catalog_path;

    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";

    // lifecycle-trace shaping
    int trace_serve_samples = 50;
    double trace_serve_load = 0.3;
    double trace_post_serve_load = 0.9;
    int trace_site_capacity = 4;
    int trace_qos_budget = 64;

    ExperimentConfig() : asp(make_default_validated_profile()) {}

    RunnerEnv runner_env() const;

private:
    static ValidatedProfile make_default_validated_profile();
};

using ConfigResult = std::variant<ExperimentConfig, ConfigError>;

inline bool config_ok(const ConfigResult& r) {
    return std::holds_alternative<ExperimentConfig>(r);
}
inline const ExperimentConfig& config_value(const ConfigResult& r) {
    return std::get<ExperimentConfig>(r);
}
inline const ConfigError& config_error(const ConfigResult& r) {
    return std::get<ConfigError>(r);
}

// Reads, type-checks and validates an experiment config. Relative catalog
// paths resolve against the config file's directory. Every validator the
// core modules define runs here; nothing downstream needs to re-check.
ConfigResult parse_config(const std::filesystem::path& toml_path);

// The compiled-in defaults as a config (used when calibrating and by
// tests); identical to the shipped example file.
ExperimentConfig default_config();

}  // namespace neaiaas
