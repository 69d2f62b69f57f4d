// neaiaas: experiment front end for the session-orchestration kernel.
// Subcommands: load-sweep, mobility-sweep, lifecycle-trace, validate-config,
// traceability. Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "neaiaas/config.hpp"
#include "neaiaas/runner.hpp"
#include "neaiaas/sim.hpp"
#include "neaiaas/trace.hpp"

namespace fs = std::filesystem;
using namespace neaiaas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::optional<int> samples;
    int threads = 0;  // 0 picks the hardware thread count
    std::string inject;
};

// Loads the config file, or the compiled-in defaults when no --config was
// given. Overrides from the command line are applied afterwards.
bool load_config(const Options& o, ExperimentConfig& cfg, bool for_mobility) {
    if (o.config.empty()) {
        cfg = default_config();
    } else {
        auto r = parse_config(o.config);
        if (!config_ok(r)) {
            std::cerr << config_error(r).to_string() << "\n";
            return false;
        }
        cfg = config_value(r);
    }
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.sweep.seed = *o.seed;
    }
    if (o.samples) {
        if (*o.samples < 1) {
            std::cerr << "config error at --samples: must be >= 1\n";
            return false;
        }
        if (for_mobility) {
            cfg.sweep.mobility_samples_per_point = *o.samples;
        } else {
            cfg.sweep.samples_per_point = *o.samples;
        }
    }
    return true;
}

bool open_output(const fs::path& dir, const std::string& name, std::ofstream& os,
                 fs::path& full) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "runtime failure: cannot create output directory " << dir
                  << ": " << ec.message() << "\n";
        return false;
    }
    full = dir / name;
    os.open(full, std::ios::binary | std::ios::trunc);
    if (!os) {
        std::cerr << "runtime failure: cannot open " << full << " for writing\n";
        return false;
    }
    return true;
}

int cmd_load_sweep(const Options& o) {
    ExperimentConfig cfg;
    if (!load_config(o, cfg, false)) return kExitConfig;
    auto table = run_load_sweep(cfg.sweep, cfg.model, cfg.asp, o.threads);
    std::ofstream os;
    fs::path full;
    if (!open_output(o.out, "load_sweep.csv", os, full)) return kExitRuntime;
    write_csv(table, os);
    os.close();
    if (!os) {
        std::cerr << "runtime failure: short write to " << full << "\n";
        return kExitRuntime;
    }
    std::cout << "wrote " << full.string() << " (" << table.rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_mobility_sweep(const Options& o) {
    ExperimentConfig cfg;
    if (!load_config(o, cfg, true)) return kExitConfig;
    auto table = run_mobility_sweep(cfg.sweep, cfg.model, cfg.asp, o.threads);
    std::ofstream os;
    fs::path full;
    if (!open_output(o.out, "mobility_sweep.csv", os, full)) return kExitRuntime;
    write_csv(table, os);
    os.close();
    if (!os) {
        std::cerr << "runtime failure: short write to " << full << "\n";
        return kExitRuntime;
    }
    std::cout << "wrote " << full.string() << " (" << table.rows.size() << " rows)\n";
    return kExitOk;
}

// --inject grammar: CAUSE, CAUSE@STAGE or CAUSE_at_STAGE. A bare cause gets
// its natural stage.
bool parse_inject(const std::string& arg, RunFaults& out, std::string& err) {
    std::string cause_part = arg;
    std::string stage_part;
    auto at = arg.find('@');
    if (at != std::string::npos) {
        cause_part = arg.substr(0, at);
        stage_part = arg.substr(at + 1);
    } else {
        auto sep = arg.find("_at_");
        if (sep != std::string::npos) {
            cause_part = arg.substr(0, sep);
            stage_part = arg.substr(sep + 4);
        }
    }
    auto cause = failure_cause_from_name(cause_part);
    if (!cause) {
        err = "unknown failure cause '" + cause_part + "'";
        return false;
    }
    std::optional<LifecycleStage> stage;
    if (!stage_part.empty()) {
        stage = lifecycle_stage_from_name(stage_part);
        if (!stage) {
            err = "unknown lifecycle stage '" + stage_part + "'";
            return false;
        }
    } else {
        switch (*cause) {
            case FailureCause::NoFeasibleBinding:
            case FailureCause::SovereigntyViolation:
            case FailureCause::ModelUnavailable:
                stage = LifecycleStage::Discover;
                break;
            case FailureCause::ComputeScarcity:
            case FailureCause::QosScarcity:
                stage = LifecycleStage::Prepare;
                break;
            case FailureCause::DeadlineExpiry:
                stage = LifecycleStage::Commit;
                break;
            case FailureCause::ConsentViolation:
                stage = LifecycleStage::Serve;
                break;
            case FailureCause::StateTransferFailure:
                stage = LifecycleStage::Migrate;
                break;
            case FailureCause::PolicyDenial:
                err = "policy_denial surfaces from validation, not injection";
                return false;
        }
    }
    out.cause = cause;
    out.stage = stage;
    return true;
}

int cmd_lifecycle_trace(const Options& o) {
    ExperimentConfig cfg;
    if (!load_config(o, cfg, false)) return kExitConfig;

    RunFaults faults;
    if (!o.inject.empty()) {
        std::string err;
        if (!parse_inject(o.inject, faults, err)) {
            std::cerr << "config error at --inject: " << err << "\n";
            return kExitConfig;
        }
    }

    TraceLog log;
    RunReport report = run_session(cfg.runner_env(), cfg.seed, log.sink(), faults);

    std::ofstream os;
    fs::path full;
    if (!open_output(o.out, "lifecycle_trace.jsonl", os, full)) return kExitRuntime;
    log.write_jsonl(os);
    os.close();
    if (!os) {
        std::cerr << "runtime failure: short write to " << full << "\n";
        return kExitRuntime;
    }

    const auto& s = report.session;
    std::cout << "wrote " << full.string() << " (" << log.events().size()
              << " events)\n";
    std::cout << "final state: " << session_state_name(s.state);
    if (s.cause) std::cout << " cause=" << failure_cause_name(*s.cause);
    if (s.last_migration_cause) {
        std::cout << " migration_cause=" << failure_cause_name(*s.last_migration_cause);
    }
    std::cout << "\n";
    if (report.stats) {
        std::cout << "window: n=" << report.stats->n_samples
                  << " p99=" << report.stats->q99_hat
                  << " ttfb=" << report.stats->ttfb_hat
                  << (report.verdict && report.verdict->all_ok() ? " compliant"
                                                                 : " non-compliant")
                  << "\n";
    }
    if (report.migration_triggered && report.migration) {
        std::cout << "migration: "
                  << (report.migration->migrated() ? "completed" : "aborted")
                  << " elapsed=" << report.migration->elapsed << "\n";
    }

    if (faults.cause) {
        bool surfaced = (s.cause && *s.cause == *faults.cause) ||
                        (s.last_migration_cause &&
                         *s.last_migration_cause == *faults.cause);
        if (!surfaced) {
            std::cerr << "runtime failure: injected cause "
                      << failure_cause_name(*faults.cause)
                      << " did not surface in the session record\n";
            return kExitRuntime;
        }
        return kExitOk;
    }
    if (s.state == SessionState::Released && !s.cause) return kExitOk;
    std::cerr << "runtime failure: session ended "
              << session_state_name(s.state);
    if (s.cause) std::cerr << " cause=" << failure_cause_name(*s.cause);
    std::cerr << "\n";
    return kExitRuntime;
}

int cmd_validate_config(const Options& o) {
    if (o.config.empty()) {
        std::cerr << "config error at --config: a config path is required\n";
        return kExitConfig;
    }
    auto r = parse_config(o.config);
    if (!config_ok(r)) {
        std::cerr << config_error(r).to_string() << "\n";
        return kExitConfig;
    }
    const auto& cfg = config_value(r);
    std::cout << "ok: " << o.config << " (catalog entries: "
              << cfg.catalog.entries().size() << ", load points: "
              << cfg.sweep.rho_grid.size() << ", speed points: "
              << cfg.sweep.speed_grid.size() << ")\n";
    return kExitOk;
}

// Requirement-to-test map. Each row names a sibling test binary and one
// doctest case inside it; the acceptance suite executes every row.
struct TraceRow {
    const char* req;
    const char* binary;
    const char* test_case;
    const char* what;
};

constexpr TraceRow kTraceMatrix[] = {
    {"R1", "neaiaas_catalog_tests",
     "discover returns ranked admissible candidates with constraints applied",
     "service profile yields ranked admissible model and site candidates"},
    {"R2", "neaiaas_txn_tests",
     "prepare reserves compute and qos jointly or not at all",
     "admission checks compute load and transport qos jointly"},
    {"R3", "neaiaas_txn_tests",
     "commit binds both planes atomically and rollback leaves no partial allocation",
     "atomic two-plane commit with rollback on failure"},
    {"R4", "neaiaas_txn_tests",
     "qos reservations are tracked per flow with distinct handles",
     "transport objectives enforced per dedicated qos flow"},
    {"R5", "neaiaas_telemetry_tests",
     "window stats measure execution terms against the contract",
     "execution-side contract terms measured by telemetry"},
    {"R6", "neaiaas_migration_tests",
     "make-before-break holds a valid binding through migration",
     "mobility continuity via make-before-break migration"},
    {"R7", "neaiaas_contract_tests",
     "consent revocation stops serving immediately",
     "serving stays within consent and authorization scope"},
    {"R8", "neaiaas_contract_tests",
     "charging reference stays attributable across the lifecycle",
     "usage attributable to one session with a stable charging reference"},
    {"R9", "neaiaas_cli_tests",
     "injected faults surface exactly one closed cause code",
     "failures carry explicit cause codes and timer semantics"},
    {"R10", "neaiaas_catalog_tests",
     "discovery composes through the abstract estimate interface",
     "procedures compose over abstract interfaces without bespoke coupling"},
};

int cmd_traceability() {
    for (const auto& row : kTraceMatrix) {
        std::cout << row.req << "|" << row.binary << "|" << row.test_case << "|"
                  << row.what << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NE-AIaaS session kernel experiments"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&o](CLI::App* cmd, bool sweep) {
        cmd->add_option("--config", o.config, "experiment config (TOML)");
        cmd->add_option("--seed", o.seed, "master seed override");
        cmd->add_option("--out", o.out, "output directory");
        if (sweep) {
            cmd->add_option("--samples", o.samples, "samples per grid point");
            cmd->add_option("--threads", o.threads,
                            "worker threads (0 = hardware count, 1 = serial)");
        }
    };

    auto* load = app.add_subcommand("load-sweep", "p99 and violation curves vs load");
    add_common(load, true);
    auto* mob = app.add_subcommand("mobility-sweep", "interruption curves vs speed");
    add_common(mob, true);
    auto* trace = app.add_subcommand("lifecycle-trace", "one full session walk");
    add_common(trace, false);
    trace->add_option("--inject", o.inject, "fault to inject, CAUSE[@STAGE]");
    auto* val = app.add_subcommand("validate-config", "parse and validate a config");
    val->add_option("--config", o.config, "experiment config (TOML)");
    auto* tr = app.add_subcommand("traceability", "requirement-to-test map");
    (void)tr;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (load->parsed()) return cmd_load_sweep(o);
        if (mob->parsed()) return cmd_mobility_sweep(o);
        if (trace->parsed()) return cmd_lifecycle_trace(o);
        if (val->parsed()) return cmd_validate_config(o);
        return cmd_traceability();
    } catch (const ProtocolError& e) {
        std::cerr << "runtime failure (contract misuse): " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
}
