#pragma once

#include <optional>
#include <string_view>

#include "neaiaas/compliance.hpp"
#include "neaiaas/migration.hpp"
#include "neaiaas/telemetry.hpp"
#include "neaiaas/trace.hpp"

namespace neaiaas {

// One full session walk: discover, page/anchor, prepare, commit, serve,
// optionally migrate, release. Used by the lifecycle-trace command and by
// the lifecycle harnesses.

enum class LifecycleStage { Discover, Page, Prepare, Commit, Serve, Migrate };
std::string_view lifecycle_stage_name(LifecycleStage s);
std::optional<LifecycleStage> lifecycle_stage_from_name(std::string_view s);

// Fault injection for one run: force `cause` to surface at `stage`. The
// injection is realized through real code paths (exhausted budgets,
// inflated phase durations, revoked consent, transfer faults), never by
// fabricating a result.
struct RunFaults {
    std::optional<LifecycleStage> stage;
    std::optional<FailureCause> cause;
};

// Modeled wall-clock durations of the establishment phases.
struct PhaseDurations {
    Ms discover = 2.0;
    Ms page = 1.0;
    Ms prepare = 3.0;
    Ms commit = 2.0;
};

struct RunnerEnv {
    const ValidatedProfile* asp = nullptr;
    const TimerConfig* timers = nullptr;
    const Catalog* catalog = nullptr;
    const LatencyModel* model = nullptr;
    const ContextSummary* ctx = nullptr;
    const RiskWeights* weights = nullptr;
    const HandoverHazard* hazard = nullptr;
    const MigrationPolicy* policy = nullptr;
    double lambda = 0;

    int serve_samples = 50;        // requests generated while serving
    double serve_load = 0.3;       // utilization at the anchor while serving
    double post_serve_load = 0.9;  // anchor load when re-checking risk afterwards
    Ms serve_spacing = 5.0;        // inter-request spacing on the sim clock
    int site_capacity = 4;         // compute slots per catalog site
    int qos_budget = 64;           // dedicated flow budget
};

struct RunReport {
    AiSessionRecord session;
    std::optional<WindowStats> stats;            // present when a window was served
    std::optional<ComplianceVerdict> verdict;
    std::optional<MigrationOutcome> migration;   // present when the trigger fired
    bool migration_triggered = false;
};

// Drives one session end to end, emitting every transition into the sink.
// The seed fixes all request draws; identical inputs give byte-identical
// traces.
RunReport run_session(const RunnerEnv& env, std::uint64_t seed, const TraceSink& sink,
                      const RunFaults& faults = {}, const PhaseDurations& durations = {});

}  // namespace neaiaas
