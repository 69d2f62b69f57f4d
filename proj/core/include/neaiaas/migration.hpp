#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <utility>

#include "neaiaas/anchoring.hpp"
#include "neaiaas/trace.hpp"
#include "neaiaas/txn.hpp"

namespace neaiaas {

// Migration trigger thresholds plus the end-to-end migration budget.
struct MigrationPolicy {
    double delta = 0.2;        // tail-risk threshold
    double delta_prime = 0.2;  // first-feedback risk threshold
    Ms tau_mig = 80.0;
};

Status validate_policy(const MigrationPolicy& p);

// Inclusive trigger: fire when p_tail >= delta or p_ff >= delta_prime.
bool check_trigger(const RiskEstimate& r, const MigrationPolicy& p);

enum class MigrationStage { Discover, Page, Prepare, Commit, StateTransfer, Cutover };
std::string_view migration_stage_name(MigrationStage s);

// Deterministic fault injection: fail the pipeline at a stage with a cause.
struct MigrationFaults {
    std::optional<MigrationStage> stage;
    std::optional<FailureCause> cause;
};

// Modeled wall-clock cost of each stage, milliseconds.
struct MigrationTimings {
    Ms discover = 1.0;
    Ms page = 1.0;
    Ms prepare = 2.0;
    Ms commit = 1.0;
    Ms state_transfer = 5.0;
    Ms cutover = 1.0;
};

// Everything migrate() needs from the surrounding world.
struct MigrationEnv {
    const ValidatedProfile* asp = nullptr;
    const Catalog* catalog = nullptr;
    const EstimateSource* predictor = nullptr;
    const ContextSummary* ctx = nullptr;
    const LatencyModel* model = nullptr;
    const HandoverHazard* hazard = nullptr;
    const RiskWeights* weights = nullptr;
    ResourcePool* pool = nullptr;
    Ms lease_duration = 0;
    double lambda = 0;
};

struct MigrationOutcome {
    std::optional<FailureCause> abort_cause;  // empty on success
    Ms elapsed = 0;
    // False only when a source-plane lease expired mid-pipeline; an abort
    // then loses the session instead of preserving the old binding.
    bool source_preserved = true;

    bool migrated() const { return !abort_cause.has_value(); }
};

// Snapshot handed to the step observer after every pipeline step, so
// harnesses can check continuity invariants at each instant.
struct MigrationStep {
    MigrationStage stage = MigrationStage::Discover;
    const AiSessionRecord* session = nullptr;
    const ResourcePool* pool = nullptr;
    const PreparedPair* source = nullptr;  // null once the source is released
    const PreparedPair* target = nullptr;  // null until prepare succeeds
};

using MigrationObserver = std::function<void(const MigrationStep&)>;

// Make-before-break migration. Re-runs discovery and anchoring against the
// catalog minus the current binding, prepares and commits the target while
// the source stays committed, transfers state and only then cuts over and
// releases the source. Any failure before cutover aborts, tears down
// whatever the target holds and leaves the session serving on the source
// binding; the whole pipeline must finish within the policy budget.
// Precondition: session is Serving (else ProtocolError).
MigrationOutcome migrate(AiSessionRecord& session, const MigrationEnv& env,
                         const MigrationPolicy& policy, Ms now,
                         const MigrationTimings& timings = {},
                         const MigrationFaults& faults = {},
                         const TraceSink& trace = {},
                         const MigrationObserver& observer = {});

}  // namespace neaiaas
