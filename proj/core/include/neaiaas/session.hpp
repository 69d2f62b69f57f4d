#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "neaiaas/lease.hpp"
#include "neaiaas/result.hpp"

namespace neaiaas {

enum class SessionState {
    Idle,
    Discovering,
    Anchored,
    Preparing,
    Committed,
    Serving,
    Migrating,
    Released,
    Failed,
};

bool is_terminal(SessionState s);
std::string_view session_state_name(SessionState s);

// Pipeline phase a timer budget governs.
enum class TimerPhase { Discover, Page, Prepare, Commit, Migrate };
std::string_view timer_phase_name(TimerPhase p);

// Consent / authorization scope reference. `valid` flips to false when the
// subject revokes; a session may never serve past that point.
struct AuthzRef {
    std::string ref;
    bool valid = false;
};

struct LifecycleEvent {
    enum class Kind {
        DiscoverDone,
        AnchorDone,
        PrepareDone,
        CommitDone,
        ServeStart,
        PhaseFailed,
        LeaseExpired,
        ConsentRevoked,
        MigrationStart,
        MigrationCommit,
        MigrationAbort,
        Release,
        TimerExpired,
    };

    Kind kind = Kind::Release;
    std::optional<Plane> plane;          // LeaseExpired
    std::optional<TimerPhase> phase;     // TimerExpired
    std::optional<FailureCause> cause;   // PhaseFailed, MigrationAbort

    static LifecycleEvent discover_done() { return {Kind::DiscoverDone, {}, {}, {}}; }
    static LifecycleEvent anchor_done() { return {Kind::AnchorDone, {}, {}, {}}; }
    static LifecycleEvent prepare_done() { return {Kind::PrepareDone, {}, {}, {}}; }
    static LifecycleEvent commit_done() { return {Kind::CommitDone, {}, {}, {}}; }
    static LifecycleEvent serve_start() { return {Kind::ServeStart, {}, {}, {}}; }
    static LifecycleEvent phase_failed(FailureCause c) { return {Kind::PhaseFailed, {}, {}, c}; }
    static LifecycleEvent lease_expired(Plane p) { return {Kind::LeaseExpired, p, {}, {}}; }
    static LifecycleEvent consent_revoked() { return {Kind::ConsentRevoked, {}, {}, {}}; }
    static LifecycleEvent migration_start() { return {Kind::MigrationStart, {}, {}, {}}; }
    static LifecycleEvent migration_commit() { return {Kind::MigrationCommit, {}, {}, {}}; }
    static LifecycleEvent migration_abort(FailureCause c) { return {Kind::MigrationAbort, {}, {}, c}; }
    static LifecycleEvent release() { return {Kind::Release, {}, {}, {}}; }
    static LifecycleEvent timer_expired(TimerPhase p) { return {Kind::TimerExpired, {}, p, {}}; }
};

std::string_view event_kind_name(LifecycleEvent::Kind k);

// Authoritative per-session record.
struct AiSessionRecord {
    std::uint64_t session_id = 0;
    std::uint64_t asp_digest = 0;

    std::string model_id;
    std::string model_version;
    std::string anchor_site;
    std::string service_endpoint;

    std::optional<LeaseToken> compute_lease;
    std::optional<LeaseToken> qos_lease;
    std::string qos_flow_handle;
    std::string steering_handle;

    AuthzRef authz;
    std::string charging_ref;

    SessionState state = SessionState::Idle;
    std::optional<FailureCause> cause;  // set on Failed, and on consent-driven Release

    bool serving_enabled = false;       // cleared permanently on consent revocation
    bool source_lease_lost = false;     // a source-plane lease expired mid-migration

    // Cause of the most recent aborted migration, kept for diagnostics even
    // though the session itself continues on the old binding.
    std::optional<FailureCause> last_migration_cause;

    // True iff both lease tokens are present, confirmed and unexpired.
    bool lease_pair_confirmed(Ms now) const;
};

// Applies one lifecycle event and returns the successor record. Pure with
// respect to resource managers: lease bookkeeping is the caller's job and
// is validated, not performed, here. Undefined (state, event) pairs throw
// ProtocolError, as do events on terminal sessions.
AiSessionRecord transition(AiSessionRecord s, const LifecycleEvent& ev, Ms now);

}  // namespace neaiaas
