#include "neaiaas/session.hpp"

#include <string>

namespace neaiaas {

bool is_terminal(SessionState s) {
    return s == SessionState::Released || s == SessionState::Failed;
}

std::string_view session_state_name(SessionState s) {
    switch (s) {
        case SessionState::Idle: return "idle";
        case SessionState::Discovering: return "discovering";
        case SessionState::Anchored: return "anchored";
        case SessionState::Preparing: return "preparing";
        case SessionState::Committed: return "committed";
        case SessionState::Serving: return "serving";
        case SessionState::Migrating: return "migrating";
        case SessionState::Released: return "released";
        case SessionState::Failed: return "failed";
    }
    throw ProtocolError("unknown SessionState value");
}

std::string_view timer_phase_name(TimerPhase p) {
    switch (p) {
        case TimerPhase::Discover: return "disc";
        case TimerPhase::Page: return "page";
        case TimerPhase::Prepare: return "prep";
        case TimerPhase::Commit: return "com";
        case TimerPhase::Migrate: return "mig";
    }
    throw ProtocolError("unknown TimerPhase value");
}

std::string_view event_kind_name(LifecycleEvent::Kind k) {
    using K = LifecycleEvent::Kind;
    switch (k) {
        case K::DiscoverDone: return "discover_done";
        case K::AnchorDone: return "anchor_done";
        case K::PrepareDone: return "prepare_done";
        case K::CommitDone: return "commit_done";
        case K::ServeStart: return "serve_start";
        case K::PhaseFailed: return "phase_failed";
        case K::LeaseExpired: return "lease_expired";
        case K::ConsentRevoked: return "consent_revoked";
        case K::MigrationStart: return "migration_start";
        case K::MigrationCommit: return "migration_commit";
        case K::MigrationAbort: return "migration_abort";
        case K::Release: return "release";
        case K::TimerExpired: return "timer_expired";
    }
    throw ProtocolError("unknown event kind");
}

bool AiSessionRecord::lease_pair_confirmed(Ms now) const {
    return compute_lease && qos_lease && compute_lease->confirmed_valid(now) &&
           qos_lease->confirmed_valid(now);
}

namespace {

[[noreturn]] void undefined_pair(SessionState s, const LifecycleEvent& ev) {
    throw ProtocolError(std::string("event ") + std::string(event_kind_name(ev.kind)) +
                        " undefined in state " + std::string(session_state_name(s)));
}

AiSessionRecord fail_with(AiSessionRecord s, FailureCause c) {
    s.state = SessionState::Failed;
    s.cause = c;
    s.serving_enabled = false;
    return s;
}

// Shared by MigrationAbort and TimerExpired-in-Migrating: fall back to the
// source binding when it still stands, otherwise the session is lost.
AiSessionRecord abort_migration(AiSessionRecord s, FailureCause why, Ms now) {
    s.last_migration_cause = why;
    if (s.source_lease_lost || !s.lease_pair_confirmed(now)) {
        return fail_with(std::move(s), FailureCause::DeadlineExpiry);
    }
    s.state = SessionState::Serving;
    return s;
}

}  // namespace

AiSessionRecord transition(AiSessionRecord s, const LifecycleEvent& ev, Ms now) {
    using K = LifecycleEvent::Kind;

    if (is_terminal(s.state)) {
        throw ProtocolError(std::string("event on terminal session in state ") +
                            std::string(session_state_name(s.state)));
    }

    switch (ev.kind) {
        case K::DiscoverDone:
            if (s.state != SessionState::Idle) undefined_pair(s.state, ev);
            s.state = SessionState::Discovering;
            return s;

        case K::AnchorDone:
            if (s.state != SessionState::Discovering) undefined_pair(s.state, ev);
            s.state = SessionState::Anchored;
            return s;

        case K::PrepareDone:
            if (s.state != SessionState::Anchored) undefined_pair(s.state, ev);
            s.state = SessionState::Preparing;
            return s;

        case K::CommitDone:
            if (s.state != SessionState::Preparing) undefined_pair(s.state, ev);
            // The caller installs the confirmed pair before raising the
            // event; committing without one is a coordinator bug.
            if (!s.lease_pair_confirmed(now)) {
                throw ProtocolError("CommitDone without a confirmed, unexpired lease pair");
            }
            s.state = SessionState::Committed;
            return s;

        case K::ServeStart:
            if (s.state != SessionState::Committed) undefined_pair(s.state, ev);
            if (!s.authz.valid) {
                throw ProtocolError("ServeStart without valid authorization");
            }
            if (!s.lease_pair_confirmed(now)) {
                throw ProtocolError("ServeStart without a confirmed, unexpired lease pair");
            }
            s.state = SessionState::Serving;
            s.serving_enabled = true;
            return s;

        case K::PhaseFailed:
            if (!ev.cause) throw ProtocolError("PhaseFailed without a cause");
            switch (s.state) {
                case SessionState::Idle:
                case SessionState::Discovering:
                case SessionState::Anchored:
                case SessionState::Preparing:
                    return fail_with(std::move(s), *ev.cause);
                default:
                    undefined_pair(s.state, ev);
            }

        case K::LeaseExpired: {
            if (!ev.plane) throw ProtocolError("LeaseExpired without a plane");
            auto mark_expired = [&](std::optional<LeaseToken>& t) {
                if (t && t->plane == *ev.plane) t->state = LeaseState::Expired;
            };
            switch (s.state) {
                case SessionState::Preparing:
                    // A provisional lapsed before commit; the establishment
                    // deadline has effectively passed.
                    return fail_with(std::move(s), FailureCause::DeadlineExpiry);
                case SessionState::Committed:
                case SessionState::Serving:
                    mark_expired(s.compute_lease);
                    mark_expired(s.qos_lease);
                    // The surviving sibling lease is the caller's to release.
                    return fail_with(std::move(s), FailureCause::DeadlineExpiry);
                case SessionState::Migrating:
                    mark_expired(s.compute_lease);
                    mark_expired(s.qos_lease);
                    s.source_lease_lost = true;
                    return s;
                default:
                    undefined_pair(s.state, ev);
            }
        }

        case K::ConsentRevoked:
            // Revocation ends the session wherever it is; no serving
            // activity may happen after this event is processed.
            s.state = SessionState::Released;
            s.cause = FailureCause::ConsentViolation;
            s.authz.valid = false;
            s.serving_enabled = false;
            return s;

        case K::MigrationStart:
            if (s.state != SessionState::Serving) undefined_pair(s.state, ev);
            s.state = SessionState::Migrating;
            return s;

        case K::MigrationCommit:
            if (s.state != SessionState::Migrating) undefined_pair(s.state, ev);
            // The caller swaps in the target binding before raising this.
            if (!s.lease_pair_confirmed(now)) {
                throw ProtocolError("MigrationCommit without a confirmed, unexpired lease pair");
            }
            s.state = SessionState::Serving;
            return s;

        case K::MigrationAbort:
            if (s.state != SessionState::Migrating) undefined_pair(s.state, ev);
            if (!ev.cause) throw ProtocolError("MigrationAbort without a cause");
            return abort_migration(std::move(s), *ev.cause, now);

        case K::Release:
            s.state = SessionState::Released;
            s.serving_enabled = false;
            return s;

        case K::TimerExpired:
            if (!ev.phase) throw ProtocolError("TimerExpired without a phase");
            if (s.state == SessionState::Migrating) {
                // A timer lapse mid-migration aborts back to the source.
                return abort_migration(std::move(s), FailureCause::DeadlineExpiry, now);
            }
            // Every other state treats an expired timer as a blown
            // establishment deadline.
            return fail_with(std::move(s), FailureCause::DeadlineExpiry);
    }
    throw ProtocolError("unknown event kind");
}

}  // namespace neaiaas
