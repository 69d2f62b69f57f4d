#include "neaiaas/trace.hpp"

#include <ostream>

#include <json.hpp>

namespace neaiaas {

void TraceLog::write_jsonl(std::ostream& os) const {
    for (const TraceEvent& e : events_) {
        nlohmann::ordered_json j;
        j["timestamp"] = e.t;
        j["session_id"] = e.session_id;
        j["state_before"] = session_state_name(e.state_before);
        j["event"] = event_kind_name(e.event);
        j["state_after"] = session_state_name(e.state_after);
        if (e.cause) j["cause"] = failure_cause_name(*e.cause);
        os << j.dump() << '\n';
    }
}

AiSessionRecord apply_transition(AiSessionRecord s, const LifecycleEvent& ev, Ms now,
                                 const TraceSink& sink) {
    TraceEvent te;
    te.t = now;
    te.session_id = s.session_id;
    te.state_before = s.state;
    te.event = ev.kind;
    bool was_migrating = s.state == SessionState::Migrating;
    AiSessionRecord next = transition(std::move(s), ev, now);
    te.state_after = next.state;
    if (next.state == SessionState::Failed) {
        te.cause = next.cause;
    } else if (next.state == SessionState::Released && next.cause) {
        te.cause = next.cause;
    } else if (was_migrating && next.state == SessionState::Serving &&
               (ev.kind == LifecycleEvent::Kind::MigrationAbort ||
                ev.kind == LifecycleEvent::Kind::TimerExpired)) {
        // Abort back to the source: log why the migration died even though
        // the session itself survives.
        te.cause = next.last_migration_cause;
    }
    if (sink) sink(te);
    return next;
}

}  // namespace neaiaas
