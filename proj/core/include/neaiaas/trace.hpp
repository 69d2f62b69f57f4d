#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "neaiaas/session.hpp"

namespace neaiaas {

// One applied lifecycle transition, as logged.
struct TraceEvent {
    Ms t = 0;
    std::uint64_t session_id = 0;
    SessionState state_before = SessionState::Idle;
    LifecycleEvent::Kind event = LifecycleEvent::Kind::Release;
    SessionState state_after = SessionState::Idle;
    std::optional<FailureCause> cause;
};

using TraceSink = std::function<void(const TraceEvent&)>;

// In-memory event log with line-delimited JSON export. Keys per line:
// timestamp, session_id, state_before, event, state_after and, when set,
// cause.
class TraceLog {
public:
    void append(const TraceEvent& e) { events_.push_back(e); }
    const std::vector<TraceEvent>& events() const { return events_; }

    TraceSink sink() {
        return [this](const TraceEvent& e) { append(e); };
    }

    void write_jsonl(std::ostream& os) const;

private:
    std::vector<TraceEvent> events_;
};

// transition() plus trace emission; the one way session state is advanced
// anywhere record-keeping matters.
AiSessionRecord apply_transition(AiSessionRecord s, const LifecycleEvent& ev, Ms now,
                                 const TraceSink& sink);

}  // namespace neaiaas
