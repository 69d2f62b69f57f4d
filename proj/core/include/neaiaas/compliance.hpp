#pragma once

#include "neaiaas/profile.hpp"
#include "neaiaas/telemetry.hpp"

namespace neaiaas {

// Per-bound verdicts for one serving window.
struct ComplianceVerdict {
    bool ttfb_ok = false;
    bool p95_ok = false;
    bool p99_ok = false;
    bool completion_ok = false;
    bool rate_ok = false;

    bool all_ok() const { return ttfb_ok && p95_ok && p99_ok && completion_ok && rate_ok; }
};

// Compares window aggregates against the profile bounds. Deterministic pure
// function of its inputs; throws ProtocolError for an empty-window stats
// object (no default verdicts).
ComplianceVerdict evaluate_compliance(const WindowStats& stats, const ValidatedProfile& asp);

// Single-request violation test: the request is a violation when its latency
// exceeds the p99 bound or the hard timeout.
bool request_violates(Ms latency, const AiServiceProfile& asp);

}  // namespace neaiaas
