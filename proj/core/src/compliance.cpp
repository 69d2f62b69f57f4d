#include "neaiaas/compliance.hpp"

namespace neaiaas {

ComplianceVerdict evaluate_compliance(const WindowStats& stats, const ValidatedProfile& asp) {
    if (stats.n_samples == 0) {
        // No evidence, no verdict.
        throw ProtocolError("evaluate_compliance over an empty window");
    }
    ComplianceVerdict v;
    v.ttfb_ok = stats.ttfb_hat <= asp->ttfb_bound;
    v.p95_ok = stats.q95_hat <= asp->p95_bound;
    v.p99_ok = stats.q99_hat <= asp->p99_bound;
    v.completion_ok = stats.rho_hat >= asp->completion_prob_min;
    v.rate_ok = stats.rate_hat >= asp->rate_min;
    return v;
}

bool request_violates(Ms latency, const AiServiceProfile& asp) {
    return latency > asp.p99_bound || latency > asp.hard_timeout;
}

}  // namespace neaiaas
