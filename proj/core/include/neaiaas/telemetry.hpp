#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "neaiaas/profile.hpp"
#include "neaiaas/session.hpp"

namespace neaiaas {

// One boundary observation of a served request.
struct RequestSample {
    Ms at = 0;              // observation timestamp
    Ms ttfb = 0;            // time to first response
    Ms total_latency = 0;   // full-turn latency
    bool completed = false; // finished within the hard timeout
    Ms queue_delay_proxy = 0;
    double delivered_rate = 0;  // units/s while streaming
};

struct TelemetryWindow {
    Ms window_start = 0;
    Ms window_end = 0;
    std::vector<RequestSample> samples;
};

// Aggregates over one serving window. Latency quantiles are computed over
// censored values: a non-completion contributes the hard timeout.
struct WindowStats {
    Ms ttfb_hat = 0;   // median observed TTFB
    Ms q95_hat = 0;
    Ms q99_hat = 0;
    double rho_hat = 0;  // completion fraction
    Ms queue_hat = 0;    // mean queue-delay proxy
    double rate_hat = 0; // mean delivered rate over completed samples
    std::size_t n_samples = 0;
    std::size_t n_completed = 0;
};

// Nearest-rank order statistic: the ceil(p*n)-th smallest value, p in (0,1].
// Empty input or out-of-domain p throws ProtocolError.
double quantile(std::vector<double> values, double p);

// Appends a boundary sample to the serving window. Fails with
// consent_violation once the session's authorization is revoked. Misuse
// (session not serving, negative durations, ttfb exceeding total latency,
// timestamp outside the window) throws ProtocolError.
Status ingest(TelemetryWindow& w, const RequestSample& s, const AiSessionRecord& session);

// Window aggregation; throws ProtocolError on an empty window.
WindowStats window_stats(const TelemetryWindow& w, const ValidatedProfile& asp);

// One row per sample: at,ttfb,total_latency,completed,queue_delay_proxy,delivered_rate
void write_samples_csv(const TelemetryWindow& w, std::ostream& os);

}  // namespace neaiaas
