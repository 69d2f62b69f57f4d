#include "neaiaas/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace neaiaas {

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ProtocolError("quantile of an empty list");
    if (!(p > 0.0) || p > 1.0 || !std::isfinite(p)) {
        throw ProtocolError("quantile order must lie in (0, 1]");
    }
    // Nearest rank: k-th smallest with k = ceil(p * n), clamped to [1, n].
    const std::size_t n = values.size();
    auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    std::nth_element(values.begin(), values.begin() + (k - 1), values.end());
    return values[k - 1];
}

Status ingest(TelemetryWindow& w, const RequestSample& s, const AiSessionRecord& session) {
    if (!session.authz.valid || !session.serving_enabled) {
        return Status::fail(FailureCause::ConsentViolation,
                            "sample rejected: authorization revoked or serving disabled");
    }
    if (session.state != SessionState::Serving) {
        throw ProtocolError("ingest on a session that is not Serving");
    }
    if (!(w.window_end > w.window_start)) {
        throw ProtocolError("ingest into a window with non-positive span");
    }
    if (s.at < w.window_start || s.at >= w.window_end) {
        throw ProtocolError("sample timestamp outside the window");
    }
    if (!std::isfinite(s.ttfb) || !std::isfinite(s.total_latency) ||
        !std::isfinite(s.queue_delay_proxy) || !std::isfinite(s.delivered_rate) || s.ttfb < 0 ||
        s.total_latency < 0 || s.queue_delay_proxy < 0 || s.delivered_rate < 0) {
        throw ProtocolError("malformed sample: negative or non-finite field");
    }
    if (s.completed && s.ttfb > s.total_latency) {
        throw ProtocolError("malformed sample: ttfb exceeds total latency");
    }
    w.samples.push_back(s);
    return Status();
}

WindowStats window_stats(const TelemetryWindow& w, const ValidatedProfile& asp) {
    if (w.samples.empty()) throw ProtocolError("window_stats over an empty window");

    WindowStats out;
    out.n_samples = w.samples.size();

    std::vector<double> censored;
    std::vector<double> ttfbs;
    censored.reserve(out.n_samples);
    ttfbs.reserve(out.n_samples);

    double queue_sum = 0;
    double rate_sum = 0;
    for (const RequestSample& s : w.samples) {
        // Censoring: a request that never finished counts at the timeout.
        censored.push_back(s.completed ? s.total_latency : asp->hard_timeout);
        ttfbs.push_back(s.ttfb);
        queue_sum += s.queue_delay_proxy;
        if (s.completed) {
            out.n_completed += 1;
            rate_sum += s.delivered_rate;
        }
    }

    out.ttfb_hat = quantile(ttfbs, 0.5);
    out.q95_hat = quantile(censored, 0.95);
    out.q99_hat = quantile(censored, 0.99);
    out.rho_hat = static_cast<double>(out.n_completed) / static_cast<double>(out.n_samples);
    out.queue_hat = queue_sum / static_cast<double>(out.n_samples);
    out.rate_hat = out.n_completed ? rate_sum / static_cast<double>(out.n_completed) : 0.0;
    return out;
}

void write_samples_csv(const TelemetryWindow& w, std::ostream& os) {
    os << "at,ttfb,total_latency,completed,queue_delay_proxy,delivered_rate\n";
    char buf[160];
    for (const RequestSample& s : w.samples) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%d,%.6g,%.6g\n", s.at, s.ttfb,
                      s.total_latency, s.completed ? 1 : 0, s.queue_delay_proxy,
                      s.delivered_rate);
        os << buf;
    }
}

}  // namespace neaiaas
