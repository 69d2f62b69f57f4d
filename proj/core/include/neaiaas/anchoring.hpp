#pragma once

#include <map>
#include <utility>

#include "neaiaas/catalog.hpp"
#include "neaiaas/latency_model.hpp"
#include "neaiaas/profile.hpp"

namespace neaiaas {

// Operator-side view of current conditions used by the anchor decision.
struct ContextSummary {
    std::map<std::string, double> site_load;  // utilization per site, [0, 1)
    double default_load = 0.0;                // for sites without an entry
    double mobility_speed = 0.0;              // client speed, m/s

    // Measured backhaul RTT per site class; when unset, the latency model's
    // static site offset stands in.
    std::optional<double> backhaul_rtt_edge;
    std::optional<double> backhaul_rtt_regional;
    std::optional<double> backhaul_rtt_central;

    double load_for(const std::string& site_id) const;
    Ms backhaul_rtt(SiteClass c, const LatencyModel& model) const;
};

struct RiskEstimate {
    double p_tail_violation = 0;  // P[window p99 ends up past its bound]
    double p_ff_violation = 0;    // P[TTFB ends up past its bound]
    double p_migration = 0;       // P[a handover forces migration in-window]
};

struct RiskWeights {
    double w1 = 1.0;  // tail violations
    double w2 = 1.0;  // first-feedback violations
    double w3 = 1.0;  // migration churn
};

Status validate_weights(const RiskWeights& w);

// Handover hazard shape: faster clients and smaller cells migrate more.
struct HandoverHazard {
    double ref_speed = 10.0;      // m/s at which kappa applies in full
    double kappa_edge = 1.0;
    double kappa_regional = 0.3;
    double kappa_central = 0.0;   // central anchors survive handovers

    double kappa(SiteClass c) const;
};

// Closed-form plug-in risk predictor for one candidate under the current
// context. Deterministic; out-of-range context (load outside [0,1),
// negative speed) throws ProtocolError.
RiskEstimate predict_risk(const CandidateBinding& c, const ContextSummary& ctx,
                          const ValidatedProfile& asp, const LatencyModel& model,
                          const HandoverHazard& hazard);

// Anchor selection: drops non-compliant candidates, re-asserts
// admissibility, scores the rest by weighted risk and returns the
// minimizer. Ties break by (est_cost, model_id, site_id, model_version).
// An empty compliant set is no_feasible_binding.
Result<std::pair<CandidateBinding, RiskEstimate>> select_anchor(
    const std::vector<CandidateBinding>& candidates, const ContextSummary& ctx,
    const ValidatedProfile& asp, const RiskWeights& weights, const LatencyModel& model,
    const HandoverHazard& hazard);

// Discovery-time estimate source backed by the same analytic latency model
// the risk predictor uses: sessions ride qos flows, so the network term is
// the qos base plus the site-class offset, and queueing follows the
// context's per-site load.
class AnalyticPredictor : public EstimateSource {
public:
    AnalyticPredictor(const LatencyModel& model, const ContextSummary& ctx)
        : model_(model), ctx_(ctx) {}

    Estimates estimate(const CatalogEntry& entry) const override;

private:
    const LatencyModel& model_;
    const ContextSummary& ctx_;
};

}  // namespace neaiaas
