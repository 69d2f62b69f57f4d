#include "neaiaas/anchoring.hpp"

#include <algorithm>
#include <cmath>

namespace neaiaas {

double ContextSummary::load_for(const std::string& site_id) const {
    auto it = site_load.find(site_id);
    return it == site_load.end() ? default_load : it->second;
}

Ms ContextSummary::backhaul_rtt(SiteClass c, const LatencyModel& model) const {
    switch (c) {
        case SiteClass::Edge: return backhaul_rtt_edge.value_or(model.site_offset_edge);
        case SiteClass::Regional:
            return backhaul_rtt_regional.value_or(model.site_offset_regional);
        case SiteClass::Central:
            return backhaul_rtt_central.value_or(model.site_offset_central);
    }
    throw ProtocolError("unknown SiteClass value");
}

Status validate_weights(const RiskWeights& w) {
    if (!std::isfinite(w.w1) || !std::isfinite(w.w2) || !std::isfinite(w.w3) || w.w1 < 0 ||
        w.w2 < 0 || w.w3 < 0) {
        return Status::fail(FailureCause::PolicyDenial, "risk weights must be >= 0");
    }
    if (w.w1 + w.w2 + w.w3 <= 0) {
        return Status::fail(FailureCause::PolicyDenial, "risk weights must not all be zero");
    }
    return Status();
}

double HandoverHazard::kappa(SiteClass c) const {
    switch (c) {
        case SiteClass::Edge: return kappa_edge;
        case SiteClass::Regional: return kappa_regional;
        case SiteClass::Central: return kappa_central;
    }
    throw ProtocolError("unknown SiteClass value");
}

namespace {

// Effective tail-latency medians for a candidate site under the given
// load; the same composition the simulator draws from, collapsed to a
// single lognormal around the deterministic terms.
struct PluginMedians {
    double tail;  // full-turn latency
    double ff;    // time to first response
};

PluginMedians plugin_medians(SiteClass site_class, double load, const ContextSummary& ctx,
                             const LatencyModel& m) {
    double clamped = std::clamp(load, 0.0, 0.999);
    double wq = wq_mean(clamped, m.service_mean);
    double net = m.net_qos_base + ctx.backhaul_rtt(site_class, m);
    return {wq + m.infer_median + net, wq + m.ttfb_fraction * m.infer_median + net};
}

}  // namespace

RiskEstimate predict_risk(const CandidateBinding& c, const ContextSummary& ctx,
                          const ValidatedProfile& asp, const LatencyModel& model,
                          const HandoverHazard& hazard) {
    if (!(ctx.mobility_speed >= 0) || !std::isfinite(ctx.mobility_speed)) {
        throw ProtocolError("context mobility_speed must be finite and >= 0");
    }
    if (!(hazard.ref_speed > 0)) throw ProtocolError("hazard ref_speed must be > 0");

    double load = ctx.load_for(c.entry.site_id);
    if (!std::isfinite(load) || load < 0 || load >= 1) {
        throw ProtocolError("context load must lie in [0, 1)");
    }

    PluginMedians med = plugin_medians(c.entry.site_class, load, ctx, model);

    RiskEstimate r;
    r.p_tail_violation = lognormal_tail_prob(asp->p99_bound, med.tail, model.infer_sigma);
    r.p_ff_violation = lognormal_tail_prob(asp->ttfb_bound, med.ff, model.infer_sigma);
    // Exponential handover hazard in speed, scaled by how exposed the site
    // class is to cell changes.
    r.p_migration =
        1.0 - std::exp(-(ctx.mobility_speed / hazard.ref_speed) * hazard.kappa(c.entry.site_class));
    return r;
}

Result<std::pair<CandidateBinding, RiskEstimate>> select_anchor(
    const std::vector<CandidateBinding>& candidates, const ContextSummary& ctx,
    const ValidatedProfile& asp, const RiskWeights& weights, const LatencyModel& model,
    const HandoverHazard& hazard) {
    using R = Result<std::pair<CandidateBinding, RiskEstimate>>;

    if (Status s = validate_weights(weights); !s.ok()) {
        throw ProtocolError("select_anchor with invalid weights: " + s.failure().detail);
    }

    const CandidateBinding* best = nullptr;
    RiskEstimate best_risk{};
    double best_score = 0;

    for (const CandidateBinding& c : candidates) {
        if (!c.compliant()) continue;  // committed selection refuses flagged candidates
        if (!admissibility_filter(c.entry, asp)) {
            throw ProtocolError("non-admissible candidate reached select_anchor");
        }
        RiskEstimate r = predict_risk(c, ctx, asp, model, hazard);
        double score = weights.w1 * r.p_tail_violation + weights.w2 * r.p_ff_violation +
                       weights.w3 * r.p_migration;
        bool better = false;
        if (!best) {
            better = true;
        } else if (score != best_score) {
            better = score < best_score;
        } else if (c.est_cost != best->est_cost) {
            better = c.est_cost < best->est_cost;
        } else if (c.entry.model_id != best->entry.model_id) {
            better = c.entry.model_id < best->entry.model_id;
        } else if (c.entry.site_id != best->entry.site_id) {
            better = c.entry.site_id < best->entry.site_id;
        } else {
            better = c.entry.model_version < best->entry.model_version;
        }
        if (better) {
            best = &c;
            best_risk = r;
            best_score = score;
        }
    }

    if (!best) {
        return R::fail(FailureCause::NoFeasibleBinding,
                       "no compliant candidate to anchor (all negative-slack or none)");
    }
    return std::make_pair(*best, best_risk);
}

Estimates AnalyticPredictor::estimate(const CatalogEntry& entry) const {
    PluginMedians med =
        plugin_medians(entry.site_class, ctx_.load_for(entry.site_id), ctx_, model_);
    Estimates e;
    e.est_ttfb = med.ff;
    e.est_p99 = lognormal_quantile(0.99, med.tail, model_.infer_sigma);
    e.est_cost = entry.base_cost;
    return e;
}

}  // namespace neaiaas
