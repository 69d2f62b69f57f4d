#include "neaiaas/runner.hpp"

#include <string>

#include "neaiaas/latency_model.hpp"
#include "neaiaas/sim.hpp"

namespace neaiaas {

std::string_view lifecycle_stage_name(LifecycleStage s) {
    switch (s) {
        case LifecycleStage::Discover: return "discover";
        case LifecycleStage::Page: return "page";
        case LifecycleStage::Prepare: return "prepare";
        case LifecycleStage::Commit: return "commit";
        case LifecycleStage::Serve: return "serve";
        case LifecycleStage::Migrate: return "migrate";
    }
    throw ProtocolError("unknown LifecycleStage value");
}

std::optional<LifecycleStage> lifecycle_stage_from_name(std::string_view s) {
    if (s == "discover") return LifecycleStage::Discover;
    if (s == "page") return LifecycleStage::Page;
    if (s == "prepare") return LifecycleStage::Prepare;
    if (s == "commit") return LifecycleStage::Commit;
    if (s == "serve") return LifecycleStage::Serve;
    if (s == "migrate") return LifecycleStage::Migrate;
    return std::nullopt;
}

namespace {

bool inject_at(const RunFaults& f, LifecycleStage stage, FailureCause cause) {
    return f.stage && *f.stage == stage && f.cause && *f.cause == cause;
}

bool inject_deadline(const RunFaults& f, LifecycleStage stage) {
    return inject_at(f, stage, FailureCause::DeadlineExpiry);
}

}  // namespace

RunReport run_session(const RunnerEnv& env, std::uint64_t seed, const TraceSink& sink,
                      const RunFaults& faults, const PhaseDurations& durations) {
    if (!env.asp || !env.timers || !env.catalog || !env.model || !env.ctx || !env.weights ||
        !env.hazard || !env.policy) {
        throw ProtocolError("run_session with an incomplete environment");
    }
    if (faults.stage.has_value() != faults.cause.has_value()) {
        throw ProtocolError("fault injection needs both a stage and a cause");
    }

    const ValidatedProfile& asp = *env.asp;
    const TimerConfig& timers = *env.timers;

    // Faults are realized by editing the world the session runs against,
    // never by fabricating results: an empty or zone-shifted catalog,
    // zeroed capacities, an unknown requested model, inflated phase
    // durations, a revocation event, a transfer fault.
    Catalog catalog = *env.catalog;
    if (inject_at(faults, LifecycleStage::Discover, FailureCause::NoFeasibleBinding)) {
        catalog = Catalog::from_entries({}).value();
    }
    if (inject_at(faults, LifecycleStage::Discover, FailureCause::SovereigntyViolation)) {
        if (asp->privacy_scope == PrivacyScope::Open) {
            throw ProtocolError("sovereignty injection needs a non-open privacy scope");
        }
        std::vector<CatalogEntry> shifted = catalog.entries();
        for (CatalogEntry& e : shifted) e.sovereignty_zone = SovereigntyZone::Global;
        catalog = Catalog::from_entries(std::move(shifted)).value();
    }
    DiscoverOptions dopts{env.lambda, {}};
    if (inject_at(faults, LifecycleStage::Discover, FailureCause::ModelUnavailable)) {
        dopts.requested_model = "injected-missing-model";
    }

    int site_capacity = env.site_capacity;
    int qos_budget = env.qos_budget;
    if (inject_at(faults, LifecycleStage::Prepare, FailureCause::ComputeScarcity)) {
        site_capacity = 0;
    }
    if (inject_at(faults, LifecycleStage::Prepare, FailureCause::QosScarcity)) qos_budget = 0;

    ResourcePool pool;
    for (const CatalogEntry& e : catalog.entries()) {
        if (!pool.find_site(e.site_id)) pool.add_site(e.site_id, site_capacity);
    }
    pool.set_qos_budget(qos_budget);

    RunReport report;
    AiSessionRecord& s = report.session;
    s.session_id = 1;
    s.asp_digest = asp.digest();
    s.authz = AuthzRef{"authz-" + std::to_string(seed), true};
    s.charging_ref = "chg-" + std::to_string(seed);

    Rng rng(seed);
    Ms t = 0;

    auto fail_phase = [&](FailureCause cause, Ms when) {
        s = apply_transition(std::move(s), LifecycleEvent::phase_failed(cause), when, sink);
    };
    auto timer_blow = [&](TimerPhase phase, Ms when) {
        s = apply_transition(std::move(s), LifecycleEvent::timer_expired(phase), when, sink);
    };

    // ---- discover ----------------------------------------------------
    Ms d_disc = inject_deadline(faults, LifecycleStage::Discover) ? timers.tau_disc + 1
                                                                  : durations.discover;
    ContextSummary ctx = *env.ctx;
    AnalyticPredictor predictor(*env.model, ctx);
    auto cands = discover(asp, catalog, predictor, dopts);
    t += d_disc;
    if (t > timers.tau_disc) {
        timer_blow(TimerPhase::Discover, t);
        return report;
    }
    if (!cands.ok()) {
        fail_phase(cands.cause(), t);
        return report;
    }
    s = apply_transition(std::move(s), LifecycleEvent::discover_done(), t, sink);

    // ---- page --------------------------------------------------------
    Ms phase_start = t;
    Ms d_page =
        inject_deadline(faults, LifecycleStage::Page) ? timers.tau_page + 1 : durations.page;
    auto anchor = select_anchor(cands.value(), ctx, asp, *env.weights, *env.model, *env.hazard);
    t = phase_start + d_page;
    if (t - phase_start > timers.tau_page) {
        timer_blow(TimerPhase::Page, t);
        return report;
    }
    if (!anchor.ok()) {
        fail_phase(anchor.cause(), t);
        return report;
    }
    const CandidateBinding& chosen = anchor.value().first;
    s.model_id = chosen.entry.model_id;
    s.model_version = chosen.entry.model_version;
    s.anchor_site = chosen.entry.site_id;
    s.service_endpoint = chosen.entry.site_id + "/" + chosen.entry.model_id;
    s = apply_transition(std::move(s), LifecycleEvent::anchor_done(), t, sink);

    // ---- prepare -----------------------------------------------------
    phase_start = t;
    Ms d_prep = inject_deadline(faults, LifecycleStage::Prepare) ? timers.tau_prep + 1
                                                                 : durations.prepare;
    auto pair = prepare(pool, chosen.entry.site_id, t, timers.lease_duration);
    t = phase_start + d_prep;
    if (t - phase_start > timers.tau_prep) {
        if (pair.ok()) rollback(pool, refresh_pair(pool, pair.value()));
        timer_blow(TimerPhase::Prepare, t);
        return report;
    }
    if (!pair.ok()) {
        fail_phase(pair.cause(), t);
        return report;
    }
    s = apply_transition(std::move(s), LifecycleEvent::prepare_done(), t, sink);

    // ---- commit ------------------------------------------------------
    phase_start = t;
    Ms d_com =
        inject_deadline(faults, LifecycleStage::Commit) ? timers.tau_com + 1 : durations.commit;
    t = phase_start + d_com;
    if (t - phase_start > timers.tau_com) {
        rollback(pool, refresh_pair(pool, pair.value()));
        timer_blow(TimerPhase::Commit, t);
        return report;
    }
    auto committed = commit(pool, pair.value(), t);
    if (!committed.ok()) {
        fail_phase(committed.cause(), t);
        return report;
    }
    s.compute_lease = committed.value().compute;
    s.qos_lease = committed.value().qos;
    s.qos_flow_handle = committed.value().qos.site_or_flow;
    s.steering_handle = "steer-" + std::to_string(committed.value().compute.lease_id);
    s = apply_transition(std::move(s), LifecycleEvent::commit_done(), t, sink);

    // ---- serve -------------------------------------------------------
    s = apply_transition(std::move(s), LifecycleEvent::serve_start(), t, sink);

    TelemetryWindow window;
    window.window_start = t;
    window.window_end = t + env.serve_samples * env.serve_spacing;

    const LatencyModel& m = *env.model;
    double anchor_load = env.serve_load;
    int revoke_at = inject_at(faults, LifecycleStage::Serve, FailureCause::ConsentViolation)
                        ? env.serve_samples / 2
                        : -1;

    for (int i = 0; i < env.serve_samples; ++i) {
        Ms at = window.window_start + i * env.serve_spacing;
        if (i == revoke_at) {
            s = apply_transition(std::move(s), LifecycleEvent::consent_revoked(), at, sink);
            release_pair(pool, refresh_pair(pool, committed.value()));
            // One post-revocation sample to witness the boundary rejection.
            RequestSample dead;
            dead.at = at;
            Status st = ingest(window, dead, s);
            if (st.ok() || st.cause() != FailureCause::ConsentViolation) {
                throw ProtocolError("post-revocation ingest was not rejected as consent_violation");
            }
            break;
        }
        RequestSample sample;
        sample.at = at;
        double wq = sample_wq(anchor_load, m.service_mean, rng);
        double infer = rng.lognormal(m.infer_median, m.infer_sigma);
        double net = m.net_qos_base + rng.uniform(-m.net_qos_jitter, m.net_qos_jitter) +
                     m.site_offset(chosen.entry.site_class);
        if (net < 0) net = 0;
        sample.total_latency = wq + infer + net;
        sample.ttfb = wq + m.ttfb_fraction * infer + net;
        sample.completed = sample.total_latency <= asp->hard_timeout;
        sample.queue_delay_proxy = wq;
        sample.delivered_rate = m.rate_nominal * (m.infer_median / infer);
        Status st = ingest(window, sample, s);
        if (!st.ok()) throw ProtocolError("live sample rejected: " + st.failure().detail);
    }

    if (s.state == SessionState::Released) {
        // Consent revocation ended the session inside the window.
        if (!window.samples.empty()) {
            report.stats = window_stats(window, asp);
        }
        return report;
    }

    t = window.window_end;
    report.stats = window_stats(window, asp);
    report.verdict = evaluate_compliance(*report.stats, asp);

    // ---- migrate -----------------------------------------------------
    // Re-check risk under the post-serve context (the anchor's load has
    // moved); a fired trigger starts the make-before-break pipeline.
    ContextSummary post_ctx = ctx;
    post_ctx.site_load[chosen.entry.site_id] = env.post_serve_load;
    CandidateBinding current = chosen;
    RiskEstimate risk = predict_risk(current, post_ctx, asp, m, *env.hazard);
    report.migration_triggered = check_trigger(risk, *env.policy);

    if (report.migration_triggered) {
        AnalyticPredictor post_predictor(m, post_ctx);
        MigrationEnv menv;
        menv.asp = &asp;
        menv.catalog = &catalog;
        menv.predictor = &post_predictor;
        menv.ctx = &post_ctx;
        menv.model = &m;
        menv.hazard = env.hazard;
        menv.weights = env.weights;
        menv.pool = &pool;
        menv.lease_duration = timers.lease_duration;
        menv.lambda = env.lambda;

        MigrationPolicy policy = *env.policy;
        policy.tau_mig = timers.tau_mig;

        MigrationTimings timings;
        MigrationFaults mfaults;
        if (faults.stage && *faults.stage == LifecycleStage::Migrate) {
            if (*faults.cause == FailureCause::DeadlineExpiry) {
                timings.state_transfer = timers.tau_mig + 1;
            } else if (*faults.cause == FailureCause::StateTransferFailure) {
                mfaults.stage = MigrationStage::StateTransfer;
                mfaults.cause = FailureCause::StateTransferFailure;
            } else {
                throw ProtocolError("unsupported migrate-stage injection");
            }
        }
        report.migration = migrate(s, menv, policy, t, timings, mfaults, sink);
        t += report.migration->elapsed;
        if (s.state == SessionState::Failed) return report;
    }

    // ---- release -----------------------------------------------------
    s = apply_transition(std::move(s), LifecycleEvent::release(), t, sink);
    if (s.compute_lease && s.qos_lease) {
        release_pair(pool, refresh_pair(pool, PreparedPair{*s.compute_lease, *s.qos_lease}));
    }
    return report;
}

}  // namespace neaiaas
