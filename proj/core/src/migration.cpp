#include "neaiaas/migration.hpp"

#include <cmath>

namespace neaiaas {

Status validate_policy(const MigrationPolicy& p) {
    auto deny = [](const char* field, const char* why) {
        return Status::fail(FailureCause::PolicyDenial, std::string(field) + ": " + why);
    };
    if (!std::isfinite(p.delta) || p.delta <= 0 || p.delta > 1) {
        return deny("delta", "must lie in (0, 1]");
    }
    if (!std::isfinite(p.delta_prime) || p.delta_prime <= 0 || p.delta_prime > 1) {
        return deny("delta_prime", "must lie in (0, 1]");
    }
    if (!std::isfinite(p.tau_mig) || p.tau_mig <= 0) {
        return deny("tau_mig", "must be finite and > 0");
    }
    return Status();
}

bool check_trigger(const RiskEstimate& r, const MigrationPolicy& p) {
    return r.p_tail_violation >= p.delta || r.p_ff_violation >= p.delta_prime;
}

std::string_view migration_stage_name(MigrationStage s) {
    switch (s) {
        case MigrationStage::Discover: return "discover";
        case MigrationStage::Page: return "page";
        case MigrationStage::Prepare: return "prepare";
        case MigrationStage::Commit: return "commit";
        case MigrationStage::StateTransfer: return "state_transfer";
        case MigrationStage::Cutover: return "cutover";
    }
    throw ProtocolError("unknown MigrationStage value");
}

namespace {

struct Pipeline {
    AiSessionRecord& session;
    const MigrationEnv& env;
    const MigrationPolicy& policy;
    const MigrationFaults& faults;
    const TraceSink& trace;
    const MigrationObserver& observer;
    Ms start;
    Ms t;

    PreparedPair source;
    std::optional<PreparedPair> target;
    bool source_released = false;

    void observe(MigrationStage stage) {
        if (!observer) return;
        MigrationStep step;
        step.stage = stage;
        step.session = &session;
        step.pool = env.pool;
        step.source = source_released ? nullptr : &source;
        step.target = target ? &*target : nullptr;
        observer(step);
    }

    // Advances the modeled clock through one stage and applies lease aging;
    // expirations hitting the source are reflected in the session record.
    void advance(Ms duration) {
        t += duration;
        for (const LeaseExpiry& ex : lease_tick(*env.pool, t)) {
            bool on_source = !source_released && (ex.lease_id == source.compute.lease_id ||
                                                  ex.lease_id == source.qos.lease_id);
            if (on_source) {
                Plane plane =
                    ex.lease_id == source.compute.lease_id ? Plane::Compute : Plane::Qos;
                session = apply_transition(std::move(session),
                                           LifecycleEvent::lease_expired(plane), t, trace);
            }
        }
    }

    bool injected(MigrationStage stage) const {
        return faults.stage && *faults.stage == stage && faults.cause;
    }

    bool over_budget() const { return t - start > policy.tau_mig; }

    MigrationOutcome abort(FailureCause why) {
        // Tear down whatever the target holds; the source is untouched
        // unless its own leases lapsed above.
        if (target) {
            release_pair(*env.pool, refresh_pair(*env.pool, *target));
            target.reset();
        }
        session = apply_transition(std::move(session), LifecycleEvent::migration_abort(why), t,
                                   trace);
        MigrationOutcome out;
        out.abort_cause = why;
        out.elapsed = t - start;
        out.source_preserved = session.state == SessionState::Serving;
        return out;
    }
};

}  // namespace

MigrationOutcome migrate(AiSessionRecord& session, const MigrationEnv& env,
                         const MigrationPolicy& policy, Ms now,
                         const MigrationTimings& timings, const MigrationFaults& faults,
                         const TraceSink& trace, const MigrationObserver& observer) {
    if (session.state != SessionState::Serving) {
        throw ProtocolError("migrate on a session that is not Serving");
    }
    if (!env.asp || !env.catalog || !env.predictor || !env.ctx || !env.model || !env.hazard ||
        !env.weights || !env.pool) {
        throw ProtocolError("migrate with an incomplete environment");
    }
    if (!session.compute_lease || !session.qos_lease) {
        throw ProtocolError("migrate on a session without a lease pair");
    }
    if (faults.stage.has_value() != faults.cause.has_value()) {
        throw ProtocolError("fault injection needs both a stage and a cause");
    }

    Pipeline pipe{session, env,
                  policy,  faults,
                  trace,   observer,
                  now,     now,
                  PreparedPair{*session.compute_lease, *session.qos_lease},
                  std::nullopt,
                  false};

    session = apply_transition(std::move(session), LifecycleEvent::migration_start(), now, trace);

    // ---- discover ----------------------------------------------------
    pipe.advance(timings.discover);
    pipe.observe(MigrationStage::Discover);
    if (pipe.injected(MigrationStage::Discover)) return pipe.abort(*faults.cause);
    if (pipe.over_budget()) return pipe.abort(FailureCause::DeadlineExpiry);

    auto cands = discover(*env.asp, *env.catalog, *env.predictor, DiscoverOptions{env.lambda, {}});
    if (!cands.ok()) return pipe.abort(cands.cause());

    // Migrating to self is a no-op that would mask trigger bugs; the
    // current binding is never a target.
    std::vector<CandidateBinding> others;
    for (const CandidateBinding& c : cands.value()) {
        bool self = c.entry.model_id == session.model_id &&
                    c.entry.model_version == session.model_version &&
                    c.entry.site_id == session.anchor_site;
        if (!self) others.push_back(c);
    }
    if (others.empty()) return pipe.abort(FailureCause::NoFeasibleBinding);

    // ---- page --------------------------------------------------------
    pipe.advance(timings.page);
    pipe.observe(MigrationStage::Page);
    if (pipe.injected(MigrationStage::Page)) return pipe.abort(*faults.cause);
    if (pipe.over_budget()) return pipe.abort(FailureCause::DeadlineExpiry);

    auto anchor = select_anchor(others, *env.ctx, *env.asp, *env.weights, *env.model, *env.hazard);
    if (!anchor.ok()) return pipe.abort(anchor.cause());
    const CandidateBinding target_binding = anchor.value().first;

    // ---- prepare (target) --------------------------------------------
    pipe.advance(timings.prepare);
    if (pipe.injected(MigrationStage::Prepare)) {
        pipe.observe(MigrationStage::Prepare);
        return pipe.abort(*faults.cause);
    }
    if (pipe.over_budget()) {
        pipe.observe(MigrationStage::Prepare);
        return pipe.abort(FailureCause::DeadlineExpiry);
    }
    auto prepared = prepare(*env.pool, target_binding.entry.site_id, pipe.t, env.lease_duration);
    if (!prepared.ok()) {
        pipe.observe(MigrationStage::Prepare);
        return pipe.abort(prepared.cause());
    }
    pipe.target = prepared.value();
    pipe.observe(MigrationStage::Prepare);

    // ---- commit (target) ---------------------------------------------
    pipe.advance(timings.commit);
    if (pipe.injected(MigrationStage::Commit)) {
        pipe.observe(MigrationStage::Commit);
        return pipe.abort(*faults.cause);
    }
    if (pipe.over_budget()) {
        pipe.observe(MigrationStage::Commit);
        return pipe.abort(FailureCause::DeadlineExpiry);
    }
    auto committed = commit(*env.pool, *pipe.target, pipe.t);
    if (!committed.ok()) {
        pipe.target.reset();  // commit failure already cleaned both leases up
        pipe.observe(MigrationStage::Commit);
        return pipe.abort(committed.cause());
    }
    pipe.target = committed.value();
    // From here to cutover the session holds two committed bindings.
    pipe.observe(MigrationStage::Commit);

    // ---- state transfer ----------------------------------------------
    pipe.advance(timings.state_transfer);
    pipe.observe(MigrationStage::StateTransfer);
    if (pipe.injected(MigrationStage::StateTransfer)) return pipe.abort(*faults.cause);
    if (pipe.over_budget()) return pipe.abort(FailureCause::DeadlineExpiry);

    // ---- cutover -----------------------------------------------------
    pipe.advance(timings.cutover);
    if (pipe.injected(MigrationStage::Cutover)) {
        pipe.observe(MigrationStage::Cutover);
        return pipe.abort(*faults.cause);
    }
    if (pipe.over_budget()) {
        pipe.observe(MigrationStage::Cutover);
        return pipe.abort(FailureCause::DeadlineExpiry);
    }

    // Source leases may have lapsed during the transfer; the target is
    // committed, so cutover still succeeds and continuity is unbroken.
    PreparedPair fresh_target = refresh_pair(*env.pool, *pipe.target);
    if (!fresh_target.compute.confirmed_valid(pipe.t) ||
        !fresh_target.qos.confirmed_valid(pipe.t)) {
        return pipe.abort(FailureCause::DeadlineExpiry);
    }

    // Install the new binding, then release the source: make before break.
    session.model_id = target_binding.entry.model_id;
    session.model_version = target_binding.entry.model_version;
    session.anchor_site = target_binding.entry.site_id;
    session.service_endpoint = target_binding.entry.site_id + "/" + target_binding.entry.model_id;
    session.compute_lease = fresh_target.compute;
    session.qos_lease = fresh_target.qos;
    session.qos_flow_handle = fresh_target.qos.site_or_flow;
    session.steering_handle = "steer-" + std::to_string(fresh_target.compute.lease_id);
    session.source_lease_lost = false;
    session = apply_transition(std::move(session), LifecycleEvent::migration_commit(), pipe.t,
                               trace);

    release_pair(*env.pool, refresh_pair(*env.pool, pipe.source));
    pipe.source_released = true;
    pipe.observe(MigrationStage::Cutover);

    MigrationOutcome out;
    out.elapsed = pipe.t - now;
    out.source_preserved = true;
    return out;
}

}  // namespace neaiaas
