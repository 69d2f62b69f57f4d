#include "neaiaas/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <thread>

#include "neaiaas/anchoring.hpp"
#include "neaiaas/compliance.hpp"
#include "neaiaas/hashing.hpp"
#include "neaiaas/migration.hpp"
#include "neaiaas/telemetry.hpp"
#include "neaiaas/trace.hpp"

namespace neaiaas {

std::string_view mbb_loss_mode_name(MbbLossMode m) {
    switch (m) {
        case MbbLossMode::TransferDestructive: return "transfer_destructive";
        case MbbLossMode::LeaseClock: return "lease_clock";
    }
    throw ProtocolError("unknown MbbLossMode value");
}

std::optional<MbbLossMode> mbb_loss_mode_from_name(std::string_view s) {
    if (s == "transfer_destructive") return MbbLossMode::TransferDestructive;
    if (s == "lease_clock") return MbbLossMode::LeaseClock;
    return std::nullopt;
}

Status validate_sweep(const SweepConfig& c) {
    auto deny = [](const std::string& what) {
        return Status::fail(FailureCause::PolicyDenial, what);
    };
    if (c.rho_grid.empty()) return deny("rho_grid: must not be empty");
    double prev = 0;
    for (double r : c.rho_grid) {
        if (!std::isfinite(r) || r <= 0 || r >= 1) return deny("rho_grid: points must lie in (0, 1)");
        if (r <= prev && &r != &c.rho_grid.front()) return deny("rho_grid: must strictly increase");
        prev = r;
    }
    if (c.samples_per_point < 1) return deny("samples_per_point: must be >= 1");
    if (!std::isfinite(c.admission_cap) || c.admission_cap <= 0 || c.admission_cap >= 1) {
        return deny("admission_cap: must lie in (0, 1)");
    }
    if (c.speed_grid.empty()) return deny("speed_grid: must not be empty");
    double sprev = -1;
    for (double v : c.speed_grid) {
        if (!std::isfinite(v) || v < 0) return deny("speed_grid: speeds must be >= 0");
        if (v <= sprev) return deny("speed_grid: must strictly increase");
        sprev = v;
    }
    if (c.mobility_samples_per_point < 1) return deny("mobility_samples_per_point: must be >= 1");
    if (!(c.session_window_s > 0) || !std::isfinite(c.session_window_s)) {
        return deny("session_window_s: must be > 0");
    }
    if (!std::isfinite(c.handover_rate_per_m) || c.handover_rate_per_m < 0) {
        return deny("handover_rate_per_m: must be >= 0");
    }
    if (!std::isfinite(c.teardown_interrupt_prob) || c.teardown_interrupt_prob < 0 ||
        c.teardown_interrupt_prob > 1) {
        return deny("teardown_interrupt_prob: must lie in [0, 1]");
    }
    if (!std::isfinite(c.mbb_fail_prob) || c.mbb_fail_prob < 0 || c.mbb_fail_prob > 1) {
        return deny("mbb_fail_prob: must lie in [0, 1]");
    }
    // The handover sampler uses Knuth's method; keep its mean in range.
    if (c.speed_grid.back() * c.handover_rate_per_m * c.session_window_s > 50.0) {
        return deny("speed_grid: handover mean at top speed exceeds the supported range (50)");
    }
    return Status();
}

Ms sample_wq(double rho, Ms service_mean, Rng& rng) {
    if (!(rho >= 0) || rho >= 1) throw ProtocolError("sample_wq requires rho in [0, 1)");
    if (!(service_mean > 0)) throw ProtocolError("sample_wq requires service_mean > 0");
    if (rho == 0) return 0;
    // M/M/1 waiting time: an arrival finds the server idle with
    // probability 1 - rho and waits nothing; otherwise the wait is
    // exponential with mean s / (1 - rho).
    if (rng.uniform() >= rho) return 0;
    return rng.exponential(service_mean / (1.0 - rho));
}

Ms sample_latency_endpoint(double rho, const LatencyModel& m, Rng& rng) {
    double wq = sample_wq(rho, m.service_mean, rng);
    double infer = rng.lognormal(m.infer_median, m.infer_sigma);
    double net = rng.lognormal(m.net_be_median, m.net_be_sigma) + m.site_offset_central;
    return wq + infer + net;
}

AdmissionGate::AdmissionGate() {
    pool_.add_site("edge", 1);
    pool_.set_qos_budget(1);
}

Status AdmissionGate::try_admit(bool slot_free) {
    clock_ += 1.0;
    // Background occupancy: a long-lived committed pair models the load
    // already holding the slot, so the request's prepare() sees a genuinely
    // full site.
    if (slot_free && background_) {
        release_pair(pool_, *background_);
        background_.reset();
    } else if (!slot_free && !background_) {
        auto p = prepare(pool_, "edge", clock_, 1e15);
        if (!p.ok()) throw ProtocolError("background prepare failed unexpectedly");
        auto c = commit(pool_, p.value(), clock_);
        if (!c.ok()) throw ProtocolError("background commit failed unexpectedly");
        background_ = c.value();
    }

    auto p = prepare(pool_, "edge", clock_, 10.0);
    if (!p.ok()) return Status::fail(p.cause(), p.failure().detail);
    auto c = commit(pool_, p.value(), clock_);
    if (!c.ok()) return Status::fail(c.cause(), c.failure().detail);
    release_pair(pool_, c.value());
    return Status();
}

AdmittedDraw sample_latency_neaiaas(double rho, const LatencyModel& m, double cap, Rng& rng,
                                    AdmissionGate& gate) {
    if (!(rho > 0) || rho >= 1) throw ProtocolError("sample_latency_neaiaas requires rho in (0, 1)");
    if (!(cap > 0) || cap >= 1) throw ProtocolError("admission cap must lie in (0, 1)");

    // Cap thinning: admit with probability min(1, cap / rho).
    bool slot_free = rho <= cap || rng.uniform() < cap / rho;

    AdmittedDraw out;
    Status admitted = gate.try_admit(slot_free);
    if (!admitted.ok()) {
        if (admitted.cause() != FailureCause::ComputeScarcity) {
            throw ProtocolError("unexpected admission failure cause");
        }
        return out;
    }
    out.admitted = true;

    double eff = std::min(rho, cap);
    out.wq = sample_wq(eff, m.service_mean, rng);
    double infer = rng.lognormal(m.infer_median, m.infer_sigma);
    double net = m.net_qos_base + rng.uniform(-m.net_qos_jitter, m.net_qos_jitter) +
                 m.site_offset_edge;
    if (net < 0) net = 0;
    out.latency = out.wq + infer + net;
    out.ttfb = out.wq + m.ttfb_fraction * infer + net;
    return out;
}

namespace {

// Static partition of cell indices over a worker pool. Each cell owns an
// independent seeded stream, so assignment and ordering cannot change the
// numbers.
void run_cells(std::size_t n_cells, int threads, const std::function<void(std::size_t)>& cell) {
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n_cells <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) cell(i);
        return;
    }
    std::size_t workers = std::min<std::size_t>(threads, n_cells);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n_cells; i += workers) cell(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

LoadSweepRow load_cell(double rho, const SweepConfig& c, const LatencyModel& m,
                       const ValidatedProfile& asp) {
    Rng rng(cell_seed(c.seed, "load-sweep", rho));
    const int n = c.samples_per_point;

    std::vector<double> ep;
    ep.reserve(n);
    long ep_viol = 0;
    for (int k = 0; k < n; ++k) {
        double latency = sample_latency_endpoint(rho, m, rng);
        ep.push_back(latency);
        if (request_violates(latency, asp.profile())) ++ep_viol;
    }

    AdmissionGate gate;
    std::vector<double> ne;
    ne.reserve(n);
    long ne_viol = 0;
    long admits = 0;
    for (int k = 0; k < n; ++k) {
        AdmittedDraw d = sample_latency_neaiaas(rho, m, c.admission_cap, rng, gate);
        if (!d.admitted) continue;
        ++admits;
        ne.push_back(d.latency);
        if (request_violates(d.latency, asp.profile())) ++ne_viol;
    }

    LoadSweepRow row;
    row.rho = rho;
    row.p99_endpoint = quantile(std::move(ep), 0.99);
    row.p99_neaiaas = ne.empty() ? 0.0 : quantile(std::move(ne), 0.99);
    row.viol_endpoint = static_cast<double>(ep_viol) / n;
    // Served-and-failed: the denominator is admitted requests, not offered.
    row.viol_neaiaas = admits ? static_cast<double>(ne_viol) / admits : 0.0;
    row.admit_rate = static_cast<double>(admits) / n;
    return row;
}

// Synthetic three-site world used per mobility session; every site can
// host the one model, so migration always has a fallback target.
struct MobilityWorld {
    Catalog catalog;
    ResourcePool pool;
    ContextSummary ctx;
    HandoverHazard hazard;
    RiskWeights weights;
    MigrationPolicy policy;
    AiSessionRecord session;
    Ms lease_duration;

    MobilityWorld(const ValidatedProfile& asp, double speed, Ms lease_ms)
        : lease_duration(lease_ms) {
        std::vector<CatalogEntry> entries;
        for (const char* site : {"cell-a", "cell-b", "cell-c"}) {
            CatalogEntry e;
            e.model_id = "served-model";
            e.model_version = "1";
            e.site_id = site;
            e.site_class = SiteClass::Edge;
            e.quality_tier = asp->quality_tier;
            e.sovereignty_zone = SovereigntyZone::Domestic;
            e.base_cost = std::min(1.0, asp->cost_envelope);
            entries.push_back(std::move(e));
        }
        catalog = Catalog::from_entries(std::move(entries)).value();
        for (const CatalogEntry& e : catalog.entries()) pool.add_site(e.site_id, 1);
        pool.set_qos_budget(2);  // source plus in-flight target during cutover
        ctx.default_load = 0.2;
        ctx.mobility_speed = speed;
        policy.tau_mig = 50.0;
    }

    // Establishes the session on cell-a through the real transition chain.
    void establish(const ValidatedProfile& asp) {
        auto pair = prepare(pool, "cell-a", 0, lease_duration);
        auto committed = commit(pool, pair.value(), 0);
        session.session_id = 1;
        session.asp_digest = asp.digest();
        session.model_id = "served-model";
        session.model_version = "1";
        session.anchor_site = "cell-a";
        session.authz = AuthzRef{"authz", true};
        session = transition(std::move(session), LifecycleEvent::discover_done(), 0);
        session = transition(std::move(session), LifecycleEvent::anchor_done(), 0);
        session = transition(std::move(session), LifecycleEvent::prepare_done(), 0);
        session.compute_lease = committed.value().compute;
        session.qos_lease = committed.value().qos;
        session = transition(std::move(session), LifecycleEvent::commit_done(), 0);
        session = transition(std::move(session), LifecycleEvent::serve_start(), 0);
    }
};

MobilityRow mobility_cell(double speed, const SweepConfig& c, const LatencyModel& m,
                          const ValidatedProfile& asp) {
    Rng rng(cell_seed(c.seed, "mobility-sweep", speed));
    const int n = c.mobility_samples_per_point;
    const double handover_mean = speed * c.handover_rate_per_m * c.session_window_s;

    long td_hits = 0;
    for (int s = 0; s < n; ++s) {
        int k = rng.poisson(handover_mean);
        for (int j = 0; j < k; ++j) {
            if (rng.uniform() < c.teardown_interrupt_prob) {
                ++td_hits;
                break;
            }
        }
    }

    long mbb_hits = 0;
    for (int s = 0; s < n; ++s) {
        int k = rng.poisson(handover_mean);
        if (k == 0) continue;

        MobilityWorld world(asp, speed, /*lease_ms=*/c.session_window_s * 1e6);
        world.establish(asp);
        AnalyticPredictor predictor(m, world.ctx);
        MigrationEnv env;
        env.asp = &asp;
        env.catalog = &world.catalog;
        env.predictor = &predictor;
        env.ctx = &world.ctx;
        env.model = &m;
        env.hazard = &world.hazard;
        env.weights = &world.weights;
        env.pool = &world.pool;
        env.lease_duration = world.lease_duration;
        env.lambda = 0;

        for (int j = 0; j < k; ++j) {
            Ms at = (j + 1) * 50.0;
            MigrationFaults faults;
            if (rng.uniform() < c.mbb_fail_prob) {
                faults.stage = MigrationStage::StateTransfer;
                faults.cause = FailureCause::StateTransferFailure;
            }
            MigrationOutcome out =
                migrate(world.session, env, world.policy, at, MigrationTimings{}, faults);
            if (out.migrated()) continue;

            bool interrupted = c.mbb_loss_mode == MbbLossMode::TransferDestructive
                                   ? out.abort_cause == FailureCause::StateTransferFailure
                                   : !out.source_preserved;
            if (interrupted) {
                ++mbb_hits;
                break;
            }
        }
    }

    MobilityRow row;
    row.speed = speed;
    row.p_interrupt_teardown = static_cast<double>(td_hits) / n;
    row.p_interrupt_mbb = static_cast<double>(mbb_hits) / n;
    return row;
}

}  // namespace

LoadSweepTable run_load_sweep(const SweepConfig& c, const LatencyModel& m,
                              const ValidatedProfile& asp, int threads) {
    if (Status s = validate_sweep(c); !s.ok()) {
        throw ProtocolError("run_load_sweep with invalid config: " + s.failure().detail);
    }
    if (Status s = validate_model(m); !s.ok()) {
        throw ProtocolError("run_load_sweep with invalid model: " + s.failure().detail);
    }
    LoadSweepTable table;
    table.rows.resize(c.rho_grid.size());
    run_cells(c.rho_grid.size(), threads,
              [&](std::size_t i) { table.rows[i] = load_cell(c.rho_grid[i], c, m, asp); });
    return table;
}

MobilityTable run_mobility_sweep(const SweepConfig& c, const LatencyModel& m,
                                 const ValidatedProfile& asp, int threads) {
    if (Status s = validate_sweep(c); !s.ok()) {
        throw ProtocolError("run_mobility_sweep with invalid config: " + s.failure().detail);
    }
    if (Status s = validate_model(m); !s.ok()) {
        throw ProtocolError("run_mobility_sweep with invalid model: " + s.failure().detail);
    }
    MobilityTable table;
    table.rows.resize(c.speed_grid.size());
    run_cells(c.speed_grid.size(), threads,
              [&](std::size_t i) { table.rows[i] = mobility_cell(c.speed_grid[i], c, m, asp); });
    return table;
}

double teardown_interrupt_analytic(double speed, const SweepConfig& c) {
    return 1.0 -
           std::exp(-speed * c.handover_rate_per_m * c.session_window_s *
                    c.teardown_interrupt_prob);
}

namespace {

void append_fields(std::string& line, const double* vals, int n) {
    char buf[64];
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.6g", vals[i]);
        if (i) line += ',';
        line += buf;
    }
    line += '\n';
}

}  // namespace

void write_csv(const LoadSweepTable& t, std::ostream& os) {
    os << "rho,p99_endpoint_ms,p99_neaiaas_ms,viol_endpoint,viol_neaiaas,admit_rate\n";
    for (const LoadSweepRow& r : t.rows) {
        std::string line;
        const double vals[] = {r.rho,           r.p99_endpoint, r.p99_neaiaas,
                               r.viol_endpoint, r.viol_neaiaas, r.admit_rate};
        append_fields(line, vals, 6);
        os << line;
    }
}

void write_csv(const MobilityTable& t, std::ostream& os) {
    os << "speed_mps,p_interrupt_teardown,p_interrupt_mbb\n";
    for (const MobilityRow& r : t.rows) {
        std::string line;
        const double vals[] = {r.speed, r.p_interrupt_teardown, r.p_interrupt_mbb};
        append_fields(line, vals, 3);
        os << line;
    }
}

}  // namespace neaiaas
