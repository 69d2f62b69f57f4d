#include <doctest.h>

#include <cmath>
#include <sstream>

#include "neaiaas/config.hpp"
#include "neaiaas/hashing.hpp"
#include "neaiaas/sim.hpp"

using namespace neaiaas;

namespace {

ValidatedProfile default_asp() { return ExperimentConfig().asp; }

SweepConfig tiny_sweep() {
    SweepConfig c;
    c.rho_grid = {0.2, 0.5, 0.9};
    c.samples_per_point = 4000;
    c.speed_grid = {0, 10, 20};
    c.mobility_samples_per_point = 3000;
    c.seed = 5;
    return c;
}

bool tables_equal(const LoadSweepTable& a, const LoadSweepTable& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.rho != y.rho || x.p99_endpoint != y.p99_endpoint ||
            x.p99_neaiaas != y.p99_neaiaas || x.viol_endpoint != y.viol_endpoint ||
            x.viol_neaiaas != y.viol_neaiaas || x.admit_rate != y.admit_rate) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("seeded draw streams are reproducible and land on their moments") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());

    Rng rng(7);
    const int n = 100000;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        acc += u;
    }
    CHECK(acc / n == doctest::Approx(0.5).epsilon(0.01));

    double esum = 0;
    for (int i = 0; i < n; ++i) esum += rng.exponential(3.0);
    CHECK(esum / n == doctest::Approx(3.0).epsilon(0.02));

    double nsum = 0, nsq = 0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        nsum += z;
        nsq += z * z;
    }
    CHECK(nsum / n == doctest::Approx(0.0).scale(1).epsilon(0.02));
    CHECK(nsq / n == doctest::Approx(1.0).epsilon(0.02));

    long psum = 0;
    for (int i = 0; i < n; ++i) psum += rng.poisson(2.5);
    CHECK(static_cast<double>(psum) / n == doctest::Approx(2.5).epsilon(0.03));

    // Lognormal medians: half the draws land below the median.
    int below = 0;
    for (int i = 0; i < n; ++i) below += rng.lognormal(40.0, 0.4) < 40.0;
    CHECK(static_cast<double>(below) / n == doctest::Approx(0.5).epsilon(0.02));

    // Sub-seeds separate by tag and by grid value, and never depend on
    // call order.
    CHECK(cell_seed(1, "load-sweep", 0.5) == cell_seed(1, "load-sweep", 0.5));
    CHECK(cell_seed(1, "load-sweep", 0.5) != cell_seed(1, "load-sweep", 0.55));
    CHECK(cell_seed(1, "load-sweep", 0.5) != cell_seed(1, "mobility-sweep", 0.5));
    CHECK(cell_seed(1, "load-sweep", 0.5) != cell_seed(2, "load-sweep", 0.5));
}

TEST_CASE("sampled waiting times match the exact queueing mean") {
    const double service = 15.0;
    for (double rho : {0.1, 0.5, 0.9}) {
        Rng rng(cell_seed(3, "wq-test", rho));
        const int n = 200000;
        double sum = 0;
        long zeros = 0;
        for (int i = 0; i < n; ++i) {
            double w = sample_wq(rho, service, rng);
            CHECK(w >= 0);
            sum += w;
            zeros += w == 0.0;
        }
        double exact = rho * service / (1.0 - rho);
        CHECK(sum / n == doctest::Approx(exact).epsilon(0.03));
        // Idle-server probability is 1 - rho.
        CHECK(static_cast<double>(zeros) / n == doctest::Approx(1.0 - rho).epsilon(0.02));
    }

    Rng rng(1);
    CHECK(sample_wq(0.0, 15.0, rng) == 0.0);
    CHECK_THROWS_AS(sample_wq(1.0, 15.0, rng), ProtocolError);
    CHECK_THROWS_AS(sample_wq(-0.2, 15.0, rng), ProtocolError);
    CHECK_THROWS_AS(sample_wq(0.5, 0.0, rng), ProtocolError);
}

TEST_CASE("latency draws respect the composition floor and grow with load") {
    LatencyModel m;
    Rng rng(9);
    double lo_sum = 0, hi_sum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double l = sample_latency_endpoint(0.2, m, rng);
        CHECK(l > m.site_offset_central);  // queue and both paths are positive
        CHECK(std::isfinite(l));
        lo_sum += l;
    }
    for (int i = 0; i < n; ++i) hi_sum += sample_latency_endpoint(0.9, m, rng);
    CHECK(hi_sum / n > lo_sum / n);  // queueing dominates at load

    AdmissionGate gate;
    for (int i = 0; i < n; ++i) {
        AdmittedDraw d = sample_latency_neaiaas(0.5, m, 0.8, rng, gate);
        REQUIRE(d.admitted);  // below the cap nothing is refused
        CHECK(d.latency >= d.ttfb);
        CHECK(d.ttfb >= d.wq);
        CHECK(d.latency > 0);
    }
    CHECK_THROWS_AS(sample_latency_neaiaas(1.2, m, 0.8, rng, gate), ProtocolError);
    CHECK_THROWS_AS(sample_latency_neaiaas(0.5, m, 1.0, rng, gate), ProtocolError);
}

TEST_CASE("admission gate thins load at the cap through the real reservation path") {
    AdmissionGate gate;
    CHECK(gate.try_admit(true).ok());
    Status full = gate.try_admit(false);
    REQUIRE_FALSE(full.ok());
    CHECK(full.cause() == FailureCause::ComputeScarcity);
    CHECK(gate.try_admit(true).ok());  // slot frees again

    LatencyModel m;
    Rng rng(11);
    AdmissionGate g2;
    const int n = 40000;
    const double rho = 0.95, cap = 0.8;
    long admits = 0;
    for (int i = 0; i < n; ++i) admits += sample_latency_neaiaas(rho, m, cap, rng, g2).admitted;
    CHECK(static_cast<double>(admits) / n == doctest::Approx(cap / rho).epsilon(0.02));

    // The gate's pool balances: no leases survive the sweep.
    CHECK(g2.pool().held(Plane::Compute, LeaseState::Provisional) == 0);
    int live_confirmed = g2.pool().held(Plane::Compute, LeaseState::Confirmed);
    CHECK(live_confirmed <= 1);  // at most the background occupancy pair
    CHECK(g2.pool().find_site("edge")->provisional_slots == 0);
}

TEST_CASE("load sweep tables are deterministic and cell-independent") {
    auto asp = default_asp();
    LatencyModel m;
    SweepConfig c = tiny_sweep();

    LoadSweepTable once = run_load_sweep(c, m, asp);
    LoadSweepTable twice = run_load_sweep(c, m, asp);
    CHECK(tables_equal(once, twice));
    REQUIRE(once.rows.size() == 3);

    for (const auto& row : once.rows) {
        CHECK(row.p99_neaiaas <= row.p99_endpoint);
        CHECK(row.viol_neaiaas <= row.viol_endpoint);
    }
    CHECK(once.rows[0].admit_rate == 1.0);  // 0.2 and 0.5 sit below the cap
    CHECK(once.rows[1].admit_rate == 1.0);
    CHECK(once.rows[2].admit_rate < 1.0);
    CHECK(once.rows[0].p99_endpoint < once.rows[2].p99_endpoint);

    // A cell's numbers do not depend on which grid it sits in.
    SweepConfig solo = c;
    solo.rho_grid = {0.5};
    LoadSweepTable alone = run_load_sweep(solo, m, asp);
    REQUIRE(alone.rows.size() == 1);
    CHECK(alone.rows[0].p99_endpoint == once.rows[1].p99_endpoint);
    CHECK(alone.rows[0].p99_neaiaas == once.rows[1].p99_neaiaas);
    CHECK(alone.rows[0].viol_endpoint == once.rows[1].viol_endpoint);

    // Serial and parallel partitions produce identical bytes.
    LoadSweepTable par = run_load_sweep(c, m, asp, 4);
    CHECK(tables_equal(once, par));

    SweepConfig bad = c;
    bad.rho_grid = {0.5, 0.2};
    CHECK_THROWS_AS(run_load_sweep(bad, m, asp), ProtocolError);
}

TEST_CASE("mobility sweep matches the analytic teardown and keeps mbb low") {
    auto asp = default_asp();
    LatencyModel m;
    SweepConfig c = tiny_sweep();

    CHECK(teardown_interrupt_analytic(20.0, c) ==
          doctest::Approx(0.4511883639059736).epsilon(1e-12));
    CHECK(teardown_interrupt_analytic(0.0, c) == 0.0);

    MobilityTable t = run_mobility_sweep(c, m, asp);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].p_interrupt_teardown == 0.0);  // zero speed, zero handovers
    CHECK(t.rows[0].p_interrupt_mbb == 0.0);
    for (const auto& row : t.rows) {
        CHECK(row.p_interrupt_teardown ==
              doctest::Approx(teardown_interrupt_analytic(row.speed, c)).scale(1).epsilon(0.03));
        CHECK(row.p_interrupt_mbb <= row.p_interrupt_teardown);
        CHECK(row.p_interrupt_mbb <= 0.05);
    }
    CHECK(t.rows[1].p_interrupt_teardown < t.rows[2].p_interrupt_teardown);

    MobilityTable t2 = run_mobility_sweep(c, m, asp, 4);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i].p_interrupt_teardown == t2.rows[i].p_interrupt_teardown);
        CHECK(t.rows[i].p_interrupt_mbb == t2.rows[i].p_interrupt_mbb);
    }
}

TEST_CASE("sweep validation rejects out-of-domain settings") {
    SweepConfig good = tiny_sweep();
    CHECK(validate_sweep(good).ok());

    SweepConfig c = good;
    c.rho_grid.clear();
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.rho_grid = {0.2, 1.0};
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.rho_grid = {0.5, 0.5};
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.samples_per_point = 0;
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.admission_cap = 1.0;
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.speed_grid = {-1.0, 5.0};
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.teardown_interrupt_prob = 1.5;
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.mbb_fail_prob = -0.1;
    CHECK_FALSE(validate_sweep(c).ok());
    c = good;
    c.speed_grid = {0, 600.0};  // Poisson mean past the supported range
    Status s = validate_sweep(c);
    REQUIRE_FALSE(s.ok());
    CHECK(s.failure().detail.find("speed_grid") != std::string::npos);

    CHECK(mbb_loss_mode_from_name("lease_clock") == MbbLossMode::LeaseClock);
    CHECK_FALSE(mbb_loss_mode_from_name("nope").has_value());
    CHECK(mbb_loss_mode_name(MbbLossMode::TransferDestructive) == "transfer_destructive");
}

TEST_CASE("sweep csv output pins headers and field order") {
    LoadSweepTable lt;
    LoadSweepRow r;
    r.rho = 0.5;
    r.p99_endpoint = 206.634;
    r.p99_neaiaas = 101.25;
    r.viol_endpoint = 0.0125;
    r.viol_neaiaas = 0.001;
    r.admit_rate = 1;
    lt.rows.push_back(r);
    std::ostringstream os;
    write_csv(lt, os);
    CHECK(os.str() ==
          "rho,p99_endpoint_ms,p99_neaiaas_ms,viol_endpoint,viol_neaiaas,admit_rate\n"
          "0.5,206.634,101.25,0.0125,0.001,1\n");

    MobilityTable mt;
    MobilityRow mr;
    mr.speed = 15;
    mr.p_interrupt_teardown = 0.3636;
    mr.p_interrupt_mbb = 0.025;
    mt.rows.push_back(mr);
    std::ostringstream ms;
    write_csv(mt, ms);
    CHECK(ms.str() ==
          "speed_mps,p_interrupt_teardown,p_interrupt_mbb\n"
          "15,0.3636,0.025\n");
}
