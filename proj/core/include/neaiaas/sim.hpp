#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "neaiaas/latency_model.hpp"
#include "neaiaas/profile.hpp"
#include "neaiaas/txn.hpp"

namespace neaiaas {

// How a mobility handover counts as a service interruption.
//   TransferDestructive: state transfer consumes the source once it starts,
//     so any transfer-stage abort is an interruption (default).
//   LeaseClock: an abort interrupts only if the source lease had literally
//     expired by then.
enum class MbbLossMode { TransferDestructive, LeaseClock };
std::string_view mbb_loss_mode_name(MbbLossMode m);
std::optional<MbbLossMode> mbb_loss_mode_from_name(std::string_view s);

struct SweepConfig {
    // Load sweep.
    std::vector<double> rho_grid;
    int samples_per_point = 100000;
    double admission_cap = 0.8;  // utilization ceiling the gate admits up to

    // Mobility sweep.
    std::vector<double> speed_grid;          // m/s
    int mobility_samples_per_point = 100000; // sessions per speed
    double session_window_s = 10.0;
    double handover_rate_per_m = 0.01;       // handovers per meter traveled
    double teardown_interrupt_prob = 0.3;    // per-handover loss, teardown mode
    double mbb_fail_prob = 0.01;             // state-transfer failure per handover
    MbbLossMode mbb_loss_mode = MbbLossMode::TransferDestructive;

    std::uint64_t seed = 1;
};

Status validate_sweep(const SweepConfig& c);

struct LoadSweepRow {
    double rho = 0;
    double p99_endpoint = 0;
    double p99_neaiaas = 0;
    double viol_endpoint = 0;  // violating fraction over all offered requests
    double viol_neaiaas = 0;
    double admit_rate = 0;
};

struct MobilityRow {
    double speed = 0;
    double p_interrupt_teardown = 0;
    double p_interrupt_mbb = 0;
};

struct LoadSweepTable {
    std::vector<LoadSweepRow> rows;
};
struct MobilityTable {
    std::vector<MobilityRow> rows;
};

// One M/M/1 waiting-time draw at utilization rho: zero with probability
// 1 - rho, else exponential with mean s / (1 - rho).
Ms sample_wq(double rho, Ms service_mean, Rng& rng);

// Endpoint-hosted baseline: full queue at rho, best-effort network to a
// central site, no admission control.
Ms sample_latency_endpoint(double rho, const LatencyModel& m, Rng& rng);

// Admission gate backed by a real one-slot prepare/commit cycle. The
// occupancy of the slot is drawn per request from the offered load; the
// decision itself comes out of the two-phase reservation path, so the
// bookkeeping (causes, lease counters) is the production one.
class AdmissionGate {
public:
    AdmissionGate();

    // Runs one request through prepare/commit against the gate's slot.
    // `slot_free` is the drawn occupancy; a taken slot surfaces as
    // compute_scarcity out of the real reservation path.
    Status try_admit(bool slot_free);

    const ResourcePool& pool() const { return pool_; }

private:
    ResourcePool pool_;
    std::optional<PreparedPair> background_;
    Ms clock_ = 0;
};

struct AdmittedDraw {
    bool admitted = false;
    Ms latency = 0;  // meaningful only when admitted
    Ms ttfb = 0;
    Ms wq = 0;
};

// One offered request against the managed service: admission first (cap
// thinning through the gate), then a latency draw with queueing clamped at
// the cap, an edge-class anchor and a qos flow.
AdmittedDraw sample_latency_neaiaas(double rho, const LatencyModel& m, double cap,
                                    Rng& rng, AdmissionGate& gate);

// Sweeps the offered-load grid for both systems. threads <= 1 runs serially;
// any thread count produces the identical table because every cell owns an
// independent seeded stream.
LoadSweepTable run_load_sweep(const SweepConfig& c, const LatencyModel& m,
                              const ValidatedProfile& asp, int threads = 1);

// Sweeps client speed for the teardown-style baseline and the
// make-before-break pipeline (real migrations against a synthetic
// three-site world).
MobilityTable run_mobility_sweep(const SweepConfig& c, const LatencyModel& m,
                                 const ValidatedProfile& asp, int threads = 1);

// Interruption probability of the teardown baseline at speed v:
// 1 - exp(-v * rate * window * q).
double teardown_interrupt_analytic(double speed, const SweepConfig& c);

// CSV with a header row; floats carry six significant digits.
void write_csv(const LoadSweepTable& t, std::ostream& os);
void write_csv(const MobilityTable& t, std::ostream& os);

}  // namespace neaiaas
