#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "neaiaas/catalog.hpp"
#include "neaiaas/profile.hpp"
#include "neaiaas/result.hpp"

namespace neaiaas {

// Deterministic draw helpers over mt19937_64. Every transform is explicit
// (inverse CDF or Box-Muller on the raw bits), so a given seed yields an
// identical stream on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    // Inverse-CDF exponential with the given mean.
    double exponential(double mean);

    // Standard normal via Box-Muller; the second deviate of each pair is
    // cached, which keeps the stream deterministic.
    double normal();

    double lognormal(double median, double sigma);

    // Knuth's product method; intended for small means.
    int poisson(double mean);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 gen_;
    std::optional<double> spare_normal_;
};

// Parameters of the latency composition L = W_q + L_infer + L_net.
// Inference time is lognormal; best-effort network is lognormal with a
// site-class propagation offset; dedicated qos flows are a tight base
// latency plus bounded jitter.
struct LatencyModel {
    Ms service_mean = 15.0;        // M/M/1 service time mean
    Ms infer_median = 40.0;
    double infer_sigma = 0.4;
    Ms net_be_median = 20.0;       // best-effort path median
    double net_be_sigma = 0.5;
    Ms net_qos_base = 8.0;         // qos flow base latency
    Ms net_qos_jitter = 2.0;       // +/- uniform jitter around the base
    Ms site_offset_edge = 0.0;     // propagation offsets by hosting class
    Ms site_offset_regional = 4.0;
    Ms site_offset_central = 12.0;
    double ttfb_fraction = 0.3;    // share of inference time before first output
    double rate_nominal = 30.0;    // delivered units/s at the median inference time

    Ms site_offset(SiteClass c) const;
};

Status validate_model(const LatencyModel& m);

// Mean M/M/1 waiting time rho * s / (1 - rho); domain rho in [0, 1),
// s > 0, enforced with ProtocolError.
double wq_mean(double rho, Ms service_mean);

// P[X > x] for lognormal X with the given median and shape. x <= 0 gives 1.
double lognormal_tail_prob(double x, double median, double sigma);

// Inverse of the lognormal CDF, p in (0, 1).
double lognormal_quantile(double p, double median, double sigma);

// Inverse standard normal CDF (rational approximation, ~1e-9 absolute
// error), p in (0, 1).
double inverse_normal_cdf(double p);

}  // namespace neaiaas
