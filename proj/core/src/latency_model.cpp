#include "neaiaas/latency_model.hpp"

#include <cmath>

namespace neaiaas {

double Rng::uniform() {
    // 53 high bits, same construction everywhere: [0, 1).
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(hi >= lo)) throw ProtocolError("uniform(lo, hi) needs hi >= lo");
    return lo + (hi - lo) * uniform();
}

double Rng::exponential(double mean) {
    if (!(mean > 0)) throw ProtocolError("exponential mean must be > 0");
    // Inverse CDF; 1 - u stays in (0, 1] so the log is finite.
    return -mean * std::log1p(-uniform());
}

double Rng::normal() {
    if (spare_normal_) {
        double v = *spare_normal_;
        spare_normal_.reset();
        return v;
    }
    // Box-Muller on two fresh uniforms.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_normal_ = r * std::sin(a);
    return r * std::cos(a);
}

double Rng::lognormal(double median, double sigma) {
    if (!(median > 0) || !(sigma >= 0)) {
        throw ProtocolError("lognormal needs median > 0 and sigma >= 0");
    }
    return median * std::exp(sigma * normal());
}

int Rng::poisson(double mean) {
    if (!(mean >= 0)) throw ProtocolError("poisson mean must be >= 0");
    if (mean == 0) return 0;
    if (mean > 60) throw ProtocolError("poisson mean out of supported range");
    // Knuth's product method; fine for the small means used here.
    double limit = std::exp(-mean);
    double prod = uniform();
    int k = 0;
    while (prod > limit) {
        prod *= uniform();
        ++k;
    }
    return k;
}

Ms LatencyModel::site_offset(SiteClass c) const {
    switch (c) {
        case SiteClass::Edge: return site_offset_edge;
        case SiteClass::Regional: return site_offset_regional;
        case SiteClass::Central: return site_offset_central;
    }
    throw ProtocolError("unknown SiteClass value");
}

Status validate_model(const LatencyModel& m) {
    auto deny = [](const char* field, const char* why) {
        return Status::fail(FailureCause::PolicyDenial, std::string(field) + ": " + why);
    };
    const struct { const char* name; double v; } positive[] = {
        {"service_mean", m.service_mean},   {"infer_median", m.infer_median},
        {"infer_sigma", m.infer_sigma},     {"net_be_median", m.net_be_median},
        {"net_be_sigma", m.net_be_sigma},   {"net_qos_base", m.net_qos_base},
        {"rate_nominal", m.rate_nominal},
    };
    for (const auto& f : positive) {
        if (!std::isfinite(f.v) || f.v <= 0) return deny(f.name, "must be finite and > 0");
    }
    const struct { const char* name; double v; } nonneg[] = {
        {"net_qos_jitter", m.net_qos_jitter},
        {"site_offset_edge", m.site_offset_edge},
        {"site_offset_regional", m.site_offset_regional},
        {"site_offset_central", m.site_offset_central},
    };
    for (const auto& f : nonneg) {
        if (!std::isfinite(f.v) || f.v < 0) return deny(f.name, "must be finite and >= 0");
    }
    if (!std::isfinite(m.ttfb_fraction) || m.ttfb_fraction <= 0 || m.ttfb_fraction > 1) {
        return deny("ttfb_fraction", "must lie in (0, 1]");
    }
    return Status();
}

double wq_mean(double rho, Ms service_mean) {
    if (!(rho >= 0) || rho >= 1) throw ProtocolError("wq_mean requires rho in [0, 1)");
    if (!(service_mean > 0)) throw ProtocolError("wq_mean requires service_mean > 0");
    return rho * service_mean / (1.0 - rho);
}

double lognormal_tail_prob(double x, double median, double sigma) {
    if (!(median > 0) || !(sigma > 0)) {
        throw ProtocolError("lognormal_tail_prob needs median > 0 and sigma > 0");
    }
    if (x <= 0) return 1.0;
    double z = (std::log(x) - std::log(median)) / sigma;
    // P[X > x] = 1 - Phi(z) = erfc(z / sqrt(2)) / 2.
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

double inverse_normal_cdf(double p) {
    if (!(p > 0) || !(p < 1)) throw ProtocolError("inverse_normal_cdf requires p in (0, 1)");

    // Acklam's rational approximation, absolute error below 1.2e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double lognormal_quantile(double p, double median, double sigma) {
    if (!(median > 0) || !(sigma > 0)) {
        throw ProtocolError("lognormal_quantile needs median > 0 and sigma > 0");
    }
    return median * std::exp(sigma * inverse_normal_cdf(p));
}

}  // namespace neaiaas
