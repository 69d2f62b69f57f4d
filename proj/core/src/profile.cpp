#include "neaiaas/profile.hpp"

#include <cmath>
#include <string>

#include "neaiaas/hashing.hpp"

namespace neaiaas {

bool zone_allowed(PrivacyScope scope, SovereigntyZone zone) {
    switch (scope) {
        case PrivacyScope::Open: return true;
        case PrivacyScope::Regional: return zone != SovereigntyZone::Global;
        case PrivacyScope::Sovereign: return zone == SovereigntyZone::Domestic;
    }
    throw ProtocolError("unknown PrivacyScope value");
}

std::string_view modality_name(Modality m) {
    switch (m) {
        case Modality::Text: return "text";
        case Modality::Vision: return "vision";
        case Modality::Stream: return "stream";
    }
    throw ProtocolError("unknown Modality value");
}

std::string_view mobility_class_name(MobilityClass m) {
    switch (m) {
        case MobilityClass::Static: return "static";
        case MobilityClass::Nomadic: return "nomadic";
        case MobilityClass::Mobile: return "mobile";
    }
    throw ProtocolError("unknown MobilityClass value");
}

std::string_view sovereignty_zone_name(SovereigntyZone z) {
    switch (z) {
        case SovereigntyZone::Domestic: return "domestic";
        case SovereigntyZone::Partner: return "partner";
        case SovereigntyZone::Global: return "global";
    }
    throw ProtocolError("unknown SovereigntyZone value");
}

std::string_view privacy_scope_name(PrivacyScope p) {
    switch (p) {
        case PrivacyScope::Open: return "open";
        case PrivacyScope::Regional: return "regional";
        case PrivacyScope::Sovereign: return "sovereign";
    }
    throw ProtocolError("unknown PrivacyScope value");
}

std::optional<Modality> modality_from_name(std::string_view s) {
    if (s == "text") return Modality::Text;
    if (s == "vision") return Modality::Vision;
    if (s == "stream") return Modality::Stream;
    return std::nullopt;
}

std::optional<MobilityClass> mobility_class_from_name(std::string_view s) {
    if (s == "static") return MobilityClass::Static;
    if (s == "nomadic") return MobilityClass::Nomadic;
    if (s == "mobile") return MobilityClass::Mobile;
    return std::nullopt;
}

std::optional<SovereigntyZone> sovereignty_zone_from_name(std::string_view s) {
    if (s == "domestic") return SovereigntyZone::Domestic;
    if (s == "partner") return SovereigntyZone::Partner;
    if (s == "global") return SovereigntyZone::Global;
    return std::nullopt;
}

std::optional<PrivacyScope> privacy_scope_from_name(std::string_view s) {
    if (s == "open") return PrivacyScope::Open;
    if (s == "regional") return PrivacyScope::Regional;
    if (s == "sovereign") return PrivacyScope::Sovereign;
    return std::nullopt;
}

namespace {

Result<ValidatedProfile> deny(const char* field, const std::string& why) {
    return Result<ValidatedProfile>::fail(FailureCause::PolicyDenial,
                                          std::string(field) + ": " + why);
}

std::uint64_t profile_digest(const AiServiceProfile& p) {
    std::uint64_t h = hash_str("asp");
    h = hash_mix(h, double_bits(p.ttfb_bound));
    h = hash_mix(h, double_bits(p.p95_bound));
    h = hash_mix(h, double_bits(p.p99_bound));
    h = hash_mix(h, double_bits(p.completion_prob_min));
    h = hash_mix(h, double_bits(p.hard_timeout));
    h = hash_mix(h, double_bits(p.rate_min));
    h = hash_mix(h, static_cast<std::uint64_t>(p.modality));
    h = hash_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(p.quality_tier)));
    h = hash_mix(h, static_cast<std::uint64_t>(p.privacy_scope));
    h = hash_mix(h, static_cast<std::uint64_t>(p.mobility_class));
    h = hash_mix(h, double_bits(p.cost_envelope));
    for (int t : p.fallback_ladder) {
        h = hash_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(t)));
    }
    return h;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0; }

}  // namespace

Result<ValidatedProfile> validate_asp(AiServiceProfile asp) {
    if (!finite_positive(asp.ttfb_bound)) return deny("ttfb_bound", "must be finite and > 0");
    if (!finite_positive(asp.p95_bound)) return deny("p95_bound", "must be finite and > 0");
    if (!finite_positive(asp.p99_bound)) return deny("p99_bound", "must be finite and > 0");
    if (asp.ttfb_bound > asp.p95_bound) {
        return deny("ttfb_bound", "must not exceed p95_bound");
    }
    if (asp.p95_bound > asp.p99_bound) {
        return deny("p95_bound", "must not exceed p99_bound");
    }
    if (!std::isfinite(asp.completion_prob_min) || asp.completion_prob_min <= 0 ||
        asp.completion_prob_min > 1) {
        return deny("completion_prob_min", "must lie in (0, 1]");
    }
    if (!finite_positive(asp.hard_timeout)) return deny("hard_timeout", "must be finite and > 0");
    if (asp.hard_timeout < asp.p99_bound) {
        return deny("hard_timeout", "must not undercut p99_bound");
    }
    if (!std::isfinite(asp.rate_min) || asp.rate_min < 0) {
        return deny("rate_min", "must be finite and >= 0");
    }
    if (asp.quality_tier < 0) return deny("quality_tier", "must be >= 0");
    if (!std::isfinite(asp.cost_envelope) || asp.cost_envelope <= 0) {
        return deny("cost_envelope", "must be finite and > 0");
    }
    int prev = asp.quality_tier;
    for (std::size_t i = 0; i < asp.fallback_ladder.size(); ++i) {
        int t = asp.fallback_ladder[i];
        if (t < 0) return deny("fallback_ladder", "tiers must be >= 0");
        if (t >= prev) {
            return deny("fallback_ladder",
                        "tiers must strictly decrease from quality_tier (step " +
                            std::to_string(i) + ")");
        }
        prev = t;
    }
    std::uint64_t d = profile_digest(asp);
    return ValidatedProfile(std::move(asp), d);
}

Status validate_timers(const TimerConfig& t, const ValidatedProfile& asp) {
    auto deny_t = [](const char* field, const std::string& why) {
        return Status::fail(FailureCause::PolicyDenial, std::string(field) + ": " + why);
    };
    const struct { const char* name; Ms v; } all[] = {
        {"tau_disc", t.tau_disc}, {"tau_page", t.tau_page}, {"tau_prep", t.tau_prep},
        {"tau_com", t.tau_com},   {"tau_mig", t.tau_mig},   {"lease_duration", t.lease_duration},
    };
    for (const auto& f : all) {
        if (!std::isfinite(f.v) || f.v <= 0) return deny_t(f.name, "must be finite and > 0");
    }
    if (t.tau_disc > t.tau_page) return deny_t("tau_page", "must be >= tau_disc");
    if (t.tau_page > t.tau_prep) return deny_t("tau_prep", "must be >= tau_page");
    if (t.tau_prep > t.tau_com) return deny_t("tau_com", "must be >= tau_prep");
    if (t.tau_mig > asp->hard_timeout) {
        return deny_t("tau_mig", "must not exceed the profile hard_timeout");
    }
    if (t.tau_mig > t.lease_duration) {
        return deny_t("tau_mig", "must not exceed lease_duration");
    }
    return Status();
}

}  // namespace neaiaas
