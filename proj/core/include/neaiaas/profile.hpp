#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "neaiaas/result.hpp"

namespace neaiaas {

// All durations and timestamps are milliseconds on the simulation clock.
using Ms = double;

enum class Modality { Text, Vision, Stream };
enum class MobilityClass { Static, Nomadic, Mobile };

// Data-handling zones a hosting site can belong to.
enum class SovereigntyZone { Domestic, Partner, Global };

// Privacy scope declared by a profile; restricts which zones may host the
// session. Open admits every zone, Regional excludes Global, Sovereign
// admits Domestic only.
enum class PrivacyScope { Open, Regional, Sovereign };

bool zone_allowed(PrivacyScope scope, SovereigntyZone zone);

std::string_view modality_name(Modality m);
std::string_view mobility_class_name(MobilityClass m);
std::string_view sovereignty_zone_name(SovereigntyZone z);
std::string_view privacy_scope_name(PrivacyScope p);
std::optional<Modality> modality_from_name(std::string_view s);
std::optional<MobilityClass> mobility_class_from_name(std::string_view s);
std::optional<SovereigntyZone> sovereignty_zone_from_name(std::string_view s);
std::optional<PrivacyScope> privacy_scope_from_name(std::string_view s);

// Declarative service profile a client requests admission against.
struct AiServiceProfile {
    Ms ttfb_bound = 0;                // bound on time to first response
    Ms p95_bound = 0;                 // window p95 latency bound
    Ms p99_bound = 0;                 // window p99 latency bound
    double completion_prob_min = 0;   // minimum completion fraction, in (0,1]
    Ms hard_timeout = 0;              // per-request cutoff; past it a request failed
    double rate_min = 0;              // minimum sustained delivery rate, units/s
    Modality modality = Modality::Text;
    int quality_tier = 0;             // larger is better
    PrivacyScope privacy_scope = PrivacyScope::Open;
    MobilityClass mobility_class = MobilityClass::Static;
    double cost_envelope = 0;         // max per-session cost the client accepts
    std::vector<int> fallback_ladder; // degraded tiers, strictly decreasing
};

// Proof-of-validation wrapper. The only way to obtain one is validate_asp,
// so any API taking a ValidatedProfile can rely on the bounds being sane.
class ValidatedProfile {
public:
    const AiServiceProfile& profile() const { return p_; }
    const AiServiceProfile* operator->() const { return &p_; }

    // Order-insensitive digest of the admitted profile, stored in session
    // records for accounting.
    std::uint64_t digest() const { return digest_; }

private:
    friend Result<ValidatedProfile> validate_asp(AiServiceProfile asp);
    ValidatedProfile(AiServiceProfile p, std::uint64_t d) : p_(std::move(p)), digest_(d) {}

    AiServiceProfile p_;
    std::uint64_t digest_;
};

// Checks internal consistency of a profile. Violations are reported as
// policy_denial with the offending field named in the detail.
Result<ValidatedProfile> validate_asp(AiServiceProfile asp);

// Phase budgets for the session establishment pipeline plus the lease
// lifetime granted at prepare time.
struct TimerConfig {
    Ms tau_disc = 0;
    Ms tau_page = 0;
    Ms tau_prep = 0;
    Ms tau_com = 0;
    Ms tau_mig = 0;
    Ms lease_duration = 0;
};

// Enforces tau_disc <= tau_page <= tau_prep <= tau_com, positivity, and
// tau_mig <= min(hard_timeout, lease_duration).
Status validate_timers(const TimerConfig& t, const ValidatedProfile& asp);

}  // namespace neaiaas
