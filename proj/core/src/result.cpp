#include "neaiaas/result.hpp"

namespace neaiaas {

std::string_view failure_cause_name(FailureCause c) {
    switch (c) {
        case FailureCause::ConsentViolation: return "consent_violation";
        case FailureCause::PolicyDenial: return "policy_denial";
        case FailureCause::SovereigntyViolation: return "sovereignty_violation";
        case FailureCause::ModelUnavailable: return "model_unavailable";
        case FailureCause::NoFeasibleBinding: return "no_feasible_binding";
        case FailureCause::ComputeScarcity: return "compute_scarcity";
        case FailureCause::QosScarcity: return "qos_scarcity";
        case FailureCause::StateTransferFailure: return "state_transfer_failure";
        case FailureCause::DeadlineExpiry: return "deadline_expiry";
    }
    throw ProtocolError("unknown FailureCause value");
}

std::optional<FailureCause> failure_cause_from_name(std::string_view name) {
    static constexpr FailureCause all[] = {
        FailureCause::ConsentViolation,     FailureCause::PolicyDenial,
        FailureCause::SovereigntyViolation, FailureCause::ModelUnavailable,
        FailureCause::NoFeasibleBinding,    FailureCause::ComputeScarcity,
        FailureCause::QosScarcity,          FailureCause::StateTransferFailure,
        FailureCause::DeadlineExpiry,
    };
    for (FailureCause c : all) {
        if (failure_cause_name(c) == name) return c;
    }
    return std::nullopt;
}

}  // namespace neaiaas
