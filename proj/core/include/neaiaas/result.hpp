#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace neaiaas {

// Closed failure taxonomy. Every run-time failure in the system maps to
// exactly one of these nine causes; anything outside the set is a programming
// error and is reported as ProtocolError instead.
enum class FailureCause {
    ConsentViolation,
    PolicyDenial,
    SovereigntyViolation,
    ModelUnavailable,
    NoFeasibleBinding,
    ComputeScarcity,
    QosScarcity,
    StateTransferFailure,
    DeadlineExpiry,
};

inline constexpr int kFailureCauseCount = 9;

// Wire name (snake_case), e.g. "qos_scarcity". Stable across releases.
std::string_view failure_cause_name(FailureCause c);
std::optional<FailureCause> failure_cause_from_name(std::string_view name);

// Contract misuse: undefined state/event pair, out-of-domain argument,
// malformed input handed to a kernel routine. Never used for domain
// failures, which always carry a FailureCause.
class ProtocolError : public std::logic_error {
public:
    explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

// A domain failure: cause class plus a human-readable diagnostic.
struct Failure {
    FailureCause cause;
    std::string detail;
};

// Value-or-failure carrier used by every fallible operation.
template <typename T>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Failure f) : v_(std::move(f)) {}

    static Result fail(FailureCause c, std::string detail) {
        return Result(Failure{c, std::move(detail)});
    }

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(v_); }
    T& value() & { return std::get<T>(v_); }
    T&& take() && { return std::get<T>(std::move(v_)); }

    const Failure& failure() const { return std::get<Failure>(v_); }
    FailureCause cause() const { return failure().cause; }

private:
    std::variant<T, Failure> v_;
};

// Result with no payload.
class Status {
public:
    Status() = default;
    Status(Failure f) : failure_(std::move(f)) {}

    static Status fail(FailureCause c, std::string detail) {
        return Status(Failure{c, std::move(detail)});
    }

    bool ok() const { return !failure_.has_value(); }
    explicit operator bool() const { return ok(); }

    const Failure& failure() const { return *failure_; }
    FailureCause cause() const { return failure_->cause; }

private:
    std::optional<Failure> failure_;
};

}  // namespace neaiaas
