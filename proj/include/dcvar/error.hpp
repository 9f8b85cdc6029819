#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcvar {

enum class ErrorKind {
    NotPositiveDefinite,
    DimensionMismatch,
    OutOfHorizon,
    DomainError,
    InfeasibleSpec,
    InfeasibleK,
    InfeasibleDelta,
    DegenerateVol,
    NoFeasibleAlpha,
    EmptySample,
    NoFeasibleGridPoint,
    InvalidConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Library-wide exception; `kind()` lets callers branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace dcvar
