#include "dcvar/error.hpp"

namespace dcvar {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::OutOfHorizon: return "OutOfHorizon";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
        case ErrorKind::InfeasibleK: return "InfeasibleK";
        case ErrorKind::InfeasibleDelta: return "InfeasibleDelta";
        case ErrorKind::DegenerateVol: return "DegenerateVol";
        case ErrorKind::NoFeasibleAlpha: return "NoFeasibleAlpha";
        case ErrorKind::EmptySample: return "EmptySample";
        case ErrorKind::NoFeasibleGridPoint: return "NoFeasibleGridPoint";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace dcvar
