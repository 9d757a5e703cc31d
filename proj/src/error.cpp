#include "pdm/error.hpp"

namespace pdm {

const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::UnknownIdentifier: return "unknown_identifier";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InvalidRange: return "invalid_range";
    case ErrorKind::TooFewPoints: return "too_few_points";
    case ErrorKind::NotOnGrid: return "not_on_grid";
    case ErrorKind::GridNotSymmetric: return "grid_not_symmetric";
    case ErrorKind::GridMismatch: return "grid_mismatch";
    case ErrorKind::NonPositive: return "non_positive";
    case ErrorKind::ZeroCrossing: return "zero_crossing";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::ParityViolation: return "parity_violation";
    case ErrorKind::SingularR: return "singular_r";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::IncompleteChain: return "incomplete_chain";
    case ErrorKind::NotMonotone: return "not_monotone";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace pdm
