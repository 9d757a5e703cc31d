#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdm {

enum class ErrorKind {
    Syntax,
    UnknownIdentifier,
    Domain,
    InvalidRange,
    TooFewPoints,
    NotOnGrid,
    GridNotSymmetric,
    GridMismatch,
    NonPositive,
    ZeroCrossing,
    Inconsistent,
    ParityViolation,
    SingularR,
    Overflow,
    Solver,
    IncompleteChain,
    NotMonotone,
    InvalidArgument,
    Config,
    Io,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Parser failures carry the byte offset into the source text.
class ParseError : public Error {
public:
    ParseError(ErrorKind kind, std::size_t offset, const std::string& what)
        : Error(kind, what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace pdm
