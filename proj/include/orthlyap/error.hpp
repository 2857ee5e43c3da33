#pragma once

#include <stdexcept>
#include <string>

namespace orthlyap {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- input / parsing ----

struct SyntaxError : Error {
    SyntaxError(std::size_t position, const std::string& msg)
        : Error("syntax error at position " + std::to_string(position) + ": " + msg),
          position(position) {}
    std::size_t position;
};

struct UnknownSymbol : Error {
    explicit UnknownSymbol(const std::string& name)
        : Error("unknown symbol '" + name + "'"), name(name) {}
    std::string name;
};

struct VarOutOfRange : Error {
    VarOutOfRange(int index, int dimension)
        : Error("variable x" + std::to_string(index) + " exceeds system dimension " +
                std::to_string(dimension)),
          index(index), dimension(dimension) {}
    int index;
    int dimension;
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

// Evaluation left the real domain (log/sqrt of a negative, division by zero).
// Carries the printed form of the offending subexpression.
struct DomainError : Error {
    DomainError(const std::string& what, const std::string& subexpression)
        : Error(what + " in '" + subexpression + "'"), subexpression(subexpression) {}
    std::string subexpression;
};

// ---- numerics ----

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct SingularSylvester : Error {
    explicit SingularSylvester(const std::string& msg) : Error(msg) {}
};

struct TargetNotBlockClosed : Error {
    explicit TargetNotBlockClosed(const std::string& msg) : Error(msg) {}
};

struct SwapIllConditioned : Error {
    explicit SwapIllConditioned(const std::string& msg) : Error(msg) {}
};

struct IllConditionedInverse : Error {
    IllConditionedInverse(const std::string& msg, double condition_estimate)
        : Error(msg + " (condition estimate " + std::to_string(condition_estimate) + ")"),
          condition_estimate(condition_estimate) {}
    double condition_estimate;
};

struct CurlNotZero : Error {
    CurlNotZero(const std::string& msg, double max_curl_entry)
        : Error(msg), max_curl_entry(max_curl_entry) {}
    double max_curl_entry;
};

// ---- capability ----

struct JordanRequired : Error {
    explicit JordanRequired(const std::string& msg) : Error(msg) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& msg) : Error(msg) {}
};

// ---- analysis preconditions ----

struct NotAnEquilibrium : Error {
    explicit NotAnEquilibrium(const std::string& msg) : Error(msg) {}
};

struct UncertifiedDecomposition : Error {
    explicit UncertifiedDecomposition(const std::string& msg) : Error(msg) {}
};

struct NoZeroLocus : Error {
    explicit NoZeroLocus(const std::string& msg) : Error(msg) {}
};

struct CertificateFailure : Error {
    explicit CertificateFailure(const std::string& msg) : Error(msg) {}
};

}  // namespace orthlyap
