#pragma once

#include <stdexcept>
#include <string>

namespace varstop {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

// The sampled scale function is not strictly increasing.
struct NonMonotoneScale : Error {
    explicit NonMonotoneScale(const std::string& what) : Error(what) {}
};

// Endpoint extrapolation disagrees beyond tolerance and no override was given.
struct LimitUndetermined : Error {
    explicit LimitUndetermined(const std::string& what) : Error(what) {}
};

// An infinite endpoint carries positive exit mass.
struct Unbounded : Error {
    explicit Unbounded(const std::string& what) : Error(what) {}
};

struct NoMaximizer : Error {
    explicit NoMaximizer(const std::string& what) : Error(what) {}
};

struct StartAboveMaximizer : Error {
    explicit StartAboveMaximizer(const std::string& what) : Error(what) {}
};

// Concave-majorant construction ran into the grid ceiling.
struct TruncationError : Error {
    explicit TruncationError(const std::string& what) : Error(what) {}
};

struct BracketError : Error {
    explicit BracketError(const std::string& what) : Error(what) {}
};

struct OutOfRegion : Error {
    explicit OutOfRegion(const std::string& what) : Error(what) {}
};

// Transient growth limit in (0,inf) combined with a failing tie inequality;
// refused rather than solved.
struct UnsupportedMarginal : Error {
    explicit UnsupportedMarginal(const std::string& what) : Error(what) {}
};

struct AssumptionViolated : Error {
    explicit AssumptionViolated(const std::string& what) : Error(what) {}
};

struct EmptyEssentialSet : Error {
    explicit EmptyEssentialSet(const std::string& what) : Error(what) {}
};

struct NoSignChange : Error {
    explicit NoSignChange(const std::string& what) : Error(what) {}
};

struct UnsupportedRule : Error {
    explicit UnsupportedRule(const std::string& what) : Error(what) {}
};

struct StepTooCoarse : Error {
    explicit StepTooCoarse(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace varstop
