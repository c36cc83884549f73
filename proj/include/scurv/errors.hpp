#pragma once

#include <stdexcept>
#include <string>

namespace scurv {

// Base for everything thrown by this library. Catching this at the CLI
// boundary maps every computational failure to one exit code.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation requested outside a field's or model's declared domain.
struct DomainError : Error {
    using Error::Error;
};

// Invalid construction parameters (catalog families, phi models).
struct ParamError : Error {
    using Error::Error;
};

struct SingularMetricError : Error {
    using Error::Error;
};

struct SingularPhiError : Error {
    using Error::Error;
};

struct SingularDeltaError : Error {
    using Error::Error;
};

struct QuadratureError : Error {
    using Error::Error;
};

struct NullVectorError : Error {
    using Error::Error;
};

// The metric fails to be positive/regular where a volume integral needs it.
struct RegularityError : Error {
    using Error::Error;
};

struct SingularGError : Error {
    using Error::Error;
};

// A formula path was asked to run at (numerically) vanishing beta-norm.
struct BZeroError : Error {
    using Error::Error;
};

// Truncated-series ops.
struct NonInvertibleError : Error {
    using Error::Error;
};

struct OrderError : Error {
    using Error::Error;
};

// Products between two symbol-carrying linear forms are rejected.
struct SymbolDegreeError : Error {
    using Error::Error;
};

struct DegenerateSystemError : Error {
    using Error::Error;
};

struct InconsistentSystemError : Error {
    using Error::Error;
};

struct SingularFrameError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

// CLI / config problems; maps to the usage exit code.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace scurv
