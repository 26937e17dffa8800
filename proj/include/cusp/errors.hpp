#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace cusp {

using Vec4 = std::array<double, 4>;

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A user-supplied perturbation produced a non-finite value.
struct EvalError : Error {
    using Error::Error;
};

// Precondition on the mathematical domain violated (eps = 0, wrong sign, ...).
struct DomainError : Error {
    using Error::Error;
};

// Point outside the domain of a blow-up chart or chart overlap.
struct ChartDomainError : DomainError {
    using DomainError::DomainError;
};

// Invalid configuration (tolerances, layer constants, CLI input).
struct ConfigError : Error {
    using Error::Error;
};

// No root of the critical-manifold cubic satisfies the section constraints.
struct GeometryError : Error {
    using Error::Error;
};

// Slow-flow quantity requested on or across the fold curve.
struct FoldSingularityError : DomainError {
    using DomainError::DomainError;
};

// A map is not of exponential type at the probed point (A would be <= 0).
struct NonContractiveError : Error {
    using Error::Error;
};

// Composition input failed to be a diffeomorphism (derivative sign change).
struct DiffeomorphismError : Error {
    using Error::Error;
};

// Right-composition input violates Psi(0) = 0.
struct ShiftViolationError : Error {
    using Error::Error;
};

// compose_chain inputs do not match the required role pattern.
struct ChainStructureError : Error {
    using Error::Error;
};

// Fiber derivative degenerate (non-finite difference quotient).
struct DegenerateFiberError : Error {
    using Error::Error;
};

// Every row of a sweep failed, or the sweep input was empty.
struct SweepError : Error {
    using Error::Error;
};

// Fold-passage trajectory never jumped within the allowed window.
struct FoldDetectionError : Error {
    using Error::Error;
};

// Integration failures carry the last state reached.
struct IntegrationError : Error {
    Vec4 last_state{};
    double last_time = 0.0;
    IntegrationError(const std::string& msg, const Vec4& y, double t)
        : Error(msg), last_state(y), last_time(t) {}
};

// Step size underflowed the hard floor.
struct StiffnessError : IntegrationError {
    using IntegrationError::IntegrationError;
};

// State left the representable range.
struct BlowupError : IntegrationError {
    using IntegrationError::IntegrationError;
};

// Section was not crossed before t_max.
struct SectionTimeoutError : IntegrationError {
    using IntegrationError::IntegrationError;
};

} // namespace cusp
