// errors.hpp - exception types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace entcosmo {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A constructor or operation argument violates a documented invariant.
struct InvalidArgument : Error {
    using Error::Error;
};

// The zero mode of a massless field (mass = 0, k = 0) has no frequency scale.
struct DegenerateMode : Error {
    using Error::Error;
};

// gamma outside [0, 1) (or beyond the 1 - 1e-12 entropy divergence guard).
struct GammaOutOfRange : Error {
    using Error::Error;
};

// Entropy outside the invertible range [0, 41] bits.
struct EntropyOutOfRange : Error {
    using Error::Error;
};

// Estimators that divide by m^2 cannot be applied to a massless species.
struct MasslessUnidentifiable : Error {
    using Error::Error;
};

// Post-hoc validity check of the light-particle estimator failed.
struct RegimeViolation : Error {
    using Error::Error;
};

// The sigma-estimator denominator -(E/4) dlngamma/dE - 1 is non-positive.
struct DenominatorNonpositive : Error {
    using Error::Error;
};

// The two sigma-estimator samples are too close in energy to difference.
struct StepTooSmall : Error {
    using Error::Error;
};

// Mode-equation integration outside the supported parameter regime.
struct RegimeUnsupported : Error {
    using Error::Error;
};

// Integration exceeded the configured step budget.
struct StepLimitExceeded : Error {
    using Error::Error;
};

// Out-region basis matrix too ill-conditioned for a reliable 2x2 solve.
struct MatchingIllConditioned : Error {
    using Error::Error;
};

// All-zero entanglement data carries no parameter information.
struct Unidentifiable : Error {
    using Error::Error;
};

// Too few samples or too few distinct values to attempt a fit.
struct InsufficientData : Error {
    using Error::Error;
};

}  // namespace entcosmo
