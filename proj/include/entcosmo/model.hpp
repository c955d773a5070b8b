// model.hpp - toy-universe background and asymptotic mode frequencies.
//
// The background is a two-dimensional Robertson-Walker metric whose conformal
// scale factor
//
//     C(tau) = 1 + epsilon * (1 + tanh(sigma * tau))
//
// interpolates smoothly between flat in/out regions, C -> 1 as tau -> -inf
// and C -> 1 + 2*epsilon as tau -> +inf.  A scalar mode of momentum k and
// mass m oscillates with asymptotic angular frequencies
//
//     omega_in  = sqrt(k^2 + m^2)
//     omega_out = sqrt(k^2 + m^2 (1 + 2*epsilon))
//     omega_pm  = (omega_out +/- omega_in) / 2.
//
// Natural units (hbar = c = 1) throughout; tau is conformal time.

#pragma once

#include <cmath>
#include <string>

#include "entcosmo/errors.hpp"

namespace entcosmo {

// Expansion volume (epsilon), expansion rapidity (sigma, units of inverse
// conformal time) and field mass m.  mass = 0 and epsilon = 0 are meaningful
// degenerate cases: massless modes decouple from the expansion entirely, and
// epsilon = 0 is the static spacetime with no particle creation.
struct CosmologyParams {
    double epsilon;
    double sigma;
    double mass;

    CosmologyParams(double epsilon_, double sigma_, double mass_)
        : epsilon(epsilon_), sigma(sigma_), mass(mass_) {
        if (!(std::isfinite(epsilon) && epsilon >= 0.0))
            throw InvalidArgument("CosmologyParams: epsilon must be finite and >= 0");
        if (!(std::isfinite(sigma) && sigma > 0.0))
            throw InvalidArgument("CosmologyParams: sigma must be finite and > 0");
        if (!(std::isfinite(mass) && mass >= 0.0))
            throw InvalidArgument("CosmologyParams: mass must be finite and >= 0");
    }
};

// Mode momentum.  Sign is physically irrelevant: mixing couples only k and
// -k, and every spectral quantity depends on k^2.
struct ModeSpec {
    double k;

    explicit ModeSpec(double k_) : k(k_) {
        if (!std::isfinite(k))
            throw InvalidArgument("ModeSpec: k must be finite");
    }
};

struct FrequencySet {
    double omega_in;
    double omega_out;
    double omega_plus;
    double omega_minus;
};

// C(tau) = 1 + epsilon (1 + tanh(sigma tau)); strictly increasing in tau,
// bounded in (1, 1 + 2 epsilon).
inline double scale_factor(const CosmologyParams& params, double tau) {
    return 1.0 + params.epsilon * (1.0 + std::tanh(params.sigma * tau));
}

// Asymptotic in/out frequencies of mode k.
//
// omega_minus is evaluated as epsilon m^2 / (omega_out + omega_in), which is
// algebraically identical to (omega_out - omega_in)/2 but keeps full relative
// precision when epsilon m^2 << k^2; downstream inversion depends on tiny
// omega_minus values being exact.
inline FrequencySet frequencies(const CosmologyParams& params, const ModeSpec& mode) {
    if (params.mass == 0.0 && mode.k == 0.0)
        throw DegenerateMode("frequencies: massless zero mode has no frequency scale");

    const double m = params.mass;
    const double omega_in = std::hypot(mode.k, m);
    const double omega_out = std::hypot(mode.k, m * std::sqrt(1.0 + 2.0 * params.epsilon));
    const double omega_minus = params.epsilon * m * m / (omega_out + omega_in);
    const double omega_plus = 0.5 * (omega_out + omega_in);
    return FrequencySet{omega_in, omega_out, omega_plus, omega_minus};
}

}  // namespace entcosmo
