// bogoliubov.hpp - closed-form Bogoliubov spectrum of the tanh expansion.
//
// The smooth expansion mixes each mode k only with its partner -k, and the
// single parameter
//
//     gamma = |beta_k / alpha_k|^2
//           = sinh^2(pi omega_minus / sigma) / sinh^2(pi omega_plus / sigma)
//
// fixes the full spectrum through the bosonic normalization
// |alpha|^2 - |beta|^2 = 1:
//
//     |alpha|^2 = 1 / (1 - gamma),   |beta|^2 = gamma / (1 - gamma).
//
// gamma is evaluated through log-sinh differences so that neither the
// adiabatic regime (pi omega / sigma large, sinh overflows) nor the sudden
// regime (arguments tiny, gamma itself tiny) loses relative precision.

#pragma once

#include <cmath>

#include "entcosmo/model.hpp"

namespace entcosmo {

struct BogoliubovCoefficients {
    double alpha_sq;  // |alpha_k|^2 >= 1
    double beta_sq;   // |beta_k|^2 >= 0
    double gamma;     // |beta_k/alpha_k|^2 in [0,1)
};

namespace detail {

// x * coth(x), continuous through x = 0 where it equals 1.
inline double x_coth(double x) {
    if (x == 0.0) return 1.0;
    if (x < 1e-4) return 1.0 + x * x / 3.0;     // series, avoids 0/0 noise
    if (x > 20.0) return x;                      // coth(x) - 1 < 1e-17
    return x / std::tanh(x);
}

}  // namespace detail

// gamma = sinh^2(pi omega_minus/sigma) / sinh^2(pi omega_plus/sigma).
//
// Computed as exp(2 [ -pi omega_in/sigma
//                     + ln(1 - e^{-2 pi omega_minus/sigma})
//                     - ln(1 - e^{-2 pi omega_plus/sigma}) ]),
// using omega_plus - omega_minus = omega_in exactly, so the result keeps
// full relative precision for gamma as small as the underflow threshold.
// Deep in the adiabatic regime the exponential underflows to exactly 0.
inline double gamma(const CosmologyParams& params, const ModeSpec& mode) {
    const FrequencySet w = frequencies(params, mode);
    if (w.omega_minus == 0.0) return 0.0;  // massless decoupling (or epsilon = 0)

    const double c = M_PI / params.sigma;
    const double log_ratio = -c * w.omega_in
                             + std::log(-std::expm1(-2.0 * c * w.omega_minus))
                             - std::log(-std::expm1(-2.0 * c * w.omega_plus));
    return std::exp(2.0 * log_ratio);
}

// |alpha|^2 = 1/(1-gamma), |beta|^2 = gamma/(1-gamma).
inline BogoliubovCoefficients alpha_beta_sq(const CosmologyParams& params, const ModeSpec& mode) {
    const double g = gamma(params, mode);
    return BogoliubovCoefficients{1.0 / (1.0 - g), g / (1.0 - g), g};
}

// Expected out-region excitation number per mode, n = |beta_k|^2.
inline double mean_particle_number(const CosmologyParams& params, const ModeSpec& mode) {
    const double g = gamma(params, mode);
    return g / (1.0 - g);
}

// Partial derivatives of ln gamma with respect to the cosmological
// parameters, for gamma > 0:
//
//   d ln gamma / d epsilon = (pi m^2)/(sigma omega_out) [coth(x-) - coth(x+)]
//   d ln gamma / d sigma   = (2/sigma) [x+ coth(x+) - x- coth(x-)]
//
// with x+- = pi omega_+- / sigma.  Both are positive: particle creation
// grows with expansion volume and with rapidity.  Used by the parameter fit.
struct GammaLogDerivatives {
    double d_ln_gamma_d_epsilon;
    double d_ln_gamma_d_sigma;
};

inline GammaLogDerivatives gamma_log_derivatives(const CosmologyParams& params,
                                                 const ModeSpec& mode) {
    const FrequencySet w = frequencies(params, mode);
    if (w.omega_minus == 0.0)
        throw GammaOutOfRange("gamma_log_derivatives: ln gamma undefined at gamma = 0");

    const double c = M_PI / params.sigma;
    const double x_minus = c * w.omega_minus;
    const double x_plus = c * w.omega_plus;
    const double coth_minus = detail::x_coth(x_minus) / x_minus;
    const double coth_plus = detail::x_coth(x_plus) / x_plus;

    const double m2 = params.mass * params.mass;
    const double d_eps = (M_PI * m2) / (params.sigma * w.omega_out) * (coth_minus - coth_plus);
    const double d_sigma =
        (2.0 / params.sigma) * (detail::x_coth(x_plus) - detail::x_coth(x_minus));
    return GammaLogDerivatives{d_eps, d_sigma};
}

}  // namespace entcosmo
