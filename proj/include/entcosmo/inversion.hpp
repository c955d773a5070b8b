// inversion.hpp - recovering cosmological parameters from entanglement data.
//
// Three layers:
//   gamma_from_entropy  inverts the strictly monotone closed-form entropy.
//   estimate_epsilon    light-particle estimator eps ~ (2 E^2/m^2) sqrt(gamma),
//   estimate_sigma      two-sample estimator built on d ln(gamma)/dE,
//                       both valid in the window m sqrt(eps) << E << 2 sigma.
//   fit_parameters      exact nonlinear least squares on the full forward
//                       model, for precise recovery of (epsilon, sigma).

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "entcosmo/model.hpp"

namespace entcosmo {

// One entanglement measurement: particle energy E = sqrt(k^2 + m^2) and the
// entropy of the (k, -k) pair state in bits.
struct EntanglementSample {
    double energy;
    double entropy_bits;
};

// One spectrum point for the least-squares fit.
struct FitSample {
    double k;
    double entropy_bits;
};

struct EpsilonEstimate {
    double epsilon_hat;
    double regime_ratio;  // m sqrt(eps_hat) / E, must stay well below 1
};

// sigma estimate plus the internals the estimator is built from.
struct SigmaEstimate {
    double sigma_hat;
    double d_ln_gamma_dE;     // finite difference of ln gamma at the midpoint
    double midpoint_energy;
    double gamma_mid;
};

struct FitResult {
    double epsilon_hat = 0.0;
    double sigma_hat = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitOptions {
    std::optional<std::pair<double, double>> init;  // (epsilon0, sigma0)
    int max_iterations = 200;
    double gradient_tol = 1e-12;  // infinity norm of the cost gradient
    double step_tol = 1e-14;      // relative parameter step
};

// Unique gamma in [0, 1) with entropy_closed(gamma) = entropy_bits, by
// bisection on the monotone closed form (log-domain refinement keeps full
// relative precision for the tiny gamma values the estimators consume).
// Throws EntropyOutOfRange outside [0, 41] bits.
double gamma_from_entropy(double entropy_bits);

// eps_hat = (2 E^2 / m^2) sqrt(gamma(S)).  Throws MasslessUnidentifiable for
// mass = 0 and RegimeViolation when the post-hoc ratio m sqrt(eps_hat)/E
// exceeds 0.5.
EpsilonEstimate estimate_epsilon(const EntanglementSample& sample, double mass);

// sigma_hat = (pi/2) sqrt[(1 + gamma) / (-(E/4) d ln gamma/dE - 1)] E from
// two samples at nearby energies, the derivative replaced by the central
// finite difference about the midpoint.  Throws StepTooSmall for coincident
// energies and DenominatorNonpositive outside the estimator's regime.
SigmaEstimate estimate_sigma(const EntanglementSample& low, const EntanglementSample& high,
                             double mass);

// Minimize sum_i [S_model(eps, sigma; k_i) - S_i]^2 by damped Gauss-Newton
// in log-parameters.  Initialization from the epsilon estimator on the
// lowest-energy sample and sigma0 = median sample energy unless options.init
// is given.  Throws Unidentifiable when every entropy is zero and
// InsufficientData below 3 samples or 2 distinct nonzero entropies; hitting
// the iteration cap is reported through converged = false, not an error.
FitResult fit_parameters(const std::vector<FitSample>& samples, double mass,
                         const FitOptions& options = {});

}  // namespace entcosmo
