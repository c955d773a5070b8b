// inversion.cpp - entropy inversion, light-particle estimators, LM fit.

#include "entcosmo/inversion.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "entcosmo/bogoliubov.hpp"
#include "entcosmo/entanglement.hpp"

namespace entcosmo {
namespace {

// dS/dgamma in bits: -log2(gamma) / (1 - gamma)^2, positive on (0, 1).
double entropy_slope(double g) {
    return -std::log2(g) / ((1.0 - g) * (1.0 - g));
}

void require_positive_mass(double mass, const char* where) {
    if (!std::isfinite(mass) || mass < 0.0)
        throw InvalidArgument(std::string(where) + ": mass must be finite and >= 0");
    if (mass == 0.0)
        throw MasslessUnidentifiable(std::string(where) +
                                     ": massless modes carry no entanglement, m^2 not invertible");
}

void require_estimator_sample(const EntanglementSample& s, double mass, const char* where) {
    if (!std::isfinite(s.energy) || s.energy <= mass)
        throw InvalidArgument(std::string(where) + ": sample energy must exceed the mass");
    if (!(s.entropy_bits >= 0.0 && s.entropy_bits <= kMaxEntropyBits))
        throw EntropyOutOfRange(std::string(where) + ": entropy outside [0, 41] bits");
}

// Raw estimator formula without the regime guard; fit initialization uses it
// as a starting value even where the guard would reject it.
double epsilon_formula(double energy, double entropy_bits, double mass) {
    const double g = gamma_from_entropy(entropy_bits);
    return 2.0 * energy * energy / (mass * mass) * std::sqrt(g);
}

// Forward model and its gradient in log-parameters at one spectrum point.
struct ModelPoint {
    double entropy_bits = 0.0;
    double d_entropy_d_ln_eps = 0.0;
    double d_entropy_d_ln_sigma = 0.0;
};

ModelPoint model_point(double eps, double sigma, double mass, double k) {
    ModelPoint p;
    const CosmologyParams params(eps, sigma, mass);
    const ModeSpec mode(k);
    const double g = gamma(params, mode);
    if (g == 0.0) return p;  // underflowed mode: flat contribution
    p.entropy_bits = entropy_closed(g);
    const GammaLogDerivatives d = gamma_log_derivatives(params, mode);
    const double slope_times_gamma = entropy_slope(g) * g;
    p.d_entropy_d_ln_eps = slope_times_gamma * d.d_ln_gamma_d_epsilon * eps;
    p.d_entropy_d_ln_sigma = slope_times_gamma * d.d_ln_gamma_d_sigma * sigma;
    return p;
}

}  // namespace

double gamma_from_entropy(double entropy_bits) {
    if (!(entropy_bits >= 0.0 && entropy_bits <= kMaxEntropyBits))
        throw EntropyOutOfRange("gamma_from_entropy: entropy must lie in [0, 41] bits");
    if (entropy_bits == 0.0) return 0.0;

    // Bisection on ln(gamma): the bracket spans every representable gamma in
    // (0, 1 - 1e-12) and 120 halvings push the relative width below 1 ulp.
    double lo = std::log(1e-300);
    double hi = std::log(kGammaEntropyGuard);
    if (entropy_closed(std::exp(lo)) >= entropy_bits) {
        // Entropy below the resolvable floor; the asymptotic inverse of
        // S ln2 = gamma (1 - ln gamma) is exact to machine noise here.
        const double t = entropy_bits * M_LN2;
        return t / (1.0 - std::log(t));
    }
    for (int iter = 0; iter < 120; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (entropy_closed(std::exp(mid)) < entropy_bits)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

EpsilonEstimate estimate_epsilon(const EntanglementSample& sample, double mass) {
    require_positive_mass(mass, "estimate_epsilon");
    require_estimator_sample(sample, mass, "estimate_epsilon");

    EpsilonEstimate est;
    est.epsilon_hat = epsilon_formula(sample.energy, sample.entropy_bits, mass);
    est.regime_ratio = mass * std::sqrt(est.epsilon_hat) / sample.energy;
    if (est.regime_ratio > 0.5)
        throw RegimeViolation(
            "estimate_epsilon: m sqrt(eps_hat)/E > 0.5, outside the light-particle regime");
    return est;
}

SigmaEstimate estimate_sigma(const EntanglementSample& low, const EntanglementSample& high,
                             double mass) {
    require_positive_mass(mass, "estimate_sigma");
    require_estimator_sample(low, mass, "estimate_sigma");
    require_estimator_sample(high, mass, "estimate_sigma");
    if (low.entropy_bits <= 0.0 || high.entropy_bits <= 0.0)
        throw EntropyOutOfRange("estimate_sigma: both entropies must be positive");

    const EntanglementSample& s1 = low.energy <= high.energy ? low : high;
    const EntanglementSample& s2 = low.energy <= high.energy ? high : low;
    const double e_mid = 0.5 * (s1.energy + s2.energy);
    if (!(std::fabs(s2.energy - s1.energy) > 1e-12 * e_mid))
        throw StepTooSmall("estimate_sigma: sample energies too close to difference");

    const double g1 = gamma_from_entropy(s1.entropy_bits);
    const double g2 = gamma_from_entropy(s2.entropy_bits);

    SigmaEstimate est;
    est.midpoint_energy = e_mid;
    est.gamma_mid = std::sqrt(g1 * g2);
    est.d_ln_gamma_dE = (std::log(g2) - std::log(g1)) / (s2.energy - s1.energy);

    const double denom = -(e_mid / 4.0) * est.d_ln_gamma_dE - 1.0;
    if (denom <= 0.0)
        throw DenominatorNonpositive(
            "estimate_sigma: -(E/4) d ln gamma/dE - 1 <= 0, outside the estimator's regime");
    est.sigma_hat = M_PI_2 * std::sqrt((1.0 + est.gamma_mid) / denom) * e_mid;
    return est;
}

FitResult fit_parameters(const std::vector<FitSample>& samples, double mass,
                         const FitOptions& options) {
    require_positive_mass(mass, "fit_parameters");
    if (samples.size() < 3)
        throw InsufficientData("fit_parameters: need at least 3 samples");

    std::vector<double> nonzero_entropies;
    for (const FitSample& s : samples) {
        if (!std::isfinite(s.k))
            throw InvalidArgument("fit_parameters: sample momentum must be finite");
        if (!(s.entropy_bits >= 0.0 && s.entropy_bits <= kMaxEntropyBits))
            throw EntropyOutOfRange("fit_parameters: entropy outside [0, 41] bits");
        if (s.entropy_bits > 0.0) nonzero_entropies.push_back(s.entropy_bits);
    }
    if (nonzero_entropies.empty())
        throw Unidentifiable("fit_parameters: all entropies zero, parameters unidentifiable");
    std::sort(nonzero_entropies.begin(), nonzero_entropies.end());
    const auto distinct =
        std::unique(nonzero_entropies.begin(), nonzero_entropies.end()) - nonzero_entropies.begin();
    if (distinct < 2)
        throw InsufficientData("fit_parameters: need at least 2 distinct nonzero entropies");

    // Default initialization: epsilon estimator (sans regime guard) on the
    // lowest-energy informative sample; sigma0 = median sample energy.  A
    // caller-supplied start is used as an additional candidate, not a
    // replacement: candidates compete on the final objective below.
    std::array<double, 2> default_theta;  // (ln eps, ln sigma)
    {
        std::vector<double> energies;
        energies.reserve(samples.size());
        for (const FitSample& s : samples) energies.push_back(std::hypot(s.k, mass));

        double e_low = 0.0;
        double s_low = 0.0;
        bool found = false;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].entropy_bits > 0.0 && (!found || energies[i] < e_low)) {
                e_low = energies[i];
                s_low = samples[i].entropy_bits;
                found = true;
            }
        }
        default_theta[0] = std::log(std::max(epsilon_formula(e_low, s_low, mass), 1e-8));

        std::nth_element(energies.begin(), energies.begin() + energies.size() / 2,
                         energies.end());
        default_theta[1] = std::log(energies[energies.size() / 2]);
    }

    std::vector<std::array<double, 2>> starts;
    if (options.init) {
        if (!(options.init->first > 0.0 && options.init->second > 0.0))
            throw InvalidArgument("fit_parameters: init values must be positive");
        starts.push_back({std::log(options.init->first), std::log(options.init->second)});
    }
    if (starts.empty() || starts.front() != default_theta) starts.push_back(default_theta);

    // Residual assemblies for the two fit phases.  The entropy spectrum spans
    // many decades, so the plain S-residual objective has a long, nearly flat
    // valley dominated by the few lowest-k samples, with shallow spurious
    // stationary points along its floor.  A first pass on log-entropy
    // residuals weighs every sample O(1) and locates the right basin; the
    // second pass then minimizes the plain objective from there.
    const auto assemble_linear = [&](const double th[2], std::vector<double>& r,
                                     std::vector<std::array<double, 2>>& jac) {
        const double eps = std::exp(th[0]);
        const double sigma = std::exp(th[1]);
        double cost = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const ModelPoint p = model_point(eps, sigma, mass, samples[i].k);
            r[i] = p.entropy_bits - samples[i].entropy_bits;
            jac[i] = {p.d_entropy_d_ln_eps, p.d_entropy_d_ln_sigma};
            cost += r[i] * r[i];
        }
        return cost;
    };
    const auto assemble_log = [&](const double th[2], std::vector<double>& r,
                                  std::vector<std::array<double, 2>>& jac) {
        const double eps = std::exp(th[0]);
        const double sigma = std::exp(th[1]);
        double cost = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].entropy_bits <= 0.0) {
                r[i] = 0.0;
                jac[i] = {0.0, 0.0};
                continue;
            }
            const ModelPoint p = model_point(eps, sigma, mass, samples[i].k);
            const double s_model = std::max(p.entropy_bits, 1e-300);
            r[i] = std::log(s_model) - std::log(samples[i].entropy_bits);
            jac[i] = {p.d_entropy_d_ln_eps / s_model, p.d_entropy_d_ln_sigma / s_model};
            cost += r[i] * r[i];
        }
        return cost;
    };

    const std::size_t n = samples.size();
    int iterations_used = 0;

    // Damped Gauss-Newton driver over one residual assembly, updating theta
    // in place.  Returns the convergence certificate: gradient infinity-norm
    // below threshold at a point where the model actually responds to the
    // parameters (a zero Jacobian has zero gradient too but certifies
    // nothing).
    const auto lm_drive = [&](std::array<double, 2>& theta, const auto& assemble,
                              double& final_cost) -> bool {
        std::vector<double> residual(n), trial_residual(n);
        std::vector<std::array<double, 2>> jac(n), trial_jac(n);

        const auto certified_stationary = [&] {
            double jtr0 = 0.0;
            double jtr1 = 0.0;
            double jtj_trace = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                jtr0 += jac[i][0] * residual[i];
                jtr1 += jac[i][1] * residual[i];
                jtj_trace += jac[i][0] * jac[i][0] + jac[i][1] * jac[i][1];
            }
            return jtj_trace > 0.0 &&
                   2.0 * std::max(std::fabs(jtr0), std::fabs(jtr1)) < options.gradient_tol;
        };

        double cost = assemble(theta.data(), residual, jac);
        double lambda = 1e-3;
        bool certified = false;
        bool stalled = false;

        for (int iter = 1; iter <= options.max_iterations && !stalled; ++iter) {
            ++iterations_used;

            // Normal equations (J^T J + lambda diag(J^T J)) delta = -J^T r.
            double jtj[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            double jtr[2] = {0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                jtj[0][0] += jac[i][0] * jac[i][0];
                jtj[0][1] += jac[i][0] * jac[i][1];
                jtj[1][1] += jac[i][1] * jac[i][1];
                jtr[0] += jac[i][0] * residual[i];
                jtr[1] += jac[i][1] * residual[i];
            }
            jtj[1][0] = jtj[0][1];

            if (jtj[0][0] + jtj[1][1] > 0.0 &&
                2.0 * std::max(std::fabs(jtr[0]), std::fabs(jtr[1])) < options.gradient_tol) {
                certified = true;
                break;
            }

            bool stepped = false;
            for (int damp = 0; damp < 40 && !stepped; ++damp) {
                const double d0 = jtj[0][0] + lambda * std::max(jtj[0][0], 1e-30);
                const double d1 = jtj[1][1] + lambda * std::max(jtj[1][1], 1e-30);
                const double det = d0 * d1 - jtj[0][1] * jtj[0][1];
                if (det <= 0.0 || !std::isfinite(det)) {
                    lambda *= 10.0;
                    continue;
                }
                const double delta[2] = {(-jtr[0] * d1 + jtr[1] * jtj[0][1]) / det,
                                         (-jtr[1] * d0 + jtr[0] * jtj[0][1]) / det};
                // Keep exp() finite; a clamped walk just costs iterations.
                const std::array<double, 2> trial = {
                    std::clamp(theta[0] + delta[0], -300.0, 300.0),
                    std::clamp(theta[1] + delta[1], -300.0, 300.0)};

                const double trial_cost = assemble(trial.data(), trial_residual, trial_jac);
                if (trial_cost < cost) {
                    const double step = std::max(std::fabs(trial[0] - theta[0]),
                                                 std::fabs(trial[1] - theta[1]));
                    const double scale =
                        std::max({std::fabs(theta[0]), std::fabs(theta[1]), 1.0});
                    theta = trial;
                    cost = trial_cost;
                    residual.swap(trial_residual);
                    jac.swap(trial_jac);
                    lambda = std::max(lambda * 0.3, 1e-14);
                    stepped = true;
                    if (step < options.step_tol * scale) {
                        // Stationary to rounding; certify through the gradient.
                        certified = certified_stationary();
                        stalled = true;
                    }
                } else {
                    lambda *= 10.0;
                    if (lambda > 1e14) break;
                }
            }
            if (!stepped) {
                // Damping exhausted at a numerically flat point.
                certified = certified_stationary();
                break;
            }
        }
        final_cost = cost;
        return certified;
    };

    const auto linear_cost_at = [&](const std::array<double, 2>& theta) {
        std::vector<double> r(n);
        std::vector<std::array<double, 2>> jac(n);
        return assemble_linear(theta.data(), r, jac);
    };

    // Phase 1: log-residual seeding from every candidate start; the endpoint
    // (or raw start) with the lowest plain-objective cost wins.
    std::array<double, 2> best_theta = starts.front();
    double best_cost = linear_cost_at(best_theta);
    for (const auto& start : starts) {
        const double raw_cost = linear_cost_at(start);
        if (raw_cost < best_cost) {
            best_cost = raw_cost;
            best_theta = start;
        }
        std::array<double, 2> seeded = start;
        double log_cost = 0.0;
        lm_drive(seeded, assemble_log, log_cost);
        const double seeded_cost = linear_cost_at(seeded);
        if (seeded_cost < best_cost) {
            best_cost = seeded_cost;
            best_theta = seeded;
        }
    }

    // Phase 2: minimize the specified objective from the winning seed.
    FitResult result;
    double final_cost = 0.0;
    result.converged = lm_drive(best_theta, assemble_linear, final_cost);
    result.iterations = iterations_used;
    result.epsilon_hat = std::exp(best_theta[0]);
    result.sigma_hat = std::exp(best_theta[1]);
    result.residual_norm = std::sqrt(final_cost);
    return result;
}

}  // namespace entcosmo
