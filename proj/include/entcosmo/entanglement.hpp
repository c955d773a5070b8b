// entanglement.hpp - out-region state structure and entanglement entropy.
//
// Seen from the out-region, the in-vacuum of the pair (k, -k) is a two-mode
// squeezed vacuum with Schmidt probabilities forming a geometric distribution
//
//     p_n = (1 - gamma) gamma^n,   n = 0, 1, 2, ...
//
// so the reduced state of either member is diagonal and the von Neumann
// entropy has the closed form
//
//     S(gamma) = log2( gamma^{gamma/(gamma-1)} / (1 - gamma) )   [bits],
//
// equivalently (n+1) log2(n+1) - n log2(n) with n = gamma/(1-gamma).
// Both the closed form and the direct series summation are provided; they
// are independent evaluation routes used to cross-check each other.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "entcosmo/bogoliubov.hpp"
#include "entcosmo/model.hpp"

namespace entcosmo {

// Entropy diverges only as gamma -> 1; the model itself keeps gamma strictly
// below (omega_minus/omega_plus)^2 < 1, so anything beyond this guard is a
// caller error rather than physics.
inline constexpr double kGammaEntropyGuard = 1.0 - 1e-12;

// Largest entropy accepted by the inverse map, in bits.  Stays strictly
// below entropy_closed(kGammaEntropyGuard) so the bisection bracket always
// straddles the target.
inline constexpr double kMaxEntropyBits = 41.0;

struct SchmidtSpectrum {
    double gamma;
    std::vector<double> probs;  // p_n = (1-gamma) gamma^n, n = 0..truncation
    double tail_mass;           // exact geometric tail gamma^{truncation+1}
};

enum class ModeStatus { ok, degenerate };

struct EntanglementRecord {
    double k = 0.0;
    double gamma = 0.0;
    double mean_n = 0.0;
    double entropy_bits = 0.0;
    ModeStatus status = ModeStatus::ok;
};

// Schmidt probabilities of the (k, -k) pair state up to level `truncation`
// inclusive, plus the exact discarded tail mass.  Each p_n is evaluated as
// (1-gamma) gamma^n through pow, keeping the partition-of-unity defect at
// rounding level regardless of truncation depth.
inline SchmidtSpectrum schmidt_spectrum(double gamma, std::size_t truncation) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw GammaOutOfRange("schmidt_spectrum: gamma must lie in [0, 1)");

    SchmidtSpectrum s;
    s.gamma = gamma;
    s.probs.resize(truncation + 1);
    for (std::size_t n = 0; n <= truncation; ++n)
        s.probs[n] = (1.0 - gamma) * std::pow(gamma, static_cast<double>(n));
    s.tail_mass = std::pow(gamma, static_cast<double>(truncation) + 1.0);
    return s;
}

// Entanglement entropy in bits from the closed form
// S = log2(gamma^{gamma/(gamma-1)}) - log2(1-gamma), with S(0) = 0.
//
// Near either end of the domain one of the two logarithms has an argument
// close to 1 and loses relative precision through the rounding of the
// argument alone; log1p of the exactly representable complement keeps both
// terms relative-precise across the whole range.
inline double entropy_closed(double gamma) {
    if (!(gamma >= 0.0 && gamma <= kGammaEntropyGuard))
        throw GammaOutOfRange("entropy_closed: gamma must lie in [0, 1 - 1e-12]");
    if (gamma == 0.0) return 0.0;
    const double log2_gamma =
        gamma > 0.5 ? std::log1p(gamma - 1.0) / M_LN2 : std::log2(gamma);
    const double log2_one_minus =
        gamma > 0.5 ? std::log2(1.0 - gamma) : std::log1p(-gamma) / M_LN2;
    return gamma / (gamma - 1.0) * log2_gamma - log2_one_minus;
}

// Entanglement entropy in bits by direct summation of -sum p_n log2 p_n,
// truncated once the discarded tail is provably below tail_tol.  The
// truncation bound gamma^{N+1} (N |log2 gamma| + |log2(1-gamma)| + 4) covers
// the entropy carried by the geometric tail.
inline double entropy_series(double gamma, double tail_tol) {
    if (!(gamma >= 0.0 && gamma <= kGammaEntropyGuard))
        throw GammaOutOfRange("entropy_series: gamma must lie in [0, 1 - 1e-12]");
    if (!(tail_tol >= 1e-14 && tail_tol <= 1e-6))
        throw InvalidArgument("entropy_series: tail_tol must lie in [1e-14, 1e-6]");
    if (gamma == 0.0) return 0.0;

    const double abs_log2_gamma =
        gamma > 0.5 ? -std::log1p(gamma - 1.0) / M_LN2 : -std::log2(gamma);
    const double abs_log2_one_minus =
        gamma > 0.5 ? -std::log2(1.0 - gamma) : -std::log1p(-gamma) / M_LN2;

    // The geometric distribution has mean n = gamma/(1-gamma), so the series
    // needs O(n) terms; refuse the corner where that stops being computable
    // in reasonable time (gamma extremely close to 1 at tight tolerances).
    constexpr std::size_t kMaxSeriesTerms = 100000000;

    // smallest N with gamma^{N+1} (N |log2 g| + |log2(1-g)| + 4) < tail_tol
    std::size_t trunc = 0;
    double gpow = gamma;  // gamma^{N+1}
    while (gpow * (static_cast<double>(trunc) * abs_log2_gamma + abs_log2_one_minus + 4.0) >=
           tail_tol) {
        if (++trunc > kMaxSeriesTerms)
            throw InvalidArgument(
                "entropy_series: more than 1e8 terms needed at this (gamma, tail_tol); "
                "use entropy_closed");
        gpow *= gamma;
    }

    // -p_n log2 p_n = (1-gamma) gamma^n (n |log2 gamma| + |log2(1-gamma)|),
    // summed in ascending n.
    double sum = 0.0;
    double pn = 1.0 - gamma;
    for (std::size_t n = 0; n <= trunc; ++n) {
        sum += pn * (static_cast<double>(n) * abs_log2_gamma + abs_log2_one_minus);
        pn *= gamma;
    }
    return sum;
}

// One record per k, input order preserved.  A degenerate mode (massless zero
// mode) is flagged in place instead of aborting the batch.
inline std::vector<EntanglementRecord> entanglement_spectrum(const CosmologyParams& params,
                                                             const std::vector<double>& k_values) {
    std::vector<EntanglementRecord> records;
    records.reserve(k_values.size());
    for (double k : k_values) {
        EntanglementRecord rec;
        rec.k = k;
        try {
            const double g = gamma(params, ModeSpec(k));
            rec.gamma = g;
            rec.mean_n = g / (1.0 - g);
            rec.entropy_bits = entropy_closed(g);
        } catch (const DegenerateMode&) {
            rec.gamma = 0.0;
            rec.mean_n = 0.0;
            rec.entropy_bits = 0.0;
            rec.status = ModeStatus::degenerate;
        }
        records.push_back(rec);
    }
    return records;
}

}  // namespace entcosmo
