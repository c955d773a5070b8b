// acceptance.cpp - end-to-end acceptance suite.
//
// Runs each numbered criterion at its pinned tolerance and prints one
// PASS/FAIL line per criterion; exits nonzero if any fail.  Wall-clock
// budgets are part of the criteria and are enforced.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "entcosmo/bogoliubov.hpp"
#include "entcosmo/entanglement.hpp"
#include "entcosmo/inversion.hpp"
#include "entcosmo/mode_oracle.hpp"
#include "entcosmo/model.hpp"
#include "subprocess.hpp"

using namespace entcosmo;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

EntanglementSample synthetic_sample(const CosmologyParams& params, double energy) {
    const double k = std::sqrt(energy * energy - params.mass * params.mass);
    return {energy, entropy_closed(gamma(params, ModeSpec(k)))};
}

// criterion 1: series/closed-form entropy agreement
Check criterion_entropy_agreement() {
    Check c;
    for (double g : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        const double diff = std::fabs(entropy_series(g, 1e-12) - entropy_closed(g));
        c.require(diff < 1e-10, "series/closed diff " + std::to_string(diff) + " at gamma " +
                                    std::to_string(g));
    }
    c.require(std::fabs(entropy_closed(0.5) - 2.0) < 1e-14, "entropy_closed(0.5) != 2");
    return c;
}

// criterion 2: oracle equivalence on the 27-point grid
Check criterion_oracle_grid() {
    Check c;
    for (double eps : {0.1, 1.0, 3.0})
        for (double sigma : {0.3, 1.0, 10.0})
            for (double k : {0.0, 0.5, 2.0}) {
                const auto rep =
                    check_against_closed_form(CosmologyParams(eps, sigma, 1.0), ModeSpec(k));
                std::ostringstream where;
                where << " at (eps=" << eps << ", sigma=" << sigma << ", k=" << k << ")";
                c.require(rep.gamma_rel_err <= 1e-6,
                          "gamma rel err " + std::to_string(rep.gamma_rel_err) + where.str());
                c.require(rep.normalization_defect <= 1e-8,
                          "normalization defect" + where.str());
                c.require(rep.trace.wronskian_drift < 1e-8, "wronskian drift" + where.str());
            }
    return c;
}

// criterion 3: massless decoupling
Check criterion_massless() {
    Check c;
    for (double eps : {0.1, 1.0, 3.0})
        for (double sigma : {0.3, 1.0, 10.0})
            for (double k : {0.5, 2.0}) {
                const CosmologyParams p(eps, sigma, 0.0);
                c.require(gamma(p, ModeSpec(k)) == 0.0, "closed-form gamma not exactly 0");
                c.require(entropy_closed(gamma(p, ModeSpec(k))) == 0.0, "entropy not exactly 0");
                const auto run = evolve_mode(p, ModeSpec(k));
                c.require(std::abs(run.coefficients.beta) < 1e-8, "oracle |beta| >= 1e-8");
            }
    return c;
}

// criterion 4: monotonicity and the sudden-limit bound
Check criterion_monotonicity() {
    Check c;
    double prev = -1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double g = (1.0 - 1e-12) * (i / 10000.0);
        const double s = entropy_closed(g);
        c.require(s > prev, "entropy not strictly increasing at gamma " + std::to_string(g));
        prev = s;
    }
    const CosmologyParams base(1.0, 1.0, 1.0);
    const FrequencySet w = frequencies(base, ModeSpec(1.0));
    const double sudden = std::pow(w.omega_minus / w.omega_plus, 2);
    double prev_g = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double sigma = std::pow(10.0, -2.0 + 4.0 * i / 100.0);
        const double g = gamma(CosmologyParams(1.0, sigma, 1.0), ModeSpec(1.0));
        if (g > 0.0 || prev_g > 0.0)
            c.require(g > prev_g, "gamma not strictly increasing in sigma at sigma " +
                                      std::to_string(sigma));
        c.require(g <= sudden, "gamma above the sudden-limit bound");
        prev_g = g;
    }
    return c;
}

// criterion 5: epsilon reconstruction from synthetic entanglement
Check criterion_epsilon_reconstruction() {
    Check c;
    const CosmologyParams truth(1.0, 1.0, 1e-3);
    const auto est = estimate_epsilon(synthetic_sample(truth, 0.05), 1e-3);
    c.require(std::fabs(est.epsilon_hat - 1.0) < 0.02,
              "eps_hat " + std::to_string(est.epsilon_hat) + " not within 2%");
    return c;
}

// criterion 6: sigma estimator internals and end-to-end accuracy
Check criterion_sigma_estimator() {
    Check c;
    const CosmologyParams truth(1.0, 1.0, 1e-3);
    const double E = 0.05;

    // analytic d ln gamma / dE of the closed form, derived independently
    const double k = std::sqrt(E * E - truth.mass * truth.mass);
    const FrequencySet w = frequencies(truth, ModeSpec(k));
    const double cc = M_PI / truth.sigma;
    const auto coth = [](double x) { return x < 1e-4 ? 1.0 / x + x / 3.0 : 1.0 / std::tanh(x); };
    const double analytic = 2.0 * cc *
                            (coth(cc * w.omega_minus) * (E / w.omega_out - 1.0) / 2.0 -
                             coth(cc * w.omega_plus) * (E / w.omega_out + 1.0) / 2.0);

    const double h = 1e-4;
    const auto est = estimate_sigma(synthetic_sample(truth, E * (1 - h / 2)),
                                    synthetic_sample(truth, E * (1 + h / 2)), truth.mass);
    const double fd_rel = std::fabs(est.d_ln_gamma_dE - analytic) / std::fabs(analytic);
    c.require(fd_rel < 1e-5, "finite difference off by " + std::to_string(fd_rel));

    const auto est_wide = estimate_sigma(synthetic_sample(truth, E * (1 - 5e-4)),
                                         synthetic_sample(truth, E * (1 + 5e-4)), truth.mass);
    c.require(est_wide.sigma_hat < 1.5 && est_wide.sigma_hat > 1.0 / 1.5,
              "sigma_hat " + std::to_string(est_wide.sigma_hat) + " outside factor 1.5");
    return c;
}

// criterion 7: full reconstruction by least squares
Check criterion_fit() {
    Check c;
    const CosmologyParams truth(1.0, 1.0, 1.0);
    std::vector<FitSample> data;
    for (int i = 0; i < 50; ++i) {
        const double k = 0.1 + (5.0 - 0.1) * i / 49.0;
        data.push_back({k, entropy_closed(gamma(truth, ModeSpec(k)))});
    }
    const FitResult fit = fit_parameters(data, 1.0);
    c.require(fit.converged, "fit did not converge");
    c.require(std::fabs(fit.epsilon_hat - 1.0) < 1e-6,
              "eps_hat " + std::to_string(fit.epsilon_hat));
    c.require(std::fabs(fit.sigma_hat - 1.0) < 1e-6, "sigma_hat " + std::to_string(fit.sigma_hat));
    return c;
}

// criterion 8: entropy inversion round trip
Check criterion_round_trip() {
    Check c;
    for (int i = 0; i <= 1000; ++i) {
        const double g = 0.99 * i / 1000.0;
        const double back = gamma_from_entropy(entropy_closed(g));
        c.require(std::fabs(back - g) < 1e-11,
                  "round-trip error " + std::to_string(std::fabs(back - g)) + " at gamma " +
                      std::to_string(g));
    }
    return c;
}

// criterion 9: CLI determinism, golden file, exit-code table
Check criterion_cli() {
    using testutil::run_cli;
    Check c;

    const std::vector<std::string> golden_args = {
        "spectrum", "--epsilon", "1",       "--sigma", "1",         "--mass", "1",
        "--k-min",  "0.5",       "--k-max", "2.5",     "--k-count", "5"};
    const auto first = run_cli(golden_args);
    const auto second = run_cli(golden_args);
    c.require(first.exit_code == 0, "spectrum exit code");
    c.require(first.out == second.out, "spectrum output not byte-identical across runs");

    std::ifstream golden(std::string(ENTCOSMO_TEST_DATA_DIR) + "/golden_spectrum.csv",
                         std::ios::binary);
    std::ostringstream golden_body;
    golden_body << golden.rdbuf();
    c.require(golden.good() && first.out == golden_body.str(), "golden spectrum mismatch");

    c.require(run_cli({"spectrum", "--sigma", "1", "--mass", "1"}).exit_code == 2,
              "spectrum usage error should exit 2");
    c.require(run_cli({"oracle", "--epsilon", "1", "--sigma", "0.01", "--mass", "1", "--k", "1"})
                      .exit_code == 2,
              "oracle regime violation should exit 2");
    c.require(run_cli({"oracle", "--epsilon", "1", "--sigma", "1", "--mass", "1", "--k", "1",
                       "--max-rel-err", "1e-15"})
                      .exit_code == 3,
              "oracle above threshold should exit 3");
    c.require(run_cli({"oracle", "--epsilon", "1", "--sigma", "1", "--mass", "1", "--k", "1"})
                      .exit_code == 0,
              "oracle within threshold should exit 0");
    c.require(run_cli({"invert", "--entropy", "-1"}).exit_code == 2,
              "invert out-of-range entropy should exit 2");
    c.require(run_cli({"invert", "--entropy", "2"}).exit_code == 0, "invert should exit 0");
    c.require(
        run_cli({"invert", "--entropy", "2", "--energy", "1.005", "--mass", "1"}).exit_code == 4,
        "invert regime violation should exit 4");

    const std::string path =
        "/tmp/entcosmo_acceptance_" + std::to_string(getpid()) + "_fit.csv";
    {
        std::ofstream f(path);
        f << "k,entropy_bits\n";
        f.precision(17);
        const CosmologyParams truth(1.0, 1.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const double k = 0.1 + (5.0 - 0.1) * i / 49.0;
            f << k << "," << entropy_closed(gamma(truth, ModeSpec(k))) << "\n";
        }
    }
    c.require(run_cli({"fit", "--input", path, "--mass", "1"}).exit_code == 0,
              "fit on clean data should exit 0");
    {
        std::ofstream f(path);
        f << "k,entropy_bits\n1,30\n2,25\n3,20\n";
    }
    c.require(run_cli({"fit", "--input", path, "--mass", "1"}).exit_code == 6,
              "unconverged fit should exit 6");
    {
        std::ofstream f(path);
        f << "k,entropy_bits\n1,0\n2,0\n3,0\n";
    }
    c.require(run_cli({"fit", "--input", path, "--mass", "1"}).exit_code == 5,
              "all-zero entropy fit should exit 5");
    {
        std::ofstream f(path);
        f << "k,entropy_bits\n1,0.5\n2,0.3\n";
    }
    c.require(run_cli({"fit", "--input", path, "--mass", "1"}).exit_code == 2,
              "2-row fit should exit 2 (insufficient data)");
    std::remove(path.c_str());

    c.require(run_cli({"entropy", "--gamma", "0.5"}).exit_code == 0, "entropy should exit 0");
    c.require(run_cli({"entropy", "--gamma", "1.5"}).exit_code == 2,
              "entropy out-of-range gamma should exit 2");
    return c;
}

struct Criterion {
    int number;
    std::string title;
    double budget_seconds;
    std::function<Check()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "closed-form/series entropy agreement", 1.0, criterion_entropy_agreement},
        {2, "oracle equivalence on the 27-point grid", 60.0, criterion_oracle_grid},
        {3, "massless decoupling", 5.0, criterion_massless},
        {4, "monotonicity and sudden-limit bound", 1.0, criterion_monotonicity},
        {5, "epsilon reconstruction within 2%", 1.0, criterion_epsilon_reconstruction},
        {6, "sigma estimator derivative and factor-1.5 accuracy", 1.0,
         criterion_sigma_estimator},
        {7, "full (epsilon, sigma) reconstruction within 1e-6", 5.0, criterion_fit},
        {8, "gamma/entropy round trip within 1e-11", 1.0, criterion_round_trip},
        {9, "CLI determinism, golden file and exit codes", 5.0, criterion_cli},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Check check;
        try {
            check = criterion.run();
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed >= criterion.budget_seconds) {
            check.ok = false;
            check.detail = "runtime budget exceeded";
        }
        std::printf("criterion %d: %s (%.2f s / %.0f s) - %s%s%s\n", criterion.number,
                    check.ok ? "PASS" : "FAIL", elapsed, criterion.budget_seconds,
                    criterion.title.c_str(), check.ok ? "" : ": ",
                    check.ok ? "" : check.detail.c_str());
        if (!check.ok) ++failures;
    }
    std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
