// entcosmo_main.cpp - batch CLI over the entanglement-cosmology library.
//
// Commands: spectrum, oracle, invert, fit, entropy.  All tables are emitted
// as CSV (default) or JSON with every numeric cell formatted to 17
// significant digits, so output is byte-identical across runs and round-trips
// exactly through double precision.
//
// Exit codes: 0 ok, 2 usage/parse/domain error, 3 oracle discrepancy above
// threshold, 4 estimator regime violation, 5 unidentifiable data,
// 6 fit did not converge.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entcosmo/bogoliubov.hpp"
#include "entcosmo/entanglement.hpp"
#include "entcosmo/inversion.hpp"
#include "entcosmo/mode_oracle.hpp"
#include "entcosmo/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitOracleThreshold = 3;
constexpr int kExitRegime = 4;
constexpr int kExitUnidentifiable = 5;
constexpr int kExitNoConvergence = 6;

struct Cell {
    std::string text;
    bool quoted;  // JSON: strings are quoted, numbers are not
};

Cell num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return Cell{buf, false};
}

Cell integer(long long v) {
    return Cell{std::to_string(v), false};
}

Cell text(const std::string& s) {
    return Cell{s, true};
}

struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<Cell>> rows;
};

void emit_csv(const Table& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.headers.size(); ++i)
        out << t.headers[i] << (i + 1 < t.headers.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i].text << (i + 1 < row.size() ? "," : "\n");
}

void emit_json(const Table& t, std::ostream& out) {
    out << "[\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << "  {";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i) {
            out << '"' << t.headers[i] << "\": ";
            if (t.rows[r][i].quoted)
                out << '"' << t.rows[r][i].text << '"';
            else
                out << t.rows[r][i].text;
            if (i + 1 < t.rows[r].size()) out << ", ";
        }
        out << (r + 1 < t.rows.size() ? "},\n" : "}\n");
    }
    out << "]\n";
}

int emit(const Table& t, const std::string& format, const std::string& output_path) {
    std::ostringstream body;
    if (format == "json")
        emit_json(t, body);
    else
        emit_csv(t, body);
    if (output_path.empty()) {
        std::cout << body.str();
        return kExitOk;
    }
    std::ofstream f(output_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file '" << output_path << "'\n";
        return kExitUsage;
    }
    f << body.str();
    return kExitOk;
}

struct GridSpec {
    std::optional<double> k_single;
    double k_min = 0.0;
    double k_max = 3.0;
    int k_count = 7;
    std::string k_scale = "linear";
};

void add_grid_flags(CLI::App* cmd, GridSpec& grid) {
    auto* single = cmd->add_option("--k", grid.k_single, "Single mode momentum");
    cmd->add_option("--k-min", grid.k_min, "Grid lower bound")->excludes(single);
    cmd->add_option("--k-max", grid.k_max, "Grid upper bound")->excludes(single);
    cmd->add_option("--k-count", grid.k_count, "Number of grid points")->excludes(single);
    cmd->add_option("--k-scale", grid.k_scale, "Grid spacing: linear or log")
        ->check(CLI::IsMember({"linear", "log"}))
        ->excludes(single);
}

std::vector<double> build_grid(const GridSpec& grid) {
    if (grid.k_single) return {*grid.k_single};
    if (grid.k_count < 1) throw entcosmo::InvalidArgument("k-count must be >= 1");
    if (grid.k_count == 1) return {grid.k_min};
    if (grid.k_max < grid.k_min) throw entcosmo::InvalidArgument("k-max must be >= k-min");
    std::vector<double> ks(grid.k_count);
    if (grid.k_scale == "log") {
        if (grid.k_min <= 0.0)
            throw entcosmo::InvalidArgument("log grid requires k-min > 0");
        const double ratio = std::log(grid.k_max / grid.k_min);
        for (int i = 0; i < grid.k_count; ++i)
            ks[i] = grid.k_min * std::exp(ratio * i / (grid.k_count - 1));
    } else {
        for (int i = 0; i < grid.k_count; ++i)
            ks[i] = grid.k_min + (grid.k_max - grid.k_min) * i / (grid.k_count - 1);
    }
    return ks;
}

// CSV input with a fixed two-column header; '#' starts a comment line.
std::vector<std::pair<double, double>> read_two_column_csv(const std::string& path,
                                                           const std::string& expected_header) {
    std::ifstream f(path);
    if (!f) throw entcosmo::InvalidArgument("cannot open input file '" + path + "'");

    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };

    std::vector<std::pair<double, double>> rows;
    std::string line;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (!header_seen) {
            if (s != expected_header)
                throw entcosmo::InvalidArgument("input file '" + path + "' line " +
                                                std::to_string(line_no) + ": expected header '" +
                                                expected_header + "'");
            header_seen = true;
            continue;
        }
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw entcosmo::InvalidArgument("input file '" + path + "' line " +
                                            std::to_string(line_no) + ": expected two columns");
        std::size_t used1 = 0;
        std::size_t used2 = 0;
        const std::string c1 = trim(s.substr(0, comma));
        const std::string c2 = trim(s.substr(comma + 1));
        double v1 = 0.0;
        double v2 = 0.0;
        try {
            v1 = std::stod(c1, &used1);
            v2 = std::stod(c2, &used2);
        } catch (const std::exception&) {
            throw entcosmo::InvalidArgument("input file '" + path + "' line " +
                                            std::to_string(line_no) + ": malformed number");
        }
        if (used1 != c1.size() || used2 != c2.size())
            throw entcosmo::InvalidArgument("input file '" + path + "' line " +
                                            std::to_string(line_no) + ": malformed number");
        rows.emplace_back(v1, v2);
    }
    if (!header_seen)
        throw entcosmo::InvalidArgument("input file '" + path + "': missing header '" +
                                        expected_header + "'");
    return rows;
}

int run_spectrum(double epsilon, double sigma, double mass, const GridSpec& grid,
                 const std::string& format, const std::string& output) {
    const entcosmo::CosmologyParams params(epsilon, sigma, mass);
    const std::vector<double> ks = build_grid(grid);
    const auto records = entcosmo::entanglement_spectrum(params, ks);

    Table t;
    t.headers = {"k", "omega_in", "omega_out", "gamma", "n_mean", "entropy_bits", "status"};
    for (const auto& rec : records) {
        double w_in = 0.0;
        double w_out = 0.0;
        if (rec.status == entcosmo::ModeStatus::ok) {
            const auto w = entcosmo::frequencies(params, entcosmo::ModeSpec(rec.k));
            w_in = w.omega_in;
            w_out = w.omega_out;
        }
        t.rows.push_back({num(rec.k), num(w_in), num(w_out), num(rec.gamma), num(rec.mean_n),
                          num(rec.entropy_bits),
                          text(rec.status == entcosmo::ModeStatus::ok ? "ok" : "degenerate")});
    }
    return emit(t, format, output);
}

int run_oracle(double epsilon, double sigma, double mass, const GridSpec& grid, double rel_tol,
               double max_rel_err, const std::string& format, const std::string& output) {
    const entcosmo::CosmologyParams params(epsilon, sigma, mass);
    entcosmo::IntegrationConfig config;
    config.rel_tol = rel_tol;

    Table t;
    t.headers = {"k",           "gamma_closed",    "gamma_oracle", "rel_err",
                 "norm_defect", "wronskian_drift", "steps"};
    bool over_threshold = false;
    for (double k : build_grid(grid)) {
        const auto rep =
            entcosmo::check_against_closed_form(params, entcosmo::ModeSpec(k), config);
        over_threshold = over_threshold || rep.gamma_rel_err > max_rel_err;
        t.rows.push_back({num(k), num(rep.gamma_closed), num(rep.gamma_oracle),
                          num(rep.gamma_rel_err), num(rep.normalization_defect),
                          num(rep.trace.wronskian_drift), integer(rep.trace.steps_taken)});
    }
    const int emit_rc = emit(t, format, output);
    if (emit_rc != kExitOk) return emit_rc;
    if (over_threshold) {
        std::cerr << "error: oracle/closed-form discrepancy above --max-rel-err\n";
        return kExitOracleThreshold;
    }
    return kExitOk;
}

int run_invert(const std::vector<double>& entropies, const std::vector<double>& energies,
               std::optional<double> mass, const std::string& input, const std::string& format,
               const std::string& output) {
    std::vector<entcosmo::EntanglementSample> samples;
    if (!input.empty()) {
        for (const auto& [energy, s] : read_two_column_csv(input, "energy,entropy_bits"))
            samples.push_back({energy, s});
    } else {
        if (entropies.empty())
            throw entcosmo::InvalidArgument("invert: provide --entropy or --input");
        if (!energies.empty() && energies.size() != entropies.size())
            throw entcosmo::InvalidArgument("invert: --energy count must match --entropy count");
        for (std::size_t i = 0; i < entropies.size(); ++i)
            samples.push_back({energies.empty() ? 0.0 : energies[i], entropies[i]});
    }
    if (samples.empty()) throw entcosmo::InvalidArgument("invert: no samples given");
    if (samples.size() > 2)
        throw entcosmo::InvalidArgument("invert: at most two samples supported");

    const bool with_energy = !energies.empty() || !input.empty();

    Table t;
    t.headers = {"quantity", "value"};
    auto push = [&](const std::string& name, double v) {
        t.rows.push_back({text(name), num(v)});
    };

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string suffix = samples.size() > 1 ? "_" + std::to_string(i + 1) : "";
        push("gamma" + suffix, entcosmo::gamma_from_entropy(samples[i].entropy_bits));
        if (with_energy && mass) {
            const auto est = entcosmo::estimate_epsilon(samples[i], *mass);
            push("epsilon_hat" + suffix, est.epsilon_hat);
            push("regime_ratio" + suffix, est.regime_ratio);
        }
    }
    if (samples.size() == 2 && with_energy && mass) {
        const auto est = entcosmo::estimate_sigma(samples[0], samples[1], *mass);
        push("sigma_hat", est.sigma_hat);
        push("d_ln_gamma_dE", est.d_ln_gamma_dE);
        push("midpoint_energy", est.midpoint_energy);
    }
    return emit(t, format, output);
}

int run_fit(const std::string& input, double mass, std::optional<double> init_epsilon,
            std::optional<double> init_sigma, const std::string& format,
            const std::string& output) {
    std::vector<entcosmo::FitSample> samples;
    for (const auto& [k, s] : read_two_column_csv(input, "k,entropy_bits"))
        samples.push_back({k, s});

    entcosmo::FitOptions options;
    if (init_epsilon || init_sigma) {
        if (!(init_epsilon && init_sigma))
            throw entcosmo::InvalidArgument("fit: give both --init-epsilon and --init-sigma");
        options.init = std::make_pair(*init_epsilon, *init_sigma);
    }
    const entcosmo::FitResult fit = entcosmo::fit_parameters(samples, mass, options);

    Table t;
    t.headers = {"quantity", "value"};
    t.rows.push_back({text("epsilon_hat"), num(fit.epsilon_hat)});
    t.rows.push_back({text("sigma_hat"), num(fit.sigma_hat)});
    t.rows.push_back({text("residual_norm"), num(fit.residual_norm)});
    t.rows.push_back({text("iterations"), integer(fit.iterations)});
    t.rows.push_back({text("converged"), text(fit.converged ? "true" : "false")});
    const int emit_rc = emit(t, format, output);
    if (emit_rc != kExitOk) return emit_rc;
    if (!fit.converged) {
        std::cerr << "error: fit did not converge\n";
        return kExitNoConvergence;
    }
    return kExitOk;
}

int run_entropy(std::optional<double> gamma_in, std::optional<double> entropy_in,
                const std::string& format, const std::string& output) {
    if (gamma_in.has_value() == entropy_in.has_value())
        throw entcosmo::InvalidArgument("entropy: give exactly one of --gamma or --entropy");
    Table t;
    t.headers = {"quantity", "value"};
    if (gamma_in) {
        t.rows.push_back({text("gamma"), num(*gamma_in)});
        t.rows.push_back({text("entropy_bits"), num(entcosmo::entropy_closed(*gamma_in))});
    } else {
        t.rows.push_back({text("entropy_bits"), num(*entropy_in)});
        t.rows.push_back({text("gamma"), num(entcosmo::gamma_from_entropy(*entropy_in))});
    }
    return emit(t, format, output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entcosmo - mode entanglement from a smooth cosmological expansion"};
    app.require_subcommand(1);

    app.set_config("--config", "",
                   "key=value file with a [<command>] section; flags take precedence");

    std::string format = "csv";
    std::string output;
    auto add_io_flags = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--output", output, "Write the table to a file instead of stdout");
    };

    double epsilon = 0.0;
    double sigma = 0.0;
    double mass = 0.0;
    GridSpec grid;

    CLI::App* spectrum = app.add_subcommand("spectrum", "Entanglement spectrum over a k grid");
    spectrum->add_option("--epsilon", epsilon, "Expansion volume")->required();
    spectrum->add_option("--sigma", sigma, "Expansion rapidity")->required();
    spectrum->add_option("--mass", mass, "Field mass")->required();
    add_grid_flags(spectrum, grid);
    add_io_flags(spectrum);

    double rel_tol = 1e-10;
    double max_rel_err = 1e-6;
    CLI::App* oracle = app.add_subcommand("oracle", "Cross-check closed forms by integration");
    oracle->add_option("--epsilon", epsilon, "Expansion volume")->required();
    oracle->add_option("--sigma", sigma, "Expansion rapidity")->required();
    oracle->add_option("--mass", mass, "Field mass")->required();
    add_grid_flags(oracle, grid);
    oracle->add_option("--rel-tol", rel_tol, "Integrator local error tolerance");
    oracle->add_option("--max-rel-err", max_rel_err, "Acceptance threshold on |dgamma|/gamma");
    add_io_flags(oracle);

    std::vector<double> entropies;
    std::vector<double> energies;
    std::optional<double> invert_mass;
    std::string input;
    CLI::App* invert = app.add_subcommand("invert", "Recover gamma / epsilon / sigma from data");
    auto* entropy_opt =
        invert->add_option("--entropy", entropies, "Entropy in bits (repeat for two samples)");
    auto* energy_opt =
        invert->add_option("--energy", energies, "Particle energy (pairs with --entropy)");
    invert->add_option("--mass", invert_mass, "Field mass");
    invert->add_option("--input", input, "CSV file with header energy,entropy_bits")
        ->excludes(entropy_opt)
        ->excludes(energy_opt);
    add_io_flags(invert);

    double fit_mass = 0.0;
    std::optional<double> init_epsilon;
    std::optional<double> init_sigma;
    CLI::App* fit = app.add_subcommand("fit", "Least-squares fit of (epsilon, sigma)");
    fit->add_option("--input", input, "CSV file with header k,entropy_bits")->required();
    fit->add_option("--mass", fit_mass, "Field mass")->required();
    fit->add_option("--init-epsilon", init_epsilon, "Initial epsilon");
    fit->add_option("--init-sigma", init_sigma, "Initial sigma");
    add_io_flags(fit);

    std::optional<double> gamma_in;
    std::optional<double> entropy_in;
    CLI::App* entropy = app.add_subcommand("entropy", "Direct gamma <-> entropy conversion");
    entropy->add_option("--gamma", gamma_in, "gamma in [0, 1 - 1e-12]");
    entropy->add_option("--entropy", entropy_in, "Entropy in bits");
    add_io_flags(entropy);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (spectrum->parsed())
            return run_spectrum(epsilon, sigma, mass, grid, format, output);
        if (oracle->parsed())
            return run_oracle(epsilon, sigma, mass, grid, rel_tol, max_rel_err, format, output);
        if (invert->parsed())
            return run_invert(entropies, energies, invert_mass, input, format, output);
        if (fit->parsed())
            return run_fit(input, fit_mass, init_epsilon, init_sigma, format, output);
        if (entropy->parsed())
            return run_entropy(gamma_in, entropy_in, format, output);
    } catch (const entcosmo::RegimeViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const entcosmo::DenominatorNonpositive& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRegime;
    } catch (const entcosmo::Unidentifiable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnidentifiable;
    } catch (const entcosmo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
