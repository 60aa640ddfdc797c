#pragma once

// One function per CLI subcommand, each returning a Table plus a meta block
// echoing the configuration.  Kept out of main() so tests can drive the
// commands directly.

#include "optimizer.hpp"
#include "validate.hpp"

#include <cctype>
#include <string>

namespace stochamp {

// Accepts "0.5", "0.1,0.25,0.4", or "0.05:1.5:0.05" (lo:hi:step, inclusive).
inline std::vector<double> parse_real_list(const std::string& text) {
    const auto parse_one = [](const std::string& s) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed number: '" + s + "'");
        }
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size())
            throw std::invalid_argument("malformed number: '" + s + "'");
        return v;
    };

    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        size_t start = 0;
        for (size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ':') {
                parts.push_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
        if (parts.size() != 3)
            throw std::invalid_argument("range must be lo:hi:step");
        const double lo = parse_one(parts[0]), hi = parse_one(parts[1]), step = parse_one(parts[2]);
        if (!(step > 0.0) || hi < lo)
            throw std::invalid_argument("range must satisfy hi >= lo and step > 0");
        const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (int k = 0; k < count; ++k) values.push_back(lo + k * step);
        return values;
    }
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            values.push_back(parse_one(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    return values;
}

struct CommandResult {
    Table table;
    nlohmann::ordered_json meta;
};

struct CurvesConfig {
    std::vector<double> alphas;
    std::vector<double> reflectivities;  // one symmetric-r curve per entry
};

// Gain and fidelity curves vs input amplitude, one row per (alpha, r); the
// exact pipeline is authoritative, closed forms appear only in `validate`.
inline CommandResult cmd_curves(const CurvesConfig& cfg) {
    if (cfg.alphas.empty() || cfg.reflectivities.empty())
        throw std::invalid_argument("curves: empty parameter list");
    for (const double a : cfg.alphas)
        if (!(a > 0.0 && a <= 3.0))
            throw std::invalid_argument("curves: alpha must lie in (0, 3]");
    for (const double r : cfg.reflectivities)
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("curves: r must lie in (0, 1)");

    Table table({"alpha", "r", "g_eff", "f_eff", "f_ideal", "g_limit"});
    for (const double r : cfg.reflectivities) {
        for (const double a : cfg.alphas) {
            const AmplifierReport rep = run_success_branch(make_amplifier_config(a, r, r, r));
            table.add_row({Cell::real(a), Cell::real(r), Cell::real(rep.g_eff), Cell::real(rep.f_eff),
                           Cell::real(rep.f_ideal), Cell::real(g_limit_low_reflectivity(a))});
        }
    }
    nlohmann::ordered_json meta{{"command", "curves"},
                                {"alpha", cfg.alphas},
                                {"r", cfg.reflectivities}};
    return {std::move(table), std::move(meta)};
}

struct WignerGridConfig {
    std::vector<double> alphas;
    double r1 = 0.4, r2 = 0.4, r3 = 0.4;
    int grid = 201;
    double extent = 6.0;  // samples cover [-extent, extent]^2
};

// Success-branch output Wigner function sampled on a square grid.
inline CommandResult cmd_wigner_grid(const WignerGridConfig& cfg) {
    if (cfg.alphas.empty())
        throw std::invalid_argument("wigner-grid: empty amplitude list");
    for (const double a : cfg.alphas)
        if (a == 0.0 || !(std::abs(a) < kMaxInputAmplitude))
            throw std::invalid_argument("wigner-grid: alpha must be nonzero with |alpha| < 3");
    for (const double r : {cfg.r1, cfg.r2, cfg.r3})
        if (!(r > 0.0 && r < 1.0))
            throw std::invalid_argument("wigner-grid: r must lie in (0, 1)");
    if (cfg.grid < 2)
        throw std::invalid_argument("wigner-grid: grid must be at least 2");
    if (!(cfg.extent > 0.0) || !std::isfinite(cfg.extent))
        throw std::invalid_argument("wigner-grid: extent must be positive and finite");

    Table table({"alpha", "x", "p", "w"});
    Eigen::VectorXd v(2);
    for (const double a : cfg.alphas) {
        const AmplifierReport rep = run_success_branch(make_amplifier_config(a, cfg.r1, cfg.r2, cfg.r3));
        for (int ix = 0; ix < cfg.grid; ++ix) {
            v[0] = -cfg.extent + 2.0 * cfg.extent * ix / (cfg.grid - 1);
            for (int ip = 0; ip < cfg.grid; ++ip) {
                v[1] = -cfg.extent + 2.0 * cfg.extent * ip / (cfg.grid - 1);
                table.add_row({Cell::real(a), Cell::real(v[0]), Cell::real(v[1]),
                               Cell::real(evaluate(rep.output, v))});
            }
        }
    }
    nlohmann::ordered_json meta{{"command", "wigner-grid"}, {"alpha", cfg.alphas},
                                {"r1", cfg.r1},            {"r2", cfg.r2},
                                {"r3", cfg.r3},            {"grid", cfg.grid},
                                {"extent", cfg.extent}};
    return {std::move(table), std::move(meta)};
}

struct BranchesConfig {
    double alpha = 0.5;
    double r1 = 0.4, r2 = 0.4, r3 = 0.4;
};

// All eight single-photon branches plus the aggregate "other" row
// (qnd = pd1 = pd2 = -1, diagnostics blank).
inline CommandResult cmd_branches(const BranchesConfig& cfg) {
    if (!(cfg.alpha >= 0.0))
        throw std::invalid_argument("branches: alpha must be non-negative");
    const BranchSet set = enumerate_single_photon_branches(
        make_amplifier_config(cfg.alpha, cfg.r1, cfg.r2, cfg.r3));

    Table table({"qnd", "pd1", "pd2", "p", "amplitude", "fidelity_deficit"});
    for (const BranchOutcome& b : set.branches)
        table.add_row({Cell::integer(b.qnd), Cell::integer(b.pd1), Cell::integer(b.pd2),
                       Cell::real(b.probability), Cell::real(b.amplitude),
                       Cell::real(b.fidelity_deficit)});
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    table.add_row({Cell::integer(-1), Cell::integer(-1), Cell::integer(-1),
                   Cell::real(set.other_probability), Cell::real(nan), Cell::real(nan)});

    nlohmann::ordered_json meta{{"command", "branches"},
                                {"alpha", cfg.alpha},
                                {"r1", cfg.r1},
                                {"r2", cfg.r2},
                                {"r3", cfg.r3}};
    return {std::move(table), std::move(meta)};
}

namespace detail {

inline std::vector<Cell> optimization_row(double g_min, const OptimizationResult& res) {
    return {Cell::real(g_min),        Cell::real(res.p_opt),    Cell::real(res.alpha_opt),
            Cell::real(res.r_opt[0]), Cell::real(res.r_opt[1]), Cell::real(res.r_opt[2]),
            Cell::real(res.f_opt),    Cell::boolean(res.converged)};
}

inline const std::vector<std::string>& optimization_columns() {
    static const std::vector<std::string> columns{"g_min",  "p_opt",  "alpha_opt", "r1_opt",
                                                  "r2_opt", "r3_opt", "f_opt",     "converged"};
    return columns;
}

}  // namespace detail

struct OptimizeConfig {
    double g_min = 1.4;
    double alpha_max = kMaxInputAmplitude;
    int multistart_count = 16;
    std::uint64_t seed = 0;
};

inline CommandResult cmd_optimize(const OptimizeConfig& cfg) {
    const OptimizationResult res =
        maximize_success({cfg.g_min, cfg.alpha_max, cfg.multistart_count, cfg.seed});
    Table table(detail::optimization_columns());
    table.add_row(detail::optimization_row(cfg.g_min, res));
    nlohmann::ordered_json meta{{"command", "optimize"},
                                {"g_min", cfg.g_min},
                                {"alpha_max", cfg.alpha_max},
                                {"multistart_count", cfg.multistart_count},
                                {"seed", cfg.seed}};
    return {std::move(table), std::move(meta)};
}

struct SweepConfig {
    double g_lo = 1.05;
    double g_hi = 1.95;
    double step = 0.05;
    double alpha_max = kMaxInputAmplitude;
    int multistart_count = 16;
    std::uint64_t seed = 0;
};

inline CommandResult cmd_sweep(const SweepConfig& cfg) {
    if (!(cfg.step > 0.0) || cfg.g_hi < cfg.g_lo)
        throw std::invalid_argument("sweep: need g_max >= g_min and step > 0");
    std::vector<double> g_values;
    const int count = static_cast<int>(std::floor((cfg.g_hi - cfg.g_lo) / cfg.step + 1e-9)) + 1;
    for (int k = 0; k < count; ++k) g_values.push_back(cfg.g_lo + k * cfg.step);

    const std::vector<OptimizationResult> results =
        sweep({g_values.front(), cfg.alpha_max, cfg.multistart_count, cfg.seed}, g_values);
    Table table(detail::optimization_columns());
    for (size_t i = 0; i < results.size(); ++i)
        table.add_row(detail::optimization_row(g_values[i], results[i]));
    nlohmann::ordered_json meta{{"command", "sweep"},
                                {"g_min", cfg.g_lo},
                                {"g_max", cfg.g_hi},
                                {"step", cfg.step},
                                {"alpha_max", cfg.alpha_max},
                                {"multistart_count", cfg.multistart_count},
                                {"seed", cfg.seed}};
    return {std::move(table), std::move(meta)};
}

struct ValidateConfig {
    int cutoff = kDefaultFockCutoff;
};

struct ValidateOutcome {
    CommandResult result;
    bool required_pass;
};

inline ValidateOutcome cmd_validate(const ValidateConfig& cfg) {
    const ValidationReport report = run_validation(cfg.cutoff);
    nlohmann::ordered_json meta{{"command", "validate"}, {"cutoff", cfg.cutoff}};
    return {{validation_table(report), std::move(meta)}, report.all_required_pass()};
}

}  // namespace stochamp
