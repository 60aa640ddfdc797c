// stochamp: data-emitting CLI around the amplifier library.  Every
// subcommand writes one CSV or JSON table; exit codes: 0 success, 1 invalid
// arguments, 2 validation failure, 3 I/O error.

#include <stochamp/commands.hpp>
#include <stochamp/version.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>

namespace {

struct OutputOptions {
    std::string format = "csv";
    std::string output;  // stdout when empty
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", opts.output, "output file path (stdout when omitted)");
}

int write_result(const stochamp::CommandResult& result, const OutputOptions& opts) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!opts.output.empty()) {
        file.open(opts.output);
        if (!file) {
            std::cerr << "error: cannot open output file '" << opts.output << "'\n";
            return 3;
        }
        os = &file;
    }
    if (opts.format == "json")
        stochamp::write_json(result.table, result.meta, *os);
    else
        stochamp::write_csv(result.table, *os);
    os->flush();
    if (!os->good()) {
        std::cerr << "error: failed writing output\n";
        return 3;
    }
    return 0;
}

// --r sets all three reflectivities; --r1/--r2/--r3 override individually.
void resolve_reflectivities(double r, double& r1, double& r2, double& r3) {
    if (std::isnan(r1)) r1 = r;
    if (std::isnan(r2)) r2 = r;
    if (std::isnan(r3)) r3 = r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact phase-space simulator of a heralded noiseless amplifier for weak coherent fields"};
    app.set_version_flag("--version", std::string(stochamp::kVersion));
    app.require_subcommand(1);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::string curves_alpha = "0.05:1.5:0.05";
    std::string curves_r = "0.1,0.25,0.4";
    OutputOptions curves_out;
    CLI::App* curves = app.add_subcommand("curves", "effective gain and fidelities vs input amplitude");
    curves->add_option("--alpha", curves_alpha, "amplitudes: value, comma list, or lo:hi:step")
        ->capture_default_str();
    curves->add_option("--r", curves_r, "symmetric reflectivities, comma list")->capture_default_str();
    add_output_options(curves, curves_out);

    std::string grid_alpha = "0.5";
    double grid_r = 0.4, grid_r1 = nan, grid_r2 = nan, grid_r3 = nan;
    int grid_n = 201;
    OutputOptions grid_out;
    CLI::App* wigner = app.add_subcommand("wigner-grid", "success-branch Wigner function on a phase-space grid");
    wigner->add_option("--alpha", grid_alpha, "amplitudes: value, comma list, or lo:hi:step")
        ->capture_default_str();
    wigner->add_option("--r", grid_r, "reflectivity for all three splitters")->capture_default_str();
    wigner->add_option("--r1", grid_r1, "first splitter reflectivity");
    wigner->add_option("--r2", grid_r2, "second splitter reflectivity");
    wigner->add_option("--r3", grid_r3, "third splitter reflectivity");
    wigner->add_option("--grid", grid_n, "samples per axis over [-6, 6]")
        ->check(CLI::Range(2, 4001))
        ->capture_default_str();
    add_output_options(wigner, grid_out);

    double br_alpha = 0.5, br_r = 0.4, br_r1 = nan, br_r2 = nan, br_r3 = nan;
    OutputOptions br_out;
    CLI::App* branches = app.add_subcommand("branches", "single-photon branch table with the aggregate other row");
    branches->add_option("--alpha", br_alpha, "input amplitude (real, non-negative)")->capture_default_str();
    branches->add_option("--r", br_r, "reflectivity for all three splitters")->capture_default_str();
    branches->add_option("--r1", br_r1, "first splitter reflectivity");
    branches->add_option("--r2", br_r2, "second splitter reflectivity");
    branches->add_option("--r3", br_r3, "third splitter reflectivity");
    add_output_options(branches, br_out);

    stochamp::OptimizeConfig opt_cfg;
    OutputOptions opt_out;
    CLI::App* optimize = app.add_subcommand("optimize", "gain-constrained success-probability maximization");
    optimize->add_option("--g-min", opt_cfg.g_min, "required minimum effective gain, in (1, 2)")->required();
    optimize->add_option("--seed", opt_cfg.seed, "multistart seed")->capture_default_str();
    add_output_options(optimize, opt_out);

    stochamp::SweepConfig sweep_cfg;
    OutputOptions sweep_out;
    CLI::App* sweep = app.add_subcommand("sweep", "optimization across a range of gain thresholds");
    sweep->add_option("--g-min", sweep_cfg.g_lo, "first gain threshold")->capture_default_str();
    sweep->add_option("--g-max", sweep_cfg.g_hi, "last gain threshold")->capture_default_str();
    sweep->add_option("--step", sweep_cfg.step, "threshold increment")->capture_default_str();
    sweep->add_option("--seed", sweep_cfg.seed, "multistart seed")->capture_default_str();
    add_output_options(sweep, sweep_out);

    stochamp::ValidateConfig val_cfg;
    OutputOptions val_out;
    CLI::App* validate = app.add_subcommand("validate", "cross-engine and closed-form validation report");
    validate->add_option("--cutoff", val_cfg.cutoff, "Fock-space cutoff for the oracle")
        ->check(CLI::Range(20, 64))
        ->capture_default_str();
    add_output_options(validate, val_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(curves)) {
            const stochamp::CurvesConfig cfg{stochamp::parse_real_list(curves_alpha),
                                             stochamp::parse_real_list(curves_r)};
            return write_result(stochamp::cmd_curves(cfg), curves_out);
        }
        if (app.got_subcommand(wigner)) {
            resolve_reflectivities(grid_r, grid_r1, grid_r2, grid_r3);
            stochamp::WignerGridConfig cfg;
            cfg.alphas = stochamp::parse_real_list(grid_alpha);
            cfg.r1 = grid_r1;
            cfg.r2 = grid_r2;
            cfg.r3 = grid_r3;
            cfg.grid = grid_n;
            return write_result(stochamp::cmd_wigner_grid(cfg), grid_out);
        }
        if (app.got_subcommand(branches)) {
            resolve_reflectivities(br_r, br_r1, br_r2, br_r3);
            return write_result(stochamp::cmd_branches({br_alpha, br_r1, br_r2, br_r3}), br_out);
        }
        if (app.got_subcommand(optimize))
            return write_result(stochamp::cmd_optimize(opt_cfg), opt_out);
        if (app.got_subcommand(sweep))
            return write_result(stochamp::cmd_sweep(sweep_cfg), sweep_out);
        if (app.got_subcommand(validate)) {
            const stochamp::ValidateOutcome outcome = stochamp::cmd_validate(val_cfg);
            const int io = write_result(outcome.result, val_out);
            if (io != 0) return io;
            if (!outcome.required_pass) {
                std::cerr << "validation FAILED: at least one required check exceeded tolerance\n";
                return 2;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
