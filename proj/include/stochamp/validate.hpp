#pragma once

// Cross-engine validation: phase-space pipeline vs the truncated Fock
// oracle, closed forms vs the exact pipeline, and the fidelity-formula
// variant check.  Each check reports its worst deviation; a required check
// beyond tolerance is the caller's signal to fail loudly.

#include "fock.hpp"
#include "table.hpp"

namespace stochamp {

struct ValidationCheck {
    std::string name;
    double deviation;
    double tolerance;
    bool pass;
    bool required;  // false for checks that are expected to fail by design
    std::string note;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_required_pass() const {
        for (const auto& c : checks)
            if (c.required && !c.pass) return false;
        return true;
    }
};

namespace detail {

inline ValidationCheck make_check(std::string name, double deviation, double tolerance,
                                  bool required, std::string note) {
    return {std::move(name), deviation, tolerance, deviation <= tolerance, required, std::move(note)};
}

}  // namespace detail

inline ValidationReport run_validation(int cutoff = kDefaultFockCutoff) {
    // The agreement grid reaches alpha = 1.0, whose conditioned branch
    // outputs carry mean energies near 4; below N = 20 they violate either
    // the splitter's boundary-occupancy bound or the coherent reference's
    // norm-deficit bound.
    if (cutoff < 20)
        throw std::invalid_argument("run_validation: cutoff must be at least 20");
    ValidationReport report;

    // Engine agreement over every single-photon branch on the test grid.
    {
        double dev_p = 0.0, dev_amp = 0.0, dev_deficit = 0.0;
        for (const double alpha : {0.25, 0.5, 1.0}) {
            for (const double r : {0.1, 0.4}) {
                const AmplifierConfig cfg = make_amplifier_config(alpha, r, r, r);
                const BranchSet set = enumerate_single_photon_branches(cfg);
                for (const BranchOutcome& b : set.branches) {
                    const FockBranchResult f = run_branch_fock(cfg, b.qnd, b.pd1, b.pd2, cutoff);
                    const std::complex<double> a_f = amplitude_expectation(f.out);
                    const double energy = std::max(0.0, mean_photon_number(f.out));
                    const std::complex<double> ref = std::polar(std::sqrt(energy), std::arg(a_f));
                    const double deficit_f = 1.0 - fidelity(f.out, coherent_fock(ref, cutoff));
                    dev_p = std::max(dev_p, std::abs(b.probability - f.probability));
                    dev_amp = std::max(dev_amp, std::abs(b.amplitude - std::abs(a_f)));
                    dev_deficit = std::max(dev_deficit, std::abs(b.fidelity_deficit - deficit_f));
                }
            }
        }
        report.checks.push_back(detail::make_check(
            "branch_probability_engine_agreement", dev_p, 1e-8, true,
            "max |P| gap between phase-space pipeline and Fock oracle, 8 branches x 6 configs"));
        report.checks.push_back(detail::make_check(
            "branch_amplitude_engine_agreement", dev_amp, 1e-8, true,
            "max |<a>| gap between engines"));
        report.checks.push_back(detail::make_check(
            "branch_deficit_engine_agreement", dev_deficit, 1e-8, true,
            "max fidelity-deficit gap between engines"));
    }

    // Closed forms vs the exact pipeline on a 7x5 grid including asymmetric
    // reflectivities.
    {
        const double alphas[] = {0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
        const double rsets[][3] = {{0.05, 0.05, 0.05},
                                   {0.2, 0.2, 0.2},
                                   {0.4, 0.4, 0.4},
                                   {0.1, 0.3, 0.5},
                                   {0.5, 0.2, 0.35}};
        double dev_p = 0.0, dev_g = 0.0, dev_f = 0.0;
        for (const double alpha : alphas) {
            for (const auto& rs : rsets) {
                const AmplifierConfig cfg = make_amplifier_config(alpha, rs[0], rs[1], rs[2]);
                const AmplifierReport rep = run_success_branch(cfg);
                dev_p = std::max(dev_p, std::abs(rep.p_succ - p_succ_closed_form(cfg)) / rep.p_succ);
                dev_g = std::max(dev_g, std::abs(rep.g_eff - g_eff_closed_form(cfg)));
                dev_f = std::max(dev_f, std::abs(rep.f_eff - f_eff_closed_form(cfg)));
            }
        }
        report.checks.push_back(detail::make_check(
            "p_succ_closed_form_identity", dev_p, 1e-10, true,
            "max relative gap, closed-form success probability vs pipeline, 35-point grid"));
        report.checks.push_back(detail::make_check(
            "g_eff_closed_form_identity", dev_g, 1e-10, true,
            "max gap, closed-form effective gain vs pipeline"));
        report.checks.push_back(detail::make_check(
            "f_eff_closed_form_identity", dev_f, 1e-10, true,
            "max gap, closed-form fidelity (linear-gain exponent) vs overlap integral"));
    }

    // The squared-gain exponent variant of the fidelity formula must NOT
    // match the overlap integral; this check documents the mismatch.
    {
        const AmplifierConfig cfg = make_amplifier_config(0.5, 0.4, 0.4, 0.4);
        const double overlap = run_success_branch(cfg).f_eff;
        const double variant = f_eff_squared_gain_variant(cfg);
        char note[160];
        std::snprintf(note, sizeof note,
                      "squared-gain exponent variant gives F=%.4f vs overlap F=%.4f at alpha=0.5, r=0.4; "
                      "expected to FAIL", variant, overlap);
        report.checks.push_back(detail::make_check(
            "f_eff_squared_gain_variant", std::abs(variant - overlap), 1e-10, false, note));
    }

    // Coherent fidelity: number-basis formula e^{-|a-b|^2} vs Wigner overlap.
    {
        const std::complex<double> pairs[][2] = {
            {{0.0, 0.0}, {1.0, 0.0}},
            {{0.5, 0.0}, {0.3, 0.4}},
            {{1.2, 0.0}, {0.0, -0.7}},
            {{0.25, 0.1}, {0.25, 0.1}},
        };
        double dev = 0.0;
        for (const auto& pr : pairs) {
            const double exact = std::exp(-std::norm(pr[0] - pr[1]));
            const double wigner = fidelity(coherent_state(pr[0]), coherent_state(pr[1]));
            dev = std::max(dev, std::abs(exact - wigner));
        }
        report.checks.push_back(detail::make_check(
            "coherent_fidelity_formula", dev, 1e-10, true,
            "Wigner overlap vs e^{-|a-b|^2} on coherent pairs"));
    }

    // Fock splitter composed with its inverse is the identity.
    {
        const TwoModeFockVector input = tensor(coherent_fock(0.7, cutoff), fock_basis_vector(1, cutoff));
        const BeamSplitter bs(0.37);
        const TwoModeFockVector round_trip = apply_beam_splitter_inverse(apply_beam_splitter(input, bs), bs);
        const double dev = (round_trip.amps - input.amps).cwiseAbs().maxCoeff();
        report.checks.push_back(detail::make_check(
            "splitter_inverse_round_trip", dev, 1e-12, true,
            "max coefficient change after forward+inverse splitter"));
    }

    // Low-reflectivity gain limit vs direct operator application a a^dag a
    // on the coherent vector.
    {
        const double alpha = 0.5;
        const FockVector amplified = apply_annihilation(
            apply_creation(apply_annihilation(coherent_fock(alpha, cutoff))));
        const double oracle_gain = std::abs(amplitude_expectation(amplified)) / alpha;
        const double dev = std::abs(oracle_gain - g_limit_low_reflectivity(alpha));
        report.checks.push_back(detail::make_check(
            "g_limit_operator_oracle", dev, 1e-10, true,
            "closed-form low-reflectivity gain vs truncated-Fock operator application"));
    }

    return report;
}

inline Table validation_table(const ValidationReport& report) {
    Table table({"check", "deviation", "tolerance", "pass", "required", "note"});
    for (const auto& c : report.checks)
        table.add_row({Cell::text(c.name), Cell::real(c.deviation), Cell::real(c.tolerance),
                       Cell::boolean(c.pass), Cell::boolean(c.required), Cell::text(c.note)});
    return table;
}

}  // namespace stochamp
