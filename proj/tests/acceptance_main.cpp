// Acceptance gate for the amplifier simulator: each primary requirement is
// exercised at its stated tolerance and reported as one pass/fail line.
// Exit status is the number of failed criteria.
#include <stochamp/amplifier.hpp>
#include <stochamp/commands.hpp>
#include <stochamp/optimizer.hpp>
#include <stochamp/validate.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

using namespace stochamp;

namespace {

int failures = 0;

std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

void run(int criterion, const char* what,
         const std::function<std::pair<bool, std::string>()>& body) {
    bool ok = false;
    std::string detail;
    try {
        std::tie(ok, detail) = body();
    } catch (const std::exception& e) {
        detail = strf("exception: %s", e.what());
    }
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ValidationCheck* find_check(const ValidationReport& report, const std::string& name) {
    for (const auto& c : report.checks)
        if (c.name == name) return &c;
    return nullptr;
}

// ---- criterion 1: published branch table at alpha = 0.5, r = 0.4 ----------

std::pair<bool, std::string> branch_table_criterion() {
    struct Target {
        double p, amp, deficit;
    };
    const std::map<std::array<int, 3>, Target> published = {
        {{0, 0, 0}, {9.03e-1, 0.385, 0.0}},  {{0, 0, 1}, {2.55e-2, 0.385, 0.0}},
        {{0, 1, 0}, {3.03e-2, 0.385, 0.0}},  {{0, 1, 1}, {8.57e-4, 0.385, 0.0}},
        {{1, 0, 0}, {5.58e-3, 0.720, 3.62e-1}}, {{1, 0, 1}, {1.36e-3, 0.686, 4.84e-3}},
        {{1, 1, 0}, {2.88e-2, 0.310, 1.60e-5}}, {{1, 1, 1}, {5.27e-4, 0.292, 3.79e-5}},
    };
    const double other_published = 3.84e-3;

    const auto t0 = std::chrono::steady_clock::now();
    const BranchSet set = enumerate_single_photon_branches(make_amplifier_config({0.5, 0.0}, 0.4, 0.4, 0.4));
    const double elapsed = seconds_since(t0);

    double dev_p = 0.0, dev_amp = 0.0, dev_deficit = 0.0, dev_zero = 0.0;
    for (const auto& b : set.branches) {
        const Target& t = published.at({b.qnd, b.pd1, b.pd2});
        dev_p = std::max(dev_p, std::abs(b.probability - t.p) / t.p);
        dev_amp = std::max(dev_amp, std::abs(b.amplitude - t.amp));
        if (t.deficit == 0.0)
            dev_zero = std::max(dev_zero, std::abs(b.fidelity_deficit));
        else
            dev_deficit = std::max(dev_deficit, std::abs(b.fidelity_deficit - t.deficit) / t.deficit);
    }
    dev_p = std::max(dev_p, std::abs(set.other_probability - other_published) / other_published);

    const bool ok = set.branches.size() == 8 && dev_p <= 5e-3 && dev_amp <= 1e-3 &&
                    dev_deficit <= 2e-2 && dev_zero <= 1e-10 && elapsed < 5.0;
    return {ok, strf("P dev %.2f%% <= 0.5%%, |<a>| dev %.1e <= 1e-3, 1-F dev %.2f%% <= 2%%, "
                     "zero-row 1-F %.1e <= 1e-10, %.2fs < 5s",
                     100.0 * dev_p, dev_amp, 100.0 * dev_deficit, dev_zero, elapsed)};
}

// ---- criterion 2: closed forms, including the flagged exponent variant ----

std::pair<bool, std::string> closed_form_criterion(const ValidationReport& report) {
    const ValidationCheck* p = find_check(report, "p_succ_closed_form_identity");
    const ValidationCheck* g = find_check(report, "g_eff_closed_form_identity");
    const ValidationCheck* f = find_check(report, "f_eff_closed_form_identity");
    const ValidationCheck* v = find_check(report, "f_eff_squared_gain_variant");
    if (!p || !g || !f || !v) return {false, "validation checks missing"};

    const double variant = f_eff_squared_gain_variant(0.5, 0.4, 0.4, 0.4);
    const double exact = f_eff_closed_form(0.5, 0.4, 0.4, 0.4);
    const bool ok = p->pass && g->pass && f->pass && !v->required && !v->pass &&
                    v->deviation > 0.1 && std::abs(variant - 0.80) <= 0.01 &&
                    std::abs(variant - exact) > 0.1;
    return {ok, strf("identity devs %.1e/%.1e/%.1e <= 1e-10; variant %.4f vs overlap %.4f, "
                     "flagged not-required",
                     p->deviation, g->deviation, f->deviation, variant, exact)};
}

// ---- criterion 3: weak-signal gain limit ----------------------------------

std::pair<bool, std::string> gain_limit_criterion() {
    const AmplifierReport rep = run_success_branch(make_amplifier_config({1e-4, 0.0}, 1e-3, 1e-3, 1e-3));
    const double dev = std::abs(rep.g_eff - 2.0);
    return {dev < 1e-4, strf("g_eff = %.8f, |g_eff - 2| = %.1e < 1e-4", rep.g_eff, dev)};
}

// ---- criterion 4: constrained optimum and gain sweep -----------------------

std::pair<bool, std::string> optimizer_criterion() {
    const OptimizationProblem base{1.4, 3.0, 16, 0};
    const OptimizationResult res = maximize_success(base);
    const double spread = *std::max_element(res.r_opt.begin(), res.r_opt.end()) -
                          *std::min_element(res.r_opt.begin(), res.r_opt.end());
    bool ok = res.converged && std::abs(res.p_opt - 1.0e-3) <= 1.0e-4 &&
              std::abs(res.alpha_opt - 0.51) <= 0.02 && spread <= 1e-4;
    for (const double r : res.r_opt) ok = ok && std::abs(r - 0.38) <= 0.02;

    std::vector<double> gs;
    for (int i = 0; i < 19; ++i) gs.push_back(1.05 + 0.05 * i);
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<OptimizationResult> rows = sweep(base, gs);
    const double elapsed = seconds_since(t0);

    bool monotone = true, all_converged = true;
    size_t i_rmax = 0, i_fmin = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        all_converged = all_converged && rows[i].converged;
        if (i > 0) monotone = monotone && rows[i].p_opt < rows[i - 1].p_opt;
        if (rows[i].r_opt[0] > rows[i_rmax].r_opt[0]) i_rmax = i;
        if (rows[i].f_opt < rows[i_fmin].f_opt) i_fmin = i;
    }
    const double r_max = rows[i_rmax].r_opt[0], g_rmax = gs[i_rmax];
    const double f_min = rows[i_fmin].f_opt, g_fmin = gs[i_fmin];
    ok = ok && all_converged && monotone && elapsed < 60.0 &&
         std::abs(r_max - 0.42) <= 0.01 && std::abs(g_rmax - 1.18) <= 0.03 &&
         std::abs(f_min - 0.982) <= 0.002 && std::abs(g_fmin - 1.08) <= 0.03;
    return {ok, strf("opt(1.4): p %.4e, alpha %.4f, r %.4f, spread %.1e; sweep %.1fs < 60s, "
                     "p monotone %s, max r %.4f@%.2f, min F %.5f@%.2f",
                     res.p_opt, res.alpha_opt, res.r_opt[0], spread, elapsed,
                     monotone ? "yes" : "NO", r_max, g_rmax, f_min, g_fmin)};
}

// ---- criterion 5: phase-space pipeline vs truncated-Fock oracle ------------

std::pair<bool, std::string> engine_agreement_criterion(const ValidationReport& report) {
    const char* names[] = {"branch_probability_engine_agreement",
                           "branch_amplitude_engine_agreement",
                           "branch_deficit_engine_agreement"};
    double worst = 0.0;
    bool ok = true;
    for (const char* name : names) {
        const ValidationCheck* c = find_check(report, name);
        if (!c) return {false, strf("missing check %s", name)};
        ok = ok && c->pass;
        worst = std::max(worst, c->deviation);
    }
    return {ok, strf("max engine deviation %.1e < 1e-8 over 8 branches x 6 configs", worst)};
}

// ---- criterion 6: randomized physical-invariant suite ----------------------

double riemann_mass(const GaussPolyState& s) {
    constexpr int cells = 240;
    constexpr double h = 16.0 / cells;
    Eigen::VectorXd v(2);
    double acc = 0.0;
    for (int i = 0; i < cells; ++i) {
        v[0] = -8.0 + (i + 0.5) * h;
        for (int j = 0; j < cells; ++j) {
            v[1] = -8.0 + (j + 0.5) * h;
            acc += evaluate(s, v);
        }
    }
    return acc * h * h;
}

std::pair<bool, std::string> property_criterion() {
    std::mt19937_64 rng(424242);
    double dev_norm = 0.0, dev_complete = 0.0, dev_conserve = 0.0;
    double dev_purity = 0.0, dev_sym = 0.0, dev_quad = 0.0;

    for (int i = 0; i < 100; ++i) {
        const auto draw = [&rng]() -> std::pair<GaussPolyState, double> {
            if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
                std::uniform_real_distribution<double> c(-0.35, 0.35);
                const std::complex<double> alpha(c(rng), c(rng));
                return {coherent_state(alpha), std::norm(alpha)};
            }
            const int n = std::uniform_int_distribution<int>(0, 2)(rng);
            return {fock_state(n), static_cast<double>(n)};
        };
        const auto [in1, n1] = draw();
        const auto [in2, n2] = draw();
        const double r = std::uniform_real_distribution<double>(0.05, 0.9)(rng);

        const GaussPolyState s = beam_split(in1, in2, BeamSplitter(r));
        dev_norm = std::max(dev_norm, std::abs(integrate_all(s) - 1.0));

        const GaussPolyState m0 = integrate_modes(s, {0});
        const GaussPolyState m1 = integrate_modes(s, {1});
        dev_conserve = std::max(
            dev_conserve, std::abs(mean_photon_number(m0) + mean_photon_number(m1) - n1 - n2));

        const std::vector<double> p = counting_distribution(s, 20);
        double total = 0.0;
        for (const double v : p) total += v;
        dev_complete = std::max(dev_complete, std::abs(total - 1.0));

        std::optional<GaussPolyState> out0, out1;
        for (int n = 0; n <= 1; ++n) {
            if (p[static_cast<size_t>(n)] < 1e-4) continue;
            const CollapseResult c = collapse_on_detection(s, n);
            dev_purity = std::max(dev_purity, std::abs(purity(c.out) - 1.0));
            (n == 0 ? out0 : out1) = c.out;
        }
        if (out0 && out1)
            dev_sym = std::max(dev_sym,
                               std::abs(fidelity(*out0, *out1) - fidelity(*out1, *out0)));

        dev_quad = std::max(dev_quad, std::abs(riemann_mass(m0) - integrate_all(m0)));
    }

    const bool ok = dev_norm <= 1e-10 && dev_complete <= 1e-10 && dev_conserve <= 1e-10 &&
                    dev_purity <= 1e-10 && dev_sym <= 1e-12 && dev_quad <= 1e-6;
    return {ok, strf("100 cases: norm %.1e, completeness %.1e, conservation %.1e, "
                     "purity %.1e, symmetry %.1e, quadrature %.1e",
                     dev_norm, dev_complete, dev_conserve, dev_purity, dev_sym, dev_quad)};
}

// ---- criterion 7: gain and fidelity trends ---------------------------------

std::pair<bool, std::string> trend_criterion() {
    const CurvesConfig cfg{parse_real_list("0.05:1.5:0.05"), {0.1, 0.25, 0.4}};
    const CommandResult result = cmd_curves(cfg);
    const auto& rows = result.table.rows;
    constexpr size_t n_alpha = 30, n_r = 3;
    if (rows.size() != n_alpha * n_r) return {false, strf("expected 90 rows, got %zu", rows.size())};
    const auto cell = [&rows](size_t ir, size_t ia, size_t col) {
        return rows[ir * n_alpha + ia][col].number;
    };

    bool g_down_alpha = true, g_down_r = true, f_ideal_down = true, f_eff_up = true;
    for (size_t ir = 0; ir < n_r; ++ir)
        for (size_t ia = 1; ia < n_alpha; ++ia)
            g_down_alpha = g_down_alpha && cell(ir, ia, 2) < cell(ir, ia - 1, 2);
    for (size_t ir = 1; ir < n_r; ++ir)
        for (size_t ia = 0; ia < n_alpha; ++ia)
            g_down_r = g_down_r && cell(ir, ia, 2) < cell(ir - 1, ia, 2);
    const size_t ia1 = 19;  // |alpha| = 1.0
    for (size_t ir = 1; ir < n_r; ++ir) {
        f_ideal_down = f_ideal_down && cell(ir, ia1, 4) < cell(ir - 1, ia1, 4);
        f_eff_up = f_eff_up && cell(ir, ia1, 3) > cell(ir - 1, ia1, 3);
    }
    const bool ok = g_down_alpha && g_down_r && f_ideal_down && f_eff_up;
    return {ok, strf("g_eff falls with alpha: %s, with r: %s; at |alpha|=1 f_ideal falls: %s, "
                     "f_eff rises: %s",
                     g_down_alpha ? "yes" : "NO", g_down_r ? "yes" : "NO",
                     f_ideal_down ? "yes" : "NO", f_eff_up ? "yes" : "NO")};
}

}  // namespace

int main() {
    std::printf("amplifier acceptance suite\n");

    run(1, "branch table at alpha=0.5, r=0.4 matches published values", branch_table_criterion);

    std::optional<ValidationReport> report;
    std::string report_error;
    try {
        report = run_validation(20);
    } catch (const std::exception& e) {
        report_error = strf("validation run failed: %s", e.what());
    }

    run(2, "closed-form identities hold; squared-gain exponent variant is flagged",
        [&]() -> std::pair<bool, std::string> {
            if (!report) return {false, report_error};
            return closed_form_criterion(*report);
        });
    run(3, "effective gain reaches 2 in the weak-signal low-reflectivity limit",
        gain_limit_criterion);
    run(4, "constrained optimum at g_min=1.4 and 19-point gain sweep", optimizer_criterion);
    run(5, "phase-space pipeline agrees with truncated-Fock oracle",
        [&]() -> std::pair<bool, std::string> {
            if (!report) return {false, report_error};
            return engine_agreement_criterion(*report);
        });
    run(6, "randomized invariants: normalization, counting, conservation, purity",
        property_criterion);
    run(7, "gain and fidelity trends across signal amplitude and reflectivity",
        trend_criterion);

    std::printf("%d of 7 criteria passed\n", 7 - failures);
    return failures;
}
