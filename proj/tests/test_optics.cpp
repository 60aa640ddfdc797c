#include <catch2/catch_amalgamated.hpp>

#include <stochamp/optics.hpp>

#include "test_util.hpp"

#include <cmath>
#include <complex>

using namespace stochamp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::VectorXd vec2(double x, double p) {
    Eigen::VectorXd v(2);
    v << x, p;
    return v;
}

}  // namespace

TEST_CASE("coherent state basics") {
    const GaussPolyState vac = coherent_state(0.0);
    REQUIRE_THAT(evaluate(vac, vec2(0.0, 0.0)), WithinRel(1.0 / M_PI, 1e-14));
    REQUIRE_THAT(integrate_all(vac), WithinAbs(1.0, 1e-12));

    const std::complex<double> alpha(0.3, 0.4);
    const GaussPolyState c = coherent_state(alpha);
    REQUIRE_THAT(c.mean()[0], WithinAbs(std::sqrt(2.0) * 0.3, 1e-14));
    REQUIRE_THAT(c.mean()[1], WithinAbs(std::sqrt(2.0) * 0.4, 1e-14));
    const std::complex<double> amp = amplitude_expectation(c);
    REQUIRE_THAT(amp.real(), WithinAbs(0.3, 1e-12));
    REQUIRE_THAT(amp.imag(), WithinAbs(0.4, 1e-12));
    REQUIRE_THAT(mean_photon_number(c), WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(mean_photon_number(coherent_state(0.5)), WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(purity(c), WithinAbs(1.0, 1e-12));
}

TEST_CASE("fock state basics") {
    REQUIRE(test_util::state_difference(fock_state(0), coherent_state(0.0)) < 1e-14);
    const GaussPolyState one = fock_state(1);
    REQUIRE_THAT(evaluate(one, vec2(0.0, 0.0)), WithinRel(-1.0 / M_PI, 1e-14));
    for (int n = 0; n <= kMaxFockOrder; ++n) {
        const GaussPolyState f = fock_state(n);
        REQUIRE_THAT(integrate_all(f), WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(mean_photon_number(f), WithinAbs(static_cast<double>(n), 1e-11));
        REQUIRE_THAT(purity(f), WithinAbs(1.0, 1e-11));
        const std::complex<double> amp = amplitude_expectation(f);
        REQUIRE_THAT(std::abs(amp), WithinAbs(0.0, 1e-12));
    }
    REQUIRE_THROWS_AS(fock_state(kMaxFockOrder + 1), std::invalid_argument);
    REQUIRE_THROWS_AS(fock_state(-1), std::invalid_argument);

    // Higher orders of the internal generator stay normalized (used by the
    // detection-probability sum far beyond the input cap).  The bare integral
    // is the worst-conditioned use of these polynomials -- coefficients reach
    // ~2e4 at order 20 and cancel to 1 -- so the tolerance reflects the
    // monomial-basis rounding floor, not the analytic identity.
    for (int n : {8, 15, 20}) {
        const GaussPolyState f(1, detail::fock_wigner_poly(2, 0, n), Eigen::VectorXd::Zero(2),
                               Eigen::MatrixXd::Identity(2, 2));
        REQUIRE_THAT(integrate_all(f), WithinAbs(1.0, 2e-7));
    }
}

TEST_CASE("beam splitter parameter validation") {
    REQUIRE_THROWS_AS(BeamSplitter(-0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(BeamSplitter(1.0), std::invalid_argument);
    const BeamSplitter bs(0.6);
    REQUIRE_THAT(bs.t(), WithinAbs(0.8, 1e-15));
    REQUIRE_THAT(bs.r(), WithinAbs(0.6, 1e-15));
}

TEST_CASE("beam splitter action on coherent inputs") {
    // Zero reflectivity: pass-through.
    const GaussPolyState in1 = coherent_state(0.5);
    const GaussPolyState in2 = fock_state(1);
    REQUIRE(test_util::state_difference(beam_split(in1, in2, BeamSplitter(0.0)),
                                        tensor(in1, in2)) < 1e-12);

    // Coherent x vacuum: output marginals are coherent with amplitudes
    // t*alpha and r*alpha.
    const BeamSplitter bs(0.4);
    const GaussPolyState out = beam_split(in1, coherent_state(0.0), bs);
    REQUIRE(out.modes() == 2);
    REQUIRE_THAT(integrate_all(out), WithinAbs(1.0, 1e-12));
    const double t_alpha = bs.t() * 0.5;
    REQUIRE_THAT(t_alpha, WithinAbs(0.458257569495584, 1e-14));
    const GaussPolyState m0 = integrate_modes(out, {0});
    const GaussPolyState m1 = integrate_modes(out, {1});
    REQUIRE_THAT(amplitude_expectation(m0).real(), WithinAbs(t_alpha, 1e-12));
    REQUIRE_THAT(amplitude_expectation(m1).real(), WithinAbs(0.2, 1e-12));
    REQUIRE(test_util::state_difference(m0, coherent_state(t_alpha)) < 1e-12);
    REQUIRE(test_util::state_difference(m1, coherent_state(0.2)) < 1e-12);

    // Photon number is conserved.
    REQUIRE_THAT(mean_photon_number(m0) + mean_photon_number(m1), WithinAbs(0.25, 1e-11));

    // Two coherent inputs follow the amplitude map (t a - r b, r a + t b).
    const std::complex<double> a(0.5, 0.0), b(0.0, 0.3);
    const BeamSplitter bs2(0.37);
    const GaussPolyState mixed = beam_split(coherent_state(a), coherent_state(b), bs2);
    const std::complex<double> amp0 = amplitude_expectation(integrate_modes(mixed, {0}));
    const std::complex<double> amp1 = amplitude_expectation(integrate_modes(mixed, {1}));
    const std::complex<double> want0 = bs2.t() * a - bs2.r() * b;
    const std::complex<double> want1 = bs2.r() * a + bs2.t() * b;
    REQUIRE_THAT(std::abs(amp0 - want0), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(std::abs(amp1 - want1), WithinAbs(0.0, 1e-12));

    REQUIRE_THROWS_AS(beam_split(out, in1, bs), std::invalid_argument);  // first input not single-mode
}

TEST_CASE("photon counting probabilities on a split coherent state") {
    const GaussPolyState s = beam_split(coherent_state(0.5), coherent_state(0.0), BeamSplitter(0.4));
    // Reflected port carries a Poisson distribution with mean (r*alpha)^2 = 0.04.
    REQUIRE_THAT(detection_probability(s, 0), WithinRel(0.960789439152323, 1e-12));
    REQUIRE_THAT(detection_probability(s, 1), WithinRel(0.0384315775660929, 1e-12));
    REQUIRE_THAT(detection_probability(s, 2), WithinRel(0.04 * 0.04 / 2.0 * std::exp(-0.04), 1e-11));

    // Transmitted port: Poisson with mean (t*alpha)^2 = 0.21.
    REQUIRE_THAT(detection_probability(s, 0, 0), WithinRel(std::exp(-0.21), 1e-12));

    double total = 0.0;
    for (int n = 0; n <= 20; ++n) total += detection_probability(s, n);
    REQUIRE_THAT(total, WithinAbs(1.0, 1e-10));

    REQUIRE_THROWS_AS(detection_probability(coherent_state(0.5), 0), std::invalid_argument);
    REQUIRE_THROWS_AS(detection_probability(s, kMaxDetectionProbabilityOrder + 1), std::invalid_argument);
    REQUIRE_THROWS_AS(detection_probability(s, 0, 2), std::invalid_argument);
    const GaussPolyState unnorm(2, Poly::constant(4, 2.0 / (M_PI * M_PI)), Eigen::VectorXd::Zero(4),
                                Eigen::MatrixXd::Identity(4, 4));
    REQUIRE_THROWS_AS(detection_probability(unnorm, 0), std::invalid_argument);
}

TEST_CASE("conditioning on a detection outcome") {
    // Product state with a definite photon number on the detector port.
    const GaussPolyState definite = tensor(coherent_state(0.3), fock_state(2));
    const CollapseResult hit = collapse_on_detection(definite, 2);
    REQUIRE_THAT(hit.probability, WithinAbs(1.0, 1e-11));
    REQUIRE(test_util::state_difference(hit.out, coherent_state(0.3)) < 1e-10);
    // Orthogonal outcome: rejected outright or left with only roundoff mass.
    bool rejected = false;
    double stray = 0.0;
    try {
        stray = collapse_on_detection(definite, 1).probability;
    } catch (const std::domain_error&) {
        rejected = true;
    }
    REQUIRE((rejected || std::abs(stray) < 1e-12));

    // Vacuum outcome on the reflected port heralds the transmitted coherent state.
    const BeamSplitter bs(0.4);
    const GaussPolyState s = beam_split(coherent_state(0.5), coherent_state(0.0), bs);
    const CollapseResult none = collapse_on_detection(s, 0);
    REQUIRE_THAT(none.probability, WithinRel(0.960789439152323, 1e-12));
    REQUIRE_THAT(integrate_all(none.out), WithinAbs(1.0, 1e-11));
    REQUIRE_THAT(fidelity(none.out, coherent_state(bs.t() * 0.5)), WithinAbs(1.0, 1e-10));

    // One-photon outcome: photon subtraction keeps a coherent state with the
    // same transmitted amplitude.
    const CollapseResult one = collapse_on_detection(s, 1);
    REQUIRE_THAT(one.probability, WithinRel(0.0384315775660929, 1e-11));
    REQUIRE_THAT(amplitude_expectation(one.out).real(), WithinAbs(bs.t() * 0.5, 1e-11));
    REQUIRE_THAT(purity(one.out), WithinAbs(1.0, 1e-10));

    // Detector on the transmitted port instead.
    const CollapseResult other_port = collapse_on_detection(s, 0, 0);
    REQUIRE_THAT(other_port.probability, WithinRel(std::exp(-0.21), 1e-11));
    REQUIRE_THAT(amplitude_expectation(other_port.out).real(), WithinAbs(bs.r() * 0.5, 1e-11));

    REQUIRE_THROWS_AS(collapse_on_detection(s, kMaxCollapseOrder + 1), std::invalid_argument);
    REQUIRE_THROWS_AS(collapse_on_detection(coherent_state(0.1), 0), std::invalid_argument);
}

TEST_CASE("detection event overloads enforce the detector cap") {
    const GaussPolyState s = beam_split(coherent_state(0.5), coherent_state(0.0), BeamSplitter(0.4));
    const DetectionEvent ok{1, 1};
    REQUIRE_THAT(detection_probability(s, ok.n, ok.mode), WithinRel(detection_probability(s, 1), 1e-15));
    const CollapseResult c = collapse_on_detection(s, DetectionEvent{1, 0});
    REQUIRE_THAT(c.probability, WithinRel(0.960789439152323, 1e-12));
    REQUIRE_THROWS_AS(collapse_on_detection(s, DetectionEvent{1, kMaxFockOrder + 1}), std::invalid_argument);
    REQUIRE_THROWS_AS(detection_probability(s, DetectionEvent{1, kMaxFockOrder + 1}), std::invalid_argument);
}

TEST_CASE("state overlap fidelity") {
    const GaussPolyState c0 = coherent_state(0.0);
    const GaussPolyState c1 = coherent_state(1.0);
    REQUIRE_THAT(fidelity(c0, c1), WithinRel(std::exp(-1.0), 1e-12));
    REQUIRE_THAT(fidelity(c1, c0), WithinRel(fidelity(c0, c1), 1e-13));
    REQUIRE_THAT(fidelity(c0, fock_state(1)), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(fidelity(c1, c1), WithinAbs(1.0, 1e-12));
    const std::complex<double> a(0.4, -0.2), b(-0.1, 0.25);
    REQUIRE_THAT(fidelity(coherent_state(a), coherent_state(b)),
                 WithinRel(std::exp(-std::norm(a - b)), 1e-12));
    const GaussPolyState two = tensor(c0, c1);
    REQUIRE_THROWS_AS(fidelity(two, c0), std::invalid_argument);
}
