#pragma once

// Independent truncated number-basis engine used to cross-check the
// phase-space pipeline: coherent expansion, exact blockwise beam-splitter
// unitaries, projective counting, and the mirrored branch chain.

#include "amplifier.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

namespace stochamp {

inline constexpr int kDefaultFockCutoff = 20;

struct FockVector {
    int cutoff;            // highest photon number kept
    Eigen::VectorXcd amps; // c_0 .. c_cutoff
};

struct TwoModeFockVector {
    int cutoff;            // per mode
    Eigen::MatrixXcd amps; // amps(n1, n2)
};

inline double truncation_error_bound(double alpha_abs, int cutoff) {
    double tail = std::exp(-alpha_abs * alpha_abs);
    for (int n = 1; n <= cutoff; ++n) tail *= alpha_abs * alpha_abs / n;
    return tail;
}

inline FockVector coherent_fock(std::complex<double> alpha, int cutoff = kDefaultFockCutoff) {
    const double a2 = std::norm(alpha);
    if (cutoff < 8 * std::max(1.0, a2))
        throw std::invalid_argument("coherent_fock: cutoff too small for this amplitude");
    FockVector v{cutoff, Eigen::VectorXcd(cutoff + 1)};
    std::complex<double> c = std::exp(-a2 / 2.0);
    for (int n = 0; n <= cutoff; ++n) {
        v.amps[n] = c;
        c *= alpha / std::sqrt(n + 1.0);
    }
    if (1.0 - v.amps.squaredNorm() > 1e-8)
        throw std::invalid_argument("coherent_fock: truncated mass exceeds tolerance");
    return v;
}

inline FockVector fock_basis_vector(int n, int cutoff = kDefaultFockCutoff) {
    if (n < 0 || n > cutoff)
        throw std::invalid_argument("fock_basis_vector: photon number out of range");
    FockVector v{cutoff, Eigen::VectorXcd::Zero(cutoff + 1)};
    v.amps[n] = 1.0;
    return v;
}

inline TwoModeFockVector tensor(const FockVector& a, const FockVector& b) {
    if (a.cutoff != b.cutoff)
        throw std::invalid_argument("tensor: cutoff mismatch");
    return {a.cutoff, a.amps * b.amps.transpose()};
}

namespace detail {

// Photon number is conserved, so the splitter unitary is block diagonal over
// the total count s; each block is the exponential of the antisymmetric
// mixing generator restricted to n1 in [max(0, s-N), min(s, N)].  Blocks are
// orthogonal even in the clipped s > N sectors, so norm is always preserved;
// physical accuracy is governed by the boundary-occupancy guard in apply.
inline std::shared_ptr<const std::vector<Eigen::MatrixXd>> fock_splitter_blocks(double r, int cutoff) {
    static std::mutex mutex;
    static std::map<std::pair<std::uint64_t, int>, std::shared_ptr<const std::vector<Eigen::MatrixXd>>> cache;
    const std::pair<std::uint64_t, int> key{std::bit_cast<std::uint64_t>(r), cutoff};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    const double theta = std::asin(r);
    auto blocks = std::make_shared<std::vector<Eigen::MatrixXd>>();
    blocks->reserve(static_cast<size_t>(2 * cutoff) + 1);
    for (int s = 0; s <= 2 * cutoff; ++s) {
        const int lo = std::max(0, s - cutoff), hi = std::min(s, cutoff);
        const int d = hi - lo + 1;
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
        for (int k = lo; k <= hi; ++k) {
            if (k - 1 >= lo) g(k - 1 - lo, k - lo) = std::sqrt(static_cast<double>(k) * (s - k + 1));
            if (k + 1 <= hi) g(k + 1 - lo, k - lo) = -std::sqrt(static_cast<double>(k + 1) * (s - k));
        }
        blocks->push_back((theta * g).exp());
    }

    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(blocks)).first->second;
}

inline TwoModeFockVector apply_splitter_blocks(const TwoModeFockVector& s, double r, bool inverse) {
    const int N = s.cutoff;
    double boundary = 0.0;
    for (int k = 0; k <= N; ++k) boundary += std::norm(s.amps(N, k)) + std::norm(s.amps(k, N));
    boundary -= std::norm(s.amps(N, N));
    if (boundary >= 1e-10)
        throw std::domain_error("apply_beam_splitter: truncation boundary carries significant occupancy");

    const auto blocks = fock_splitter_blocks(r, N);
    TwoModeFockVector out{N, Eigen::MatrixXcd::Zero(N + 1, N + 1)};
    for (int tot = 0; tot <= 2 * N; ++tot) {
        const int lo = std::max(0, tot - N), hi = std::min(tot, N);
        Eigen::VectorXcd v(hi - lo + 1);
        for (int k = lo; k <= hi; ++k) v[k - lo] = s.amps(k, tot - k);
        const Eigen::MatrixXd& u = (*blocks)[static_cast<size_t>(tot)];
        const Eigen::VectorXcd w = inverse ? (u.transpose() * v).eval() : (u * v).eval();
        for (int k = lo; k <= hi; ++k) out.amps(k, tot - k) = w[k - lo];
    }
    return out;
}

}  // namespace detail

// Same port and sign convention as the phase-space engine: coherent inputs
// (a, b) map to (t a - r b, r a + t b).
inline TwoModeFockVector apply_beam_splitter(const TwoModeFockVector& s, const BeamSplitter& bs) {
    return detail::apply_splitter_blocks(s, bs.r(), false);
}

inline TwoModeFockVector apply_beam_splitter_inverse(const TwoModeFockVector& s, const BeamSplitter& bs) {
    return detail::apply_splitter_blocks(s, bs.r(), true);
}

struct ProjectionResult {
    double probability;
    FockVector out;
};

// Projective count of n photons on `mode`; returns the renormalized state of
// the other mode.
inline ProjectionResult project_photon_count(const TwoModeFockVector& s, int mode, int n) {
    if (mode != 0 && mode != 1)
        throw std::invalid_argument("project_photon_count: mode out of range");
    if (n < 0 || n > s.cutoff)
        throw std::invalid_argument("project_photon_count: photon number exceeds cutoff");
    const Eigen::VectorXcd slice =
        mode == 1 ? Eigen::VectorXcd(s.amps.col(n)) : Eigen::VectorXcd(s.amps.row(n).transpose());
    const double p = slice.squaredNorm();
    if (p < 1e-30)
        throw std::domain_error("project_photon_count: outcome probability vanishes");
    return {p, FockVector{s.cutoff, slice / std::sqrt(p)}};
}

inline double norm_squared(const FockVector& v) { return v.amps.squaredNorm(); }
inline double norm_squared(const TwoModeFockVector& v) { return v.amps.squaredNorm(); }

inline FockVector normalized(FockVector v) {
    const double n2 = v.amps.squaredNorm();
    if (n2 < 1e-300)
        throw std::domain_error("normalized: zero vector");
    v.amps /= std::sqrt(n2);
    return v;
}

// Lowering/raising in the truncated basis; apply_creation drops the
// coefficient pushed past the cutoff.
inline FockVector apply_annihilation(const FockVector& v) {
    FockVector out{v.cutoff, Eigen::VectorXcd::Zero(v.cutoff + 1)};
    for (int n = 0; n < v.cutoff; ++n) out.amps[n] = std::sqrt(n + 1.0) * v.amps[n + 1];
    return out;
}

inline FockVector apply_creation(const FockVector& v) {
    FockVector out{v.cutoff, Eigen::VectorXcd::Zero(v.cutoff + 1)};
    for (int n = 1; n <= v.cutoff; ++n) out.amps[n] = std::sqrt(static_cast<double>(n)) * v.amps[n - 1];
    return out;
}

// Expectation values of the represented state (normalization divided out).
inline std::complex<double> amplitude_expectation(const FockVector& v) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < v.cutoff; ++n) acc += std::conj(v.amps[n]) * std::sqrt(n + 1.0) * v.amps[n + 1];
    return acc / v.amps.squaredNorm();
}

inline double mean_photon_number(const FockVector& v) {
    double acc = 0.0;
    for (int n = 1; n <= v.cutoff; ++n) acc += n * std::norm(v.amps[n]);
    return acc / v.amps.squaredNorm();
}

inline double fidelity(const FockVector& a, const FockVector& b) {
    if (a.cutoff != b.cutoff)
        throw std::invalid_argument("fidelity: cutoff mismatch");
    return std::norm(a.amps.dot(b.amps)) / (a.amps.squaredNorm() * b.amps.squaredNorm());
}

struct FockBranchResult {
    double probability;
    FockVector out;
};

// Number-basis mirror of the three-splitter conditional chain.
inline FockBranchResult run_branch_fock(const AmplifierConfig& cfg, int qnd, int pd1, int pd2,
                                        int cutoff = kDefaultFockCutoff) {
    FockVector cur = coherent_fock(cfg.alpha, cutoff);
    double p_total = 1.0;

    ProjectionResult step = project_photon_count(
        apply_beam_splitter(tensor(cur, fock_basis_vector(0, cutoff)), cfg.bs1), 1, qnd);
    p_total *= step.probability;
    step = project_photon_count(
        apply_beam_splitter(tensor(step.out, fock_basis_vector(qnd, cutoff)), cfg.bs2), 1, pd1);
    p_total *= step.probability;
    step = project_photon_count(
        apply_beam_splitter(tensor(step.out, fock_basis_vector(0, cutoff)), cfg.bs3), 1, pd2);
    p_total *= step.probability;

    return {p_total, step.out};
}

}  // namespace stochamp
