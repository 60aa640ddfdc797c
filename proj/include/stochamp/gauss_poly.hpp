#pragma once

// Phase-space states represented exactly as
//
//     W(v) = poly(v) * exp(-(v - mu)^T A (v - mu)),
//
// over quadrature variables v = (x1, p1, ..., xm, pm) with hbar = kappa = 1.
// Products, linear substitutions and Gaussian moments all stay inside this
// family, so every probability and expectation value in the pipeline is
// analytic -- grids appear only in output sampling and black-box tests.

#include "poly.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stochamp {

// Fixed unit convention; no operation accepts alternative values.
inline constexpr double hbar = 1.0;
inline constexpr double kappa = 1.0;
inline constexpr double two_pi_hbar = 2.0 * std::numbers::pi * hbar;

inline constexpr int kMaxModes = kMaxVars / 2;
inline constexpr double kPruneTol = 1e-14;

class GaussPolyState {
public:
    GaussPolyState(int modes, Poly poly, Eigen::VectorXd mean, Eigen::MatrixXd precision)
        : modes_(modes), poly_(std::move(poly)), mean_(std::move(mean)), precision_(std::move(precision)) {
        if (modes_ < 1 || modes_ > kMaxModes)
            throw std::invalid_argument("GaussPolyState: mode count out of range");
        const int n = 2 * modes_;
        if (poly_.nvars() != n)
            throw std::invalid_argument("GaussPolyState: polynomial variable count mismatch");
        if (mean_.size() != n || precision_.rows() != n || precision_.cols() != n)
            throw std::invalid_argument("GaussPolyState: dimension mismatch");
        if (!mean_.allFinite() || !precision_.allFinite())
            throw std::invalid_argument("GaussPolyState: non-finite entries");

        const double scale = std::max(1.0, precision_.cwiseAbs().maxCoeff());
        if ((precision_ - precision_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::invalid_argument("GaussPolyState: precision matrix not symmetric");
        precision_ = ((precision_ + precision_.transpose()) / 2.0).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(precision_, Eigen::EigenvaluesOnly);
        const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -1e-12 * top)
            throw std::invalid_argument("GaussPolyState: precision matrix has a negative eigenvalue");
    }

    int modes() const { return modes_; }
    int nvars() const { return 2 * modes_; }
    const Poly& poly() const { return poly_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& precision() const { return precision_; }

private:
    int modes_;
    Poly poly_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd precision_;
};

namespace detail {

// (k-1)!! * sqrt(pi/lambda) / (2 lambda)^(k/2) -- the 1-D moment
// integral of y^k exp(-lambda y^2); zero for odd k.
inline double gauss_moment_1d(int k, double lambda) {
    if (k % 2 == 1) return 0.0;
    double value = std::sqrt(std::numbers::pi / lambda);
    for (int j = 1; j <= k / 2; ++j) value *= (2 * j - 1) / (2.0 * lambda);
    return value;
}

inline void require_positive_definite(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es) {
    const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() <= 1e-12 * top)
        throw std::domain_error("Gaussian integral requires a positive-definite precision matrix");
}

// integral of poly(v) * exp(-(v-mu)^T A (v-mu)) over all variables,
// by the Wick/Isserlis moment recurrence with the precision inverted to a
// covariance: E[v_i f(v)] = mu_i E[f] + sum_j C_ij E[df/dv_j].  Moments are
// tabulated once over the exponent bounding box of the polynomial.
inline double integrate_poly_gaussian(const Poly& poly, const Eigen::VectorXd& mean,
                                      const Eigen::MatrixXd& precision) {
    if (poly.is_zero()) return 0.0;
    const int n = static_cast<int>(mean.size());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(precision);
    require_positive_definite(es);
    const Eigen::MatrixXd cov =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose() / 2.0;

    double norm = 1.0;
    for (int i = 0; i < n; ++i) norm *= std::numbers::pi / es.eigenvalues()[i];
    norm = std::sqrt(norm);

    std::array<int, kMaxVars> box{};
    for (const auto& [m, c] : poly.terms())
        for (int i = 0; i < n; ++i) box[static_cast<size_t>(i)] = std::max(box[static_cast<size_t>(i)], m[i] + 1);
    for (int i = 0; i < n; ++i) box[static_cast<size_t>(i)] = std::max(box[static_cast<size_t>(i)], 1);

    std::array<long, kMaxVars> stride{};
    long total = 1;
    for (int i = n - 1; i >= 0; --i) {
        stride[static_cast<size_t>(i)] = total;
        total *= box[static_cast<size_t>(i)];
    }
    if (total > (1L << 24))
        throw std::runtime_error("Gaussian moment table too large");

    std::vector<double> table(static_cast<size_t>(total));
    std::array<int, kMaxVars> idx{};
    for (long lin = 0; lin < total; ++lin) {
        if (lin == 0) {
            table[0] = 1.0;
        } else {
            int i = 0;
            while (idx[static_cast<size_t>(i)] == 0) ++i;
            const long base = lin - stride[static_cast<size_t>(i)];
            double value = mean[i] * table[static_cast<size_t>(base)];
            for (int j = 0; j < n; ++j) {
                int mj = idx[static_cast<size_t>(j)] - (j == i ? 1 : 0);
                if (mj > 0)
                    value += cov(i, j) * mj * table[static_cast<size_t>(base - stride[static_cast<size_t>(j)])];
            }
            table[static_cast<size_t>(lin)] = value;
        }
        // odometer increment (last variable fastest)
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < box[static_cast<size_t>(i)]) break;
            idx[static_cast<size_t>(i)] = 0;
        }
    }

    double sum = 0.0;
    for (const auto& [m, c] : poly.terms()) {
        long lin = 0;
        for (int i = 0; i < n; ++i) lin += m[i] * stride[static_cast<size_t>(i)];
        sum += c * table[static_cast<size_t>(lin)];
    }
    return norm * sum;
}

// Reference integrator: shift to the mean, rotate to principal axes and
// apply 1-D even-moment formulas.  Kept for cross-checking the recurrence
// on low-degree states; the recurrence is the production path because it
// avoids re-expanding high-degree polynomials under the rotation.
inline double integrate_all_principal_axes(const GaussPolyState& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.precision());
    require_positive_definite(es);
    const Poly rotated = s.poly().substitute_affine(es.eigenvectors(), s.mean());
    double sum = 0.0;
    for (const auto& [m, c] : rotated.terms()) {
        double t = c;
        for (int i = 0; i < s.nvars(); ++i) t *= gauss_moment_1d(m[i], es.eigenvalues()[i]);
        sum += t;
    }
    return sum;
}

}  // namespace detail

// Pointwise product; precision matrices add and the completed-square mean
// solves (A1+A2) mu = A1 mu1 + A2 mu2 (pseudo-inverse: the system is always
// consistent for positive-semidefinite summands).
inline GaussPolyState multiply(const GaussPolyState& a, const GaussPolyState& b) {
    if (a.modes() != b.modes())
        throw std::invalid_argument("multiply: mode count mismatch");
    const Eigen::MatrixXd A = a.precision() + b.precision();
    const Eigen::VectorXd rhs = a.precision() * a.mean() + b.precision() * b.mean();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::VectorXd inv_diag = es.eigenvalues();
    for (int i = 0; i < inv_diag.size(); ++i)
        inv_diag[i] = es.eigenvalues()[i] > 1e-12 * top ? 1.0 / es.eigenvalues()[i] : 0.0;
    const Eigen::VectorXd mean = es.eigenvectors() * inv_diag.asDiagonal() * es.eigenvectors().transpose() * rhs;

    const double log_scale = mean.dot(A * mean)
        - a.mean().dot(a.precision() * a.mean())
        - b.mean().dot(b.precision() * b.mean());
    Poly poly = a.poly() * b.poly();
    poly *= std::exp(log_scale);
    // No pruning here: a coefficient that is tiny relative to the largest one
    // can still carry an O(1) moment when it sits on a high-degree monomial,
    // as in the high-order counting references.
    return GaussPolyState(a.modes(), std::move(poly), mean, A);
}

// W(L v): exact re-expansion of the polynomial and exact transformation of
// the envelope; L must be invertible (orthogonal for beam splitters).
inline GaussPolyState substitute_linear(const GaussPolyState& s, const Eigen::MatrixXd& L) {
    const int n = s.nvars();
    if (L.rows() != n || L.cols() != n)
        throw std::invalid_argument("substitute_linear: matrix shape mismatch");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
    if (!lu.isInvertible())
        throw std::invalid_argument("substitute_linear: singular matrix");

    Eigen::MatrixXd precision = L.transpose() * s.precision() * L;
    precision = ((precision + precision.transpose()) / 2.0).eval();
    const Eigen::VectorXd mean = lu.solve(s.mean());
    Poly poly = s.poly().substitute_affine(L, Eigen::VectorXd::Zero(n));
    poly.prune(kPruneTol);
    return GaussPolyState(s.modes(), std::move(poly), mean, precision);
}

inline double integrate_all(const GaussPolyState& s) {
    return detail::integrate_poly_gaussian(s.poly(), s.mean(), s.precision());
}

inline double evaluate(const GaussPolyState& s, const Eigen::VectorXd& v) {
    if (v.size() != s.nvars())
        throw std::invalid_argument("evaluate: dimension mismatch");
    const Eigen::VectorXd d = v - s.mean();
    return s.poly().evaluate(v) * std::exp(-d.dot(s.precision() * d));
}

inline double moment(const GaussPolyState& s, const Monomial& exponents) {
    Poly shifted(s.nvars());
    for (const auto& [m, c] : s.poly().terms()) shifted.add_term(m + exponents, c);
    return detail::integrate_poly_gaussian(shifted, s.mean(), s.precision());
}

inline double moment(const GaussPolyState& s, std::initializer_list<int> exponents) {
    return moment(s, mono(exponents));
}

// Integrate out every mode not in `keep`.  The quadratic form is block
// decomposed: with u the kept variables (shifted to their mean) and the
// integrated block rotated to principal axes, the envelope separates into
// exp(-u^T S u - sum_j lambda_j y_j^2) with S the Schur complement, and each
// monomial integrates by 1-D even moments.
inline GaussPolyState integrate_modes(const GaussPolyState& s, const std::vector<int>& keep) {
    if (keep.empty() || static_cast<int>(keep.size()) >= s.modes())
        throw std::invalid_argument("integrate_modes: keep must be a non-empty strict subset of modes");
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= s.modes())
            throw std::invalid_argument("integrate_modes: mode index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw std::invalid_argument("integrate_modes: keep must be sorted and unique");
    }

    std::vector<int> kv, ov;  // kept / integrated-out variable indices
    for (int m = 0, k = 0; m < s.modes(); ++m) {
        const bool kept = k < static_cast<int>(keep.size()) && keep[static_cast<size_t>(k)] == m;
        if (kept) ++k;
        for (int q = 0; q < 2; ++q) (kept ? kv : ov).push_back(2 * m + q);
    }
    const int nk = static_cast<int>(kv.size()), no = static_cast<int>(ov.size());

    Eigen::MatrixXd A_kk(nk, nk), A_ko(nk, no), A_oo(no, no);
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < nk; ++j) A_kk(i, j) = s.precision()(kv[static_cast<size_t>(i)], kv[static_cast<size_t>(j)]);
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < no; ++j) A_ko(i, j) = s.precision()(kv[static_cast<size_t>(i)], ov[static_cast<size_t>(j)]);
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j) A_oo(i, j) = s.precision()(ov[static_cast<size_t>(i)], ov[static_cast<size_t>(j)]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_oo);
    detail::require_positive_definite(es);
    const Eigen::MatrixXd A_oo_inv =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    const Eigen::MatrixXd coupling = -A_oo_inv * A_ko.transpose();    // (no x nk)
    Eigen::MatrixXd schur = A_kk - A_ko * A_oo_inv * A_ko.transpose();
    schur = ((schur + schur.transpose()) / 2.0).eval();

    // Old variables in terms of (u, y): kept v = u + mu_k, integrated
    // v = coupling u + Q y + mu_o.  Cross terms vanish by construction.
    const int n = s.nvars();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, nk + no);
    for (int i = 0; i < nk; ++i) M(kv[static_cast<size_t>(i)], i) = 1.0;
    for (int j = 0; j < no; ++j) {
        for (int i = 0; i < nk; ++i) M(ov[static_cast<size_t>(j)], i) = coupling(j, i);
        for (int i = 0; i < no; ++i) M(ov[static_cast<size_t>(j)], nk + i) = es.eigenvectors()(j, i);
    }
    const Poly expanded = s.poly().substitute_affine(M, s.mean());

    Poly reduced(nk);
    for (const auto& [m, c] : expanded.terms()) {
        double factor = c;
        bool odd = false;
        for (int j = 0; j < no; ++j) {
            const int k = m[nk + j];
            if (k % 2 == 1) { odd = true; break; }
            factor *= detail::gauss_moment_1d(k, es.eigenvalues()[j]);
        }
        if (odd) continue;
        Monomial mu_only;
        for (int i = 0; i < nk; ++i) mu_only.set(i, m[i]);
        reduced.add_term(mu_only, factor);
    }

    Eigen::VectorXd mean_k(nk);
    for (int i = 0; i < nk; ++i) mean_k[i] = s.mean()[kv[static_cast<size_t>(i)]];
    Poly poly = reduced.substitute_affine(Eigen::MatrixXd::Identity(nk, nk), -mean_k);
    poly.prune(kPruneTol);
    return GaussPolyState(static_cast<int>(keep.size()), std::move(poly), mean_k, schur);
}

// Product state of two registers: variables concatenate, envelopes multiply.
inline GaussPolyState tensor(const GaussPolyState& a, const GaussPolyState& b) {
    const int modes = a.modes() + b.modes();
    if (modes > kMaxModes)
        throw std::invalid_argument("tensor: too many modes");
    const int na = a.nvars(), nb = b.nvars(), n = na + nb;

    Poly poly(n);
    for (const auto& [ma, ca] : a.poly().terms()) {
        for (const auto& [mb, cb] : b.poly().terms()) {
            Monomial m = ma;
            for (int i = 0; i < nb; ++i) m.set(na + i, mb[i]);
            poly.add_term(m, ca * cb);
        }
    }
    Eigen::VectorXd mean(n);
    mean << a.mean(), b.mean();
    Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(n, n);
    precision.topLeftCorner(na, na) = a.precision();
    precision.bottomRightCorner(nb, nb) = b.precision();
    return GaussPolyState(modes, std::move(poly), mean, precision);
}

}  // namespace stochamp
