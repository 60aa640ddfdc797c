#pragma once

// Sparse multivariate polynomials with real coefficients -- the polynomial
// factor of phase-space states.  Exponent tuples have a fixed capacity of
// eight variables (four modes), which keeps map keys allocation-free; terms
// live in an ordered map so iteration order is reproducible run to run.

#include <Eigen/Dense>

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <vector>

namespace stochamp {

inline constexpr int kMaxVars = 8;

struct Monomial {
    std::array<int16_t, kMaxVars> e{};

    int operator[](int i) const { return e[static_cast<size_t>(i)]; }
    void set(int i, int value) { e[static_cast<size_t>(i)] = static_cast<int16_t>(value); }

    int degree() const {
        int d = 0;
        for (int16_t k : e) d += k;
        return d;
    }

    friend Monomial operator+(const Monomial& a, const Monomial& b) {
        Monomial out;
        for (size_t i = 0; i < kMaxVars; ++i)
            out.e[i] = static_cast<int16_t>(a.e[i] + b.e[i]);
        return out;
    }

    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

inline Monomial mono(std::initializer_list<int> exponents) {
    if (exponents.size() > kMaxVars)
        throw std::invalid_argument("mono: too many exponents");
    Monomial m;
    int i = 0;
    for (int k : exponents) m.set(i++, k);
    return m;
}

namespace detail {
inline double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}
}  // namespace detail

class Poly {
public:
    explicit Poly(int nvars) : nvars_(nvars) {
        if (nvars < 1 || nvars > kMaxVars)
            throw std::invalid_argument("Poly: variable count out of range");
    }

    static Poly constant(int nvars, double value) {
        Poly p(nvars);
        if (value != 0.0) p.terms_[Monomial{}] = value;
        return p;
    }

    static Poly variable(int nvars, int index) {
        Poly p(nvars);
        if (index < 0 || index >= nvars)
            throw std::invalid_argument("Poly: variable index out of range");
        Monomial m;
        m.set(index, 1);
        p.terms_[m] = 1.0;
        return p;
    }

    int nvars() const { return nvars_; }
    const std::map<Monomial, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    void add_term(const Monomial& m, double coeff) {
        check_monomial(m);
        if (coeff == 0.0) return;
        double& c = terms_[m];
        c += coeff;
        if (c == 0.0) terms_.erase(m);
    }

    double coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? 0.0 : it->second;
    }

    Poly& operator+=(const Poly& other) {
        if (other.nvars_ != nvars_)
            throw std::invalid_argument("Poly: variable count mismatch");
        for (const auto& [m, c] : other.terms_) {
            double& acc = terms_[m];
            acc += c;
            if (acc == 0.0) terms_.erase(m);
        }
        return *this;
    }

    Poly& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
        } else {
            for (auto& [m, c] : terms_) c *= s;
        }
        return *this;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.nvars_ != b.nvars_)
            throw std::invalid_argument("Poly: variable count mismatch");
        Poly out(a.nvars_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                out.terms_[ma + mb] += ca * cb;
        std::erase_if(out.terms_, [](const auto& kv) { return kv.second == 0.0; });
        return out;
    }

    friend Poly operator*(const Poly& a, double s) {
        Poly out = a;
        out *= s;
        return out;
    }

    double evaluate(const Eigen::VectorXd& v) const {
        if (v.size() != nvars_)
            throw std::invalid_argument("Poly: evaluation point has wrong dimension");
        double sum = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = c;
            for (int i = 0; i < nvars_; ++i) t *= detail::ipow(v[i], m[i]);
            sum += t;
        }
        return sum;
    }

    // Drop coefficients below rel_tol times the largest magnitude; keeps
    // double-precision noise from accumulating term count across products.
    void prune(double rel_tol) {
        if (terms_.empty()) return;
        double top = 0.0;
        for (const auto& [m, c] : terms_) top = std::max(top, std::abs(c));
        const double cut = rel_tol * top;
        std::erase_if(terms_, [cut](const auto& kv) { return std::abs(kv.second) < cut; });
    }

    // Substitute v_i -> sum_j M(i,j) u_j + shift(i); the result is a
    // polynomial in the u variables (M.cols() of them), expanded exactly.
    Poly substitute_affine(const Eigen::MatrixXd& M, const Eigen::VectorXd& shift) const {
        if (M.rows() != nvars_ || shift.size() != nvars_)
            throw std::invalid_argument("Poly: substitution shape mismatch");
        const int out_vars = static_cast<int>(M.cols());
        if (out_vars < 1 || out_vars > kMaxVars)
            throw std::invalid_argument("Poly: substitution output dimension out of range");

        std::array<int, kMaxVars> max_e{};
        for (const auto& [m, c] : terms_)
            for (int i = 0; i < nvars_; ++i) max_e[static_cast<size_t>(i)] = std::max(max_e[static_cast<size_t>(i)], m[i]);

        // Cached powers of each variable's affine image.
        std::vector<std::vector<Poly>> powers(static_cast<size_t>(nvars_));
        for (int i = 0; i < nvars_; ++i) {
            if (max_e[static_cast<size_t>(i)] == 0) continue;
            Poly lin = Poly::constant(out_vars, shift[i]);
            for (int j = 0; j < out_vars; ++j) {
                if (M(i, j) == 0.0) continue;
                Monomial mv;
                mv.set(j, 1);
                lin.add_term(mv, M(i, j));
            }
            auto& pw = powers[static_cast<size_t>(i)];
            pw.push_back(Poly::constant(out_vars, 1.0));
            for (int k = 1; k <= max_e[static_cast<size_t>(i)]; ++k) pw.push_back(pw.back() * lin);
        }

        Poly out(out_vars);
        for (const auto& [m, c] : terms_) {
            Poly term = Poly::constant(out_vars, c);
            for (int i = 0; i < nvars_; ++i)
                if (m[i] > 0) term = term * powers[static_cast<size_t>(i)][static_cast<size_t>(m[i])];
            out += term;
        }
        return out;
    }

private:
    void check_monomial(const Monomial& m) const {
        for (int i = 0; i < kMaxVars; ++i) {
            if (m[i] < 0) throw std::invalid_argument("Poly: negative exponent");
            if (i >= nvars_ && m[i] != 0)
                throw std::invalid_argument("Poly: exponent on unused variable");
        }
    }

    int nvars_;
    std::map<Monomial, double> terms_;
};

// Largest absolute coefficient difference between two polynomials over the
// union of their monomials.
inline double max_coeff_diff(const Poly& a, const Poly& b) {
    double d = 0.0;
    for (const auto& [m, c] : a.terms()) d = std::max(d, std::abs(c - b.coeff(m)));
    for (const auto& [m, c] : b.terms()) d = std::max(d, std::abs(c - a.coeff(m)));
    return d;
}

}  // namespace stochamp
