#pragma once

// Gain-constrained maximization of the closed-form success probability over
// (|alpha|, r1, r2, r3): log-barrier interior method with a geometric weight
// schedule, BFGS inner solves on central-difference gradients, and
// deterministic multistart.  Phase invariance makes real alpha lossless.

#include "amplifier.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>

namespace stochamp {

struct OptimizationProblem {
    double g_min;                            // required minimum effective gain, in (1, 2)
    double alpha_max = kMaxInputAmplitude;   // open upper box bound on alpha
    int multistart_count = 16;
    std::uint64_t seed = 0;
};

struct OptimizationResult {
    double p_opt;
    double alpha_opt;
    std::array<double, 3> r_opt;
    double f_opt;
    double g_at_opt;
    bool converged;
    int iterations;
};

namespace detail {

inline constexpr std::uint64_t kStartStride = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kPointStride = 0xd1b54a32d192ed03ULL;

// log p_succ plus w times the log-barrier over every inequality;
// -infinity outside the strict interior.
inline double barrier_value(const Eigen::Vector4d& x, double g_min, double alpha_max, double w) {
    const double a = x[0], r1 = x[1], r2 = x[2], r3 = x[3];
    if (!(a > 0.0 && a < alpha_max && r1 > 0.0 && r1 < 1.0 && r2 > 0.0 && r2 < 1.0 && r3 > 0.0 && r3 < 1.0))
        return -std::numeric_limits<double>::infinity();
    const double g = g_eff_closed_form(a, r1, r2, r3);
    if (!(g > g_min))
        return -std::numeric_limits<double>::infinity();
    const double p = p_succ_closed_form(a, r1, r2, r3);
    if (!(p > 0.0))
        return -std::numeric_limits<double>::infinity();
    return std::log(p) + w * (std::log(g - g_min)
                              + std::log(r1) + std::log1p(-r1)
                              + std::log(r2) + std::log1p(-r2)
                              + std::log(r3) + std::log1p(-r3)
                              + std::log(a) + std::log(alpha_max - a));
}

// Central differences with step 1e-6 relative; one-sided fallback when a
// probe lands outside the barrier domain.
template <class F>
Eigen::Vector4d fd_gradient(const F& f, const Eigen::Vector4d& x, double fx) {
    Eigen::Vector4d grad;
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        Eigen::Vector4d xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = f(xp), fm = f(xm);
        if (std::isinf(fp) && std::isinf(fm)) grad[i] = 0.0;
        else if (std::isinf(fp)) grad[i] = (fx - fm) / h;
        else if (std::isinf(fm)) grad[i] = (fp - fx) / h;
        else grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

struct InnerResult {
    Eigen::Vector4d x;
    double value;
    int iterations;
    bool converged;
};

// BFGS with Armijo backtracking; f returns +infinity outside the domain.
// The gradient stop is relative to |f| because the finite-difference noise
// floor scales with the objective magnitude.
template <class F>
InnerResult bfgs_minimize(const F& f, Eigen::Vector4d x, int max_iterations) {
    double fx = f(x);
    if (std::isinf(fx))
        throw std::runtime_error("bfgs_minimize: infeasible start");
    Eigen::Matrix4d h_inv = Eigen::Matrix4d::Identity();
    Eigen::Vector4d grad = fd_gradient(f, x, fx);

    int it = 0;
    bool converged = false;
    for (; it < max_iterations; ++it) {
        const double tol = 1e-9 * std::max(1.0, std::abs(fx));
        if (grad.lpNorm<Eigen::Infinity>() < tol) {
            converged = true;
            break;
        }
        Eigen::Vector4d dir = -h_inv * grad;
        if (dir.dot(grad) >= 0.0) {  // safeguard: reset to steepest descent
            h_inv.setIdentity();
            dir = -grad;
        }
        const double slope = grad.dot(dir);
        double step = 1.0;
        Eigen::Vector4d x_new;
        double f_new = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            x_new = x + step * dir;
            f_new = f(x_new);
            if (f_new <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = grad.lpNorm<Eigen::Infinity>() < 1e-5 * std::max(1.0, std::abs(fx));
            break;
        }
        const Eigen::Vector4d grad_new = fd_gradient(f, x_new, f_new);
        const Eigen::Vector4d s = x_new - x, y = grad_new - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const Eigen::Matrix4d eye = Eigen::Matrix4d::Identity();
            const double rho = 1.0 / sy;
            h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose())
                    + rho * s * s.transpose();
        }
        x = x_new;
        fx = f_new;
        grad = grad_new;
        if (s.lpNorm<Eigen::Infinity>() < 1e-14 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
            converged = grad.lpNorm<Eigen::Infinity>() < 1e-5 * std::max(1.0, std::abs(fx));
            break;
        }
    }
    return {x, fx, it, converged};
}

struct SolveOutcome {
    Eigen::Vector4d x;
    int iterations;
    bool converged;
};

inline SolveOutcome barrier_solve(Eigen::Vector4d x, double g_min, double alpha_max) {
    SolveOutcome outcome{x, 0, false};
    Eigen::Vector4d prev = x;
    for (double w = 1.0; w >= 1e-9; w *= 0.1) {
        const auto phi = [g_min, alpha_max, w](const Eigen::Vector4d& q) {
            return -barrier_value(q, g_min, alpha_max, w);
        };
        const InnerResult inner = bfgs_minimize(phi, outcome.x, 200);
        prev = outcome.x;
        outcome.x = inner.x;
        outcome.iterations += inner.iterations;
    }
    // At the deepest stages the barrier curvature across the active gain
    // constraint (~w / slack^2) is far below finite-difference resolution,
    // so the inner gradient stop cannot fire there; stationarity is judged
    // by the barrier path stabilizing instead.  Converged runs land near
    // 1e-8; a wedged inner solve leaves deltas of 1e-4 or more.
    outcome.converged = (outcome.x - prev).lpNorm<Eigen::Infinity>() <=
                        1e-6 * std::max(1.0, outcome.x.lpNorm<Eigen::Infinity>());
    return outcome;
}

// Symmetric-reflectivity bound: g(alpha->0) = 2 (1-r^2)^{3/2} >= g_min
// forces r^2 <= 1 - (g_min/2)^{2/3}; starts are sampled inside it and the
// amplitude halved until the gain constraint holds strictly.
inline double feasible_r_bound(double g_min) {
    return std::sqrt(1.0 - std::pow(g_min / 2.0, 2.0 / 3.0));
}

inline Eigen::Vector4d make_feasible(Eigen::Vector4d x, double g_min) {
    for (int k = 0; k < 200 && !(g_eff_closed_form(x[0], x[1], x[2], x[3]) > g_min); ++k) x[0] *= 0.5;
    if (!(g_eff_closed_form(x[0], x[1], x[2], x[3]) > g_min))
        throw std::runtime_error("maximize_success: no feasible start found");
    return x;
}

inline OptimizationResult solve_problem(const OptimizationProblem& problem,
                                        const std::vector<Eigen::Vector4d>& extra_starts) {
    if (!(problem.g_min > 1.0 && problem.g_min < 2.0))
        throw std::invalid_argument("maximize_success: g_min must lie in (1, 2)");
    if (!(problem.alpha_max > 0.0) || problem.alpha_max > kMaxInputAmplitude)
        throw std::invalid_argument("maximize_success: alpha_max out of range");
    if (problem.multistart_count < 1)
        throw std::invalid_argument("maximize_success: multistart_count must be positive");

    const double rmax = feasible_r_bound(problem.g_min);
    std::vector<Eigen::Vector4d> starts = extra_starts;
    starts.push_back(make_feasible({0.05, rmax / 2.0, rmax / 2.0, rmax / 2.0}, problem.g_min));
    for (int i = 1; i < problem.multistart_count; ++i) {
        std::mt19937_64 rng(problem.seed + static_cast<std::uint64_t>(i) * kStartStride);
        const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        Eigen::Vector4d x;
        x[0] = 0.02 + uniform() * (std::min(1.2, 0.9 * problem.alpha_max) - 0.02);
        for (int j = 1; j < 4; ++j) x[j] = (0.05 + 0.85 * uniform()) * rmax;
        starts.push_back(make_feasible(x, problem.g_min));
    }

    bool have_best = false;
    double best_p = 0.0;
    SolveOutcome best{};
    for (const Eigen::Vector4d& x0 : starts) {
        const SolveOutcome outcome = barrier_solve(x0, problem.g_min, problem.alpha_max);
        const double p = p_succ_closed_form(outcome.x[0], outcome.x[1], outcome.x[2], outcome.x[3]);
        if (!have_best || p > best_p) {
            have_best = true;
            best_p = p;
            best = outcome;
        }
    }

    const double a = best.x[0], r1 = best.x[1], r2 = best.x[2], r3 = best.x[3];
    return {best_p,
            a,
            {r1, r2, r3},
            f_eff_closed_form(a, r1, r2, r3),
            g_eff_closed_form(a, r1, r2, r3),
            best.converged,
            best.iterations};
}

}  // namespace detail

inline OptimizationResult maximize_success(const OptimizationProblem& problem) {
    return detail::solve_problem(problem, {});
}

// One constrained solve per threshold, warm-started from the previous
// optimum (shrunk back into the feasible interior) plus fresh multistarts.
inline std::vector<OptimizationResult> sweep(const OptimizationProblem& base,
                                             const std::vector<double>& g_values) {
    if (g_values.empty())
        throw std::invalid_argument("sweep: empty threshold list");
    for (size_t i = 0; i < g_values.size(); ++i) {
        if (!(g_values[i] > 1.0 && g_values[i] < 2.0))
            throw std::invalid_argument("sweep: thresholds must lie in (1, 2)");
        if (i > 0 && g_values[i] <= g_values[i - 1])
            throw std::invalid_argument("sweep: thresholds must be strictly ascending");
    }

    std::vector<OptimizationResult> results;
    results.reserve(g_values.size());
    bool have_prev = false;
    Eigen::Vector4d prev = Eigen::Vector4d::Zero();
    for (size_t i = 0; i < g_values.size(); ++i) {
        OptimizationProblem problem = base;
        problem.g_min = g_values[i];
        problem.seed = base.seed + static_cast<std::uint64_t>(i) * detail::kPointStride;

        std::vector<Eigen::Vector4d> warm;
        if (have_prev) {
            Eigen::Vector4d x = prev;
            for (int k = 0; k < 500 && !(detail::barrier_value(x, problem.g_min, problem.alpha_max, 0.0)
                                         > -std::numeric_limits<double>::infinity()); ++k)
                x *= 0.95;
            if (detail::barrier_value(x, problem.g_min, problem.alpha_max, 0.0)
                > -std::numeric_limits<double>::infinity())
                warm.push_back(x);
        }

        try {
            results.push_back(detail::solve_problem(problem, warm));
            prev << results.back().alpha_opt, results.back().r_opt[0], results.back().r_opt[1],
                results.back().r_opt[2];
            have_prev = true;
        } catch (const std::exception&) {  // flag the point, keep sweeping
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            results.push_back({nan, nan, {nan, nan, nan}, nan, nan, false, 0});
        }
    }
    return results;
}

}  // namespace stochamp
