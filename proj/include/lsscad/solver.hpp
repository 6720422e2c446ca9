#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "lsscad/design.hpp"
#include "lsscad/penalty.hpp"

namespace lsscad {

struct SolverConfig {
  PenaltyParams penalty;
  double tau = 1e-5;
  int max_iter = 500;
  std::optional<double> xi_override;
  // optional warm start on the standardized scale
  std::optional<Vector> start;
};

struct FitResult {
  Vector coefficients;        // original scale, exact zeros off-support
  double intercept = 0.0;
  SupportSplit support;
  Vector coefficients_std;    // standardized scale, same support
  int iterations = 0;
  bool converged = false;
  double xi = 0.0;
  double lambda = 0.0;
  double a = 3.7;
  double rss = 0.0;           // on the centered/standardized scale
  std::vector<double> objective_trace;
};

// Hunter-Li perturbation constant: tau/(2 n lambda) * min nonzero |b0_j|,
// falling back to tau/(2 n lambda) when b0 is identically zero.
inline double compute_xi(const Vector& b0, double lambda, double tau, Eigen::Index n) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("compute_xi: lambda must be positive");
  double min_abs = 0.0;
  for (Eigen::Index j = 0; j < b0.size(); ++j) {
    const double v = std::abs(b0(j));
    if (v > 0.0 && (min_abs == 0.0 || v < min_abs)) min_abs = v;
  }
  const double base = tau / (2.0 * static_cast<double>(n) * lambda);
  return min_abs > 0.0 ? base * min_abs : base;
}

// Diagonal of D_xi(b): (1/2) p'(|b_j|+) / (xi + |b_j|).
inline Vector mm_diagonal(const Vector& b, double xi, const PenaltyParams& params) {
  Vector d(b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j)
    d(j) = 0.5 * penalty_right_derivative(std::abs(b(j)), params) / (xi + std::abs(b(j)));
  return d;
}

// One MM update: b_{k+1} = (X'X + n D_xi(b_k))^{-1} X'y.
inline Vector mm_step(const Matrix& Xs, const Vector& ys, const Vector& b_k, double xi,
                      const PenaltyParams& params) {
  const auto n = Xs.rows();
  Matrix system = Xs.transpose() * Xs;
  system.diagonal() += static_cast<double>(n) * mm_diagonal(b_k, xi, params);
  Eigen::LDLT<Matrix> ldlt(system);
  const Vector rhs = Xs.transpose() * ys;
  const Vector sol = ldlt.solve(rhs);
  // the ridge diagonal can dwarf X'X, so judge the solve by its residual
  // rather than a raw condition number
  if (ldlt.info() != Eigen::Success || !sol.allFinite() ||
      (system * sol - rhs).norm() > 1e-6 * (rhs.norm() + 1.0))
    throw SingularDesignError(
        "mm_step: X'X + n*D singular; increase lambda or inspect collinearity");
  return sol;
}

// Gradient of the perturbed objective Q_{n,xi} at b.
inline Vector perturbed_objective_gradient(const Matrix& Xs, const Vector& ys, const Vector& b,
                                           double xi, const PenaltyParams& params) {
  const Vector residual = ys - Xs * b;
  Vector grad = -2.0 * (Xs.transpose() * residual);
  for (Eigen::Index j = 0; j < b.size(); ++j)
    grad(j) += static_cast<double>(Xs.rows()) * perturbed_gradient(b(j), xi, params);
  return grad;
}

inline bool converged(const Matrix& Xs, const Vector& ys, const Vector& b, double xi,
                      const PenaltyParams& params, double tau) {
  return perturbed_objective_gradient(Xs, ys, b, xi, params).lpNorm<Eigen::Infinity>() <
         tau / 2.0;
}

// Perturbed objective Q_{n,xi}(b), closed-form penalty integral.
inline double perturbed_objective(const Matrix& Xs, const Vector& ys, const Vector& b, double xi,
                                  const PenaltyParams& params) {
  double value = (ys - Xs * b).squaredNorm();
  for (Eigen::Index j = 0; j < b.size(); ++j)
    value += static_cast<double>(Xs.rows()) * perturbed_penalty(b(j), xi, params);
  return value;
}

// Post-convergence zeroing: kill coordinates where the gap between the perturbed
// and exact penalty gradients, n*xi*p'(|b_j|+)/(xi+|b_j|), exceeds tau/2.
inline Vector finalize_zeros(const Vector& b, double xi, const PenaltyParams& params, double tau,
                             Eigen::Index n) {
  Vector out = b;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double gap = static_cast<double>(n) * xi *
                       penalty_right_derivative(std::abs(b(j)), params) / (xi + std::abs(b(j)));
    if (gap > tau / 2.0) out(j) = 0.0;
  }
  return out;
}

namespace detail {

inline FitResult package_fit(const Vector& b_std, const StandardizedDataset& s, int iterations,
                             bool converged_flag, double xi, const PenaltyParams& params,
                             std::vector<double> trace) {
  FitResult fit;
  fit.coefficients_std = b_std;
  std::vector<int> nonzero;
  for (Eigen::Index j = 0; j < b_std.size(); ++j)
    if (b_std(j) != 0.0) nonzero.push_back(static_cast<int>(j));
  fit.support = SupportSplit::from_nonzero(std::move(nonzero), static_cast<int>(b_std.size()));
  auto [coefs, intercept] = destandardize(b_std, s);
  fit.coefficients = std::move(coefs);
  fit.intercept = intercept;
  fit.iterations = iterations;
  fit.converged = converged_flag;
  fit.xi = xi;
  fit.lambda = params.lambda;
  fit.a = params.a;
  fit.rss = (s.ys - s.Xs * b_std).squaredNorm();
  fit.objective_trace = std::move(trace);
  return fit;
}

}  // namespace detail

// Solve on an already standardized dataset; coefficients come back on both scales.
inline FitResult fit_scad_standardized(const StandardizedDataset& s, const SolverConfig& config) {
  const auto n = s.n();
  const PenaltyParams& params = config.penalty;

  const Vector b_ols = ols_solve(s.Xs, s.ys);

  if (params.lambda == 0.0) {
    // unpenalized: plain least squares
    return detail::package_fit(b_ols, s, 0, true, 0.0, params,
                               {(s.ys - s.Xs * b_ols).squaredNorm()});
  }

  Vector b = config.start.value_or(b_ols);
  const double xi = config.xi_override.value_or(compute_xi(b_ols, params.lambda, config.tau, n));

  std::vector<double> trace;
  trace.push_back(perturbed_objective(s.Xs, s.ys, b, xi, params));
  bool done = converged(s.Xs, s.ys, b, xi, params, config.tau);
  int iter = 0;
  while (!done && iter < config.max_iter) {
    b = mm_step(s.Xs, s.ys, b, xi, params);
    ++iter;
    trace.push_back(perturbed_objective(s.Xs, s.ys, b, xi, params));
    done = converged(s.Xs, s.ys, b, xi, params, config.tau);
  }

  b = finalize_zeros(b, xi, params, config.tau, n);
  return detail::package_fit(b, s, iter, done, xi, params, std::move(trace));
}

inline FitResult fit_scad(const Dataset& d, const SolverConfig& config) {
  return fit_scad_standardized(standardize(d), config);
}

}  // namespace lsscad
