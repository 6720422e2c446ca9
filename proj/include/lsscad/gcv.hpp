#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lsscad/design.hpp"
#include "lsscad/solver.hpp"

namespace lsscad {

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing, positive

  static LambdaGrid descending(std::vector<double> values) {
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      if (!(values[i] > values[i + 1]))
        throw std::invalid_argument("LambdaGrid: values must be strictly decreasing");
    for (double v : values)
      if (!(v > 0.0)) throw std::invalid_argument("LambdaGrid: values must be positive");
    return LambdaGrid{std::move(values)};
  }
};

struct PathRecord {
  double lambda;
  double gcv;
  double effective_params;
  int support_size;
  bool converged;
};

struct TuningResult {
  FitResult best_fit;
  double best_lambda;
  double best_gcv;
  std::vector<PathRecord> path;
  bool any_converged = true;
};

// Number of effective parameters: tr[X1 (X1'X1 + n D_0)^{-1} X1'] over the
// selected columns, with the unperturbed diagonal (xi = 0).
inline double effective_params(const FitResult& fit, const StandardizedDataset& s) {
  const auto& selected = fit.support.nonzero_indices;
  if (selected.empty()) return 0.0;
  const auto n = s.n();
  const auto k = static_cast<Eigen::Index>(selected.size());
  const PenaltyParams params(fit.lambda, fit.a);

  Matrix X1(n, k);
  Vector beta1(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    X1.col(c) = s.Xs.col(selected[c]);
    beta1(c) = fit.coefficients_std(selected[c]);
  }
  const Matrix gram = X1.transpose() * X1;
  Matrix system = gram;
  system.diagonal() += static_cast<double>(n) * mm_diagonal(beta1, 0.0, params);
  Eigen::LDLT<Matrix> ldlt(system);
  const Matrix sol = ldlt.solve(gram);
  // small selected coefficients make the penalty diagonal dwarf the Gram
  // block, so a raw condition estimate is not meaningful here
  if (ldlt.info() != Eigen::Success || !sol.allFinite())
    throw SingularDesignError("effective_params: singular selected block");
  return sol.trace();
}

// GCV(lambda, a) = (RSS/n) / (1 - p(lambda,a)/n)^2 on the centered scale.
inline double gcv_score(const FitResult& fit, const StandardizedDataset& s) {
  const double dn = static_cast<double>(s.n());
  const double p_eff = effective_params(fit, s);
  if (p_eff >= dn) throw std::runtime_error("gcv_score: saturated model (p(lambda,a) >= n)");
  const double denom = 1.0 - p_eff / dn;
  return (fit.rss / dn) / (denom * denom);
}

// Log-spaced grid from lambda_max = 2 max_j |X_j'y| / n (the smallest lambda at
// which the zero vector is stationary) down to lambda_max * min_ratio. The
// floor is deliberately high: GCV's overfitting bias lives at small lambda,
// and a floor near lambda_max/40 keeps the search inside the range where the
// large coefficients are still unshrunk.
inline LambdaGrid default_grid(const StandardizedDataset& s, int count,
                               double min_ratio = 0.025) {
  if (count < 2) throw std::invalid_argument("default_grid: count must be >= 2");
  const double lambda_max =
      2.0 * (s.Xs.transpose() * s.ys).lpNorm<Eigen::Infinity>() / static_cast<double>(s.n());
  if (!(lambda_max > 0.0)) throw std::runtime_error("default_grid: zero signal (X'y = 0)");
  std::vector<double> values(count);
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * min_ratio);
  for (int i = 0; i < count; ++i)
    values[i] = std::exp(log_max + (log_min - log_max) * static_cast<double>(i) /
                                       static_cast<double>(count - 1));
  return LambdaGrid::descending(std::move(values));
}

// Fit the whole path largest-lambda first with warm starts; return the GCV
// minimizer, ties toward larger lambda.
inline TuningResult tune(const StandardizedDataset& s, const LambdaGrid& grid, double a,
                         const SolverConfig& base) {
  if (grid.values.empty()) throw std::invalid_argument("tune: empty grid");
  TuningResult result;
  result.best_lambda = 0.0;
  result.best_gcv = std::numeric_limits<double>::infinity();
  std::optional<Vector> warm;
  bool have_best = false;
  bool any_converged = false;
  for (double lambda : grid.values) {
    SolverConfig cfg = base;
    cfg.penalty = PenaltyParams(lambda, a);
    cfg.start = warm;
    FitResult fit = fit_scad_standardized(s, cfg);
    warm = fit.coefficients_std;
    const double score = gcv_score(fit, s);
    result.path.push_back({lambda, score, effective_params(fit, s),
                           static_cast<int>(fit.support.nonzero_indices.size()),
                           fit.converged});
    any_converged = any_converged || fit.converged;
    if (!have_best || score < result.best_gcv) {
      have_best = true;
      result.best_gcv = score;
      result.best_lambda = lambda;
      result.best_fit = std::move(fit);
    }
  }
  result.any_converged = any_converged;
  return result;
}

inline TuningResult tune(const Dataset& d, const LambdaGrid& grid, double a,
                         const SolverConfig& base) {
  return tune(standardize(d), grid, a, base);
}

}  // namespace lsscad
