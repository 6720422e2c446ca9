#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lsscad/design.hpp"
#include "lsscad/solver.hpp"

namespace lsscad {

namespace detail {

// OLS restricted to the given columns of a standardized dataset, packaged as a
// FitResult with exact zeros elsewhere.
inline FitResult restricted_ols(const StandardizedDataset& s, const std::vector<int>& columns) {
  Vector b_std = Vector::Zero(s.p());
  if (!columns.empty()) {
    Matrix X1(s.n(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) X1.col(c) = s.Xs.col(columns[c]);
    const Vector b1 = ols_solve(X1, s.ys);
    for (std::size_t c = 0; c < columns.size(); ++c) b_std(columns[c]) = b1(c);
  }
  return package_fit(b_std, s, 0, true, 0.0, PenaltyParams(0.0, 3.7), {});
}

}  // namespace detail

// Ordinary least squares on every covariate.
inline FitResult ls_estimator(const Dataset& d) {
  const StandardizedDataset s = standardize(d);
  std::vector<int> all(d.p());
  for (int j = 0; j < static_cast<int>(d.p()); ++j) all[j] = j;
  return detail::restricted_ols(s, all);
}

// The infeasible oracle: OLS on the known true support.
inline FitResult oracle_estimator(const Dataset& d, const SupportSplit& true_support) {
  return detail::restricted_ols(standardize(d), true_support.nonzero_indices);
}

namespace detail {

inline double subset_rss(const Matrix& gram, const Vector& xty, double yty,
                         const std::vector<int>& columns) {
  if (columns.empty()) return yty;
  const auto k = static_cast<Eigen::Index>(columns.size());
  Matrix g(k, k);
  Vector v(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    v(r) = xty(columns[r]);
    for (Eigen::Index c = 0; c < k; ++c) g(r, c) = gram(columns[r], columns[c]);
  }
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    return std::numeric_limits<double>::quiet_NaN();
  return yty - v.dot(ldlt.solve(v));
}

inline double aic_of(double rss, double n, int k) {
  return n * std::log(std::max(rss, 1e-300) / n) + 2.0 * k;
}

}  // namespace detail

// Best-AIC OLS: AIC = n ln(RSS/n) + 2k on centered data. Exhaustive over all
// subsets for p <= 15; forward selection with backward elimination passes above.
inline FitResult aic_estimator(const Dataset& d) {
  const StandardizedDataset s = standardize(d);
  const int p = static_cast<int>(d.p());
  const double n = static_cast<double>(d.n());
  const Matrix gram = s.Xs.transpose() * s.Xs;
  const Vector xty = s.Xs.transpose() * s.ys;
  const double yty = s.ys.squaredNorm();

  std::vector<int> best;
  double best_aic = detail::aic_of(yty, n, 0);

  if (p <= 15) {
    std::vector<int> subset;
    for (unsigned mask = 1; mask < (1u << p); ++mask) {
      subset.clear();
      for (int j = 0; j < p; ++j)
        if (mask & (1u << j)) subset.push_back(j);
      const double rss = detail::subset_rss(gram, xty, yty, subset);
      if (std::isnan(rss)) continue;  // singular subset
      const double aic = detail::aic_of(rss, n, static_cast<int>(subset.size()));
      if (aic < best_aic) {
        best_aic = aic;
        best = subset;
      }
    }
  } else {
    std::vector<bool> in(p, false);
    std::vector<int> current;
    bool improved = true;
    while (improved) {
      improved = false;
      // forward: best single addition
      int add = -1;
      double add_aic = best_aic;
      for (int j = 0; j < p; ++j) {
        if (in[j]) continue;
        std::vector<int> trial = current;
        trial.push_back(j);
        std::sort(trial.begin(), trial.end());
        const double rss = detail::subset_rss(gram, xty, yty, trial);
        if (std::isnan(rss)) continue;
        const double aic = detail::aic_of(rss, n, static_cast<int>(trial.size()));
        if (aic < add_aic) {
          add_aic = aic;
          add = j;
        }
      }
      if (add >= 0) {
        in[add] = true;
        current.push_back(add);
        std::sort(current.begin(), current.end());
        best_aic = add_aic;
        improved = true;
      }
      // backward: best single removal
      int drop = -1;
      double drop_aic = best_aic;
      for (std::size_t idx = 0; idx < current.size(); ++idx) {
        std::vector<int> trial = current;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(idx));
        const double rss = detail::subset_rss(gram, xty, yty, trial);
        if (std::isnan(rss)) continue;
        const double aic = detail::aic_of(rss, n, static_cast<int>(trial.size()));
        if (aic < drop_aic) {
          drop_aic = aic;
          drop = current[idx];
        }
      }
      if (drop >= 0) {
        in[drop] = false;
        current.erase(std::find(current.begin(), current.end(), drop));
        best_aic = drop_aic;
        improved = true;
      }
    }
    best = current;
  }

  return detail::restricted_ols(s, best);
}

}  // namespace lsscad
