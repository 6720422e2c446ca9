#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "lsscad/design.hpp"
#include "lsscad/solver.hpp"

namespace lsscad {

struct EmptySupportError : std::runtime_error {
  EmptySupportError() : std::runtime_error("no selected coefficients; nothing to infer") {}
};

// Per-observation score contributions for the selected coefficients.
struct ScoreMatrix {
  Matrix U;  // n x k
};

struct CovarianceEstimate {
  Matrix cov;           // k x k, standardized scale
  Vector se;            // standardized scale
  Vector se_original;   // divided by the column scales
  bool clipped_negative_diagonal = false;
};

// U_ij = -X_ij y_i + X_ij (X_i1' beta_1) + beta_j p'(|beta_j|+)/(2 (xi + |beta_j|)),
// so that 2 * colwise sums of U equal the gradient of S_xi at beta_1.
inline ScoreMatrix score_contributions(const FitResult& fit, const StandardizedDataset& s) {
  const auto& selected = fit.support.nonzero_indices;
  if (selected.empty()) throw EmptySupportError();
  const auto n = s.n();
  const auto k = static_cast<Eigen::Index>(selected.size());
  const PenaltyParams params(fit.lambda, fit.a);

  Matrix X1(n, k);
  Vector beta1(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    X1.col(c) = s.Xs.col(selected[c]);
    beta1(c) = fit.coefficients_std(selected[c]);
  }
  const Vector fitted = X1 * beta1;

  ScoreMatrix sm;
  sm.U.resize(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const double penalty_share = beta1(c) *
                                 penalty_right_derivative(std::abs(beta1(c)), params) /
                                 (2.0 * (fit.xi + std::abs(beta1(c))));
    sm.U.col(c) = X1.col(c).cwiseProduct(fitted - s.ys).array() + penalty_share;
  }
  return sm;
}

// Sandwich covariance n (X1'X1 + n D_xi)^{-1} C (X1'X1 + n D_xi)^{-1} with C the
// empirical covariance of the rows of U.
inline CovarianceEstimate covariance_estimate(const FitResult& fit,
                                              const StandardizedDataset& s) {
  const auto& selected = fit.support.nonzero_indices;
  if (selected.empty()) throw EmptySupportError();
  const auto n = s.n();
  const auto k = static_cast<Eigen::Index>(selected.size());
  const double dn = static_cast<double>(n);
  const PenaltyParams params(fit.lambda, fit.a);

  const Matrix U = score_contributions(fit, s).U;
  const Vector colsum = U.colwise().sum();
  Matrix C = (U.transpose() * U) / dn - colsum * colsum.transpose() / (dn * dn);
  C = ((C + C.transpose()) / 2.0).eval();

  Matrix X1(n, k);
  Vector beta1(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    X1.col(c) = s.Xs.col(selected[c]);
    beta1(c) = fit.coefficients_std(selected[c]);
  }
  Matrix bread = X1.transpose() * X1;
  bread.diagonal() += dn * mm_diagonal(beta1, fit.xi, params);
  Eigen::LDLT<Matrix> ldlt(bread);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    throw SingularDesignError("covariance_estimate: singular selected block");
  const Matrix inv = ldlt.solve(Matrix::Identity(k, k));

  CovarianceEstimate est;
  est.cov = dn * inv * C * inv;
  est.se.resize(k);
  est.se_original.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double v = est.cov(c, c);
    if (v < 0.0) {
      v = 0.0;
      est.clipped_negative_diagonal = true;
    }
    est.se(c) = std::sqrt(v);
    est.se_original(c) = est.se(c) / s.column_scales(selected[c]);
  }
  return est;
}

}  // namespace lsscad
