#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "lsscad/design.hpp"

namespace lsscad {

// Extreme eigenvalues of the scaled Gram blocks: rho_min of n^{-1} X'X,
// pi_max of n^{-1} X1'X1, omega_max of n^{-1} X2'X2.
struct EigenQuantities {
  double rho_min = 0.0;
  std::optional<double> pi_max;     // absent when the nonzero block is empty
  std::optional<double> omega_max;  // absent when the zero block is empty
};

// The six condition ratios, reported raw with no verdict.
struct ConditionReport {
  double a1a;  // sqrt(k) * lambda / sqrt(rho)
  double a1b;  // sqrt(p) / sqrt(n * rho)
  double a2a;  // a1a / beta_min
  double a2b;  // a1b / beta_min
  double a2c;  // sqrt(p / n) / rho
  double a3;   // sqrt(max(pi, omega) * p) / (sqrt(n) * rho * lambda)
};

inline EigenQuantities eigen_quantities(const Matrix& Xs, const SupportSplit& split) {
  const double n = static_cast<double>(Xs.rows());
  EigenQuantities q;
  {
    const Matrix gram = Xs.transpose() * Xs / n;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    q.rho_min = es.eigenvalues().minCoeff();
  }
  auto block_max = [&](const std::vector<int>& cols) -> std::optional<double> {
    if (cols.empty()) return std::nullopt;
    Matrix Xb(Xs.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Xb.col(c) = Xs.col(cols[c]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Xb.transpose() * Xb / n, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  };
  q.pi_max = block_max(split.nonzero_indices);
  q.omega_max = block_max(split.zero_indices);
  return q;
}

inline ConditionReport condition_ratios(const EigenQuantities& q, double lambda,
                                        double beta_min, int n, int p, int k) {
  if (!(q.rho_min > 0.0))
    throw SingularDesignError("condition_ratios: degenerate design (rho_min <= 0)");
  if (!(lambda > 0.0)) throw std::invalid_argument("condition_ratios: lambda must be positive");
  if (!(beta_min > 0.0))
    throw std::invalid_argument("condition_ratios: beta_min must be positive");
  const double rho = q.rho_min;
  const double dn = static_cast<double>(n);
  const double dp = static_cast<double>(p);
  double block = 0.0;
  if (q.pi_max) block = std::max(block, *q.pi_max);
  if (q.omega_max) block = std::max(block, *q.omega_max);
  ConditionReport r;
  r.a1a = std::sqrt(static_cast<double>(k)) * lambda / std::sqrt(rho);
  r.a1b = std::sqrt(dp) / std::sqrt(dn * rho);
  r.a2a = r.a1a / beta_min;
  r.a2b = r.a1b / beta_min;
  r.a2c = std::sqrt(dp / dn) / rho;
  r.a3 = std::sqrt(block * dp) / (std::sqrt(dn) * rho * lambda);
  return r;
}

}  // namespace lsscad
