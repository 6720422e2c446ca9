#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsscad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DegenerateColumnError : std::runtime_error {
  int column;
  explicit DegenerateColumnError(int col)
      : std::runtime_error("degenerate (constant) column " + std::to_string(col)),
        column(col) {}
};

struct SingularDesignError : std::runtime_error {
  explicit SingularDesignError(const std::string& what) : std::runtime_error(what) {}
};

// Observations: rows of X paired with entries of y. Requires 2 <= n, 1 <= p < n.
struct Dataset {
  Matrix X;
  Vector y;

  Dataset(Matrix X_, Vector y_) : X(std::move(X_)), y(std::move(y_)) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (n < 2) throw std::invalid_argument("Dataset: need at least 2 observations");
    if (p < 1) throw std::invalid_argument("Dataset: need at least 1 covariate");
    if (p >= n) throw std::invalid_argument("Dataset: p < n is required for identification");
    if (y.size() != n) throw std::invalid_argument("Dataset: y length must match rows of X");
    if (!X.allFinite() || !y.allFinite())
      throw std::invalid_argument("Dataset: non-finite entries");
  }

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Centered design with every column scaled to squared norm n, plus the affine
// metadata needed to undo the transform.
struct StandardizedDataset {
  Matrix Xs;
  Vector ys;
  Vector column_means;
  Vector column_scales;
  double y_mean;

  Eigen::Index n() const { return Xs.rows(); }
  Eigen::Index p() const { return Xs.cols(); }
};

// Ordered partition of {0..p-1} into selected (nonzero) and zeroed indices.
struct SupportSplit {
  std::vector<int> nonzero_indices;
  std::vector<int> zero_indices;

  static SupportSplit from_nonzero(std::vector<int> nonzero, int p) {
    std::sort(nonzero.begin(), nonzero.end());
    SupportSplit s;
    s.nonzero_indices = std::move(nonzero);
    std::size_t pos = 0;
    for (int j = 0; j < p; ++j) {
      if (pos < s.nonzero_indices.size() && s.nonzero_indices[pos] == j) {
        ++pos;
      } else {
        s.zero_indices.push_back(j);
      }
    }
    return s;
  }

  // First k indices nontrivial, the rest trivial.
  static SupportSplit prefix(int k, int p) {
    SupportSplit s;
    for (int j = 0; j < k; ++j) s.nonzero_indices.push_back(j);
    for (int j = k; j < p; ++j) s.zero_indices.push_back(j);
    return s;
  }
};

inline StandardizedDataset standardize(const Dataset& d) {
  const auto n = d.n();
  const auto p = d.p();
  StandardizedDataset s;
  s.column_means = d.X.colwise().mean();
  s.Xs = d.X.rowwise() - s.column_means.transpose();
  s.column_scales.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sq = s.Xs.col(j).squaredNorm();
    if (sq <= 1e-24 * static_cast<double>(n)) throw DegenerateColumnError(static_cast<int>(j));
    s.column_scales(j) = std::sqrt(sq / static_cast<double>(n));
    s.Xs.col(j) /= s.column_scales(j);
  }
  s.y_mean = d.y.mean();
  s.ys = d.y.array() - s.y_mean;
  return s;
}

// Map standardized-scale coefficients back to the original scale plus intercept.
// Exact zeros stay exact zeros.
inline std::pair<Vector, double> destandardize(const Vector& coefs_std,
                                               const StandardizedDataset& s) {
  Vector coefs = Vector::Zero(coefs_std.size());
  for (Eigen::Index j = 0; j < coefs_std.size(); ++j) {
    if (coefs_std(j) != 0.0) coefs(j) = coefs_std(j) / s.column_scales(j);
  }
  const double intercept = s.y_mean - s.column_means.dot(coefs);
  return {coefs, intercept};
}

// Least squares via a rank-revealing QR of the design; no ridge fallback.
inline Vector ols_solve(const Matrix& X, const Vector& y) {
  if (X.cols() >= X.rows())
    throw SingularDesignError("ols_solve: requires fewer covariates than observations");
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  if (qr.rank() < X.cols())
    throw SingularDesignError("ols_solve: rank-deficient design");
  return qr.solve(y);
}

}  // namespace lsscad
