#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lsscad/solver.hpp"

using namespace lsscad;

namespace {

Dataset gaussian_dataset(int n, int p, const Vector& beta, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Matrix X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = normal(gen);
  Vector y = X * beta;
  for (int i = 0; i < n; ++i) y(i) += normal(gen);
  return Dataset(std::move(X), std::move(y));
}

// n=2 toy with a single conforming column (1,1)' is ruled out by centering,
// so toy cases work on the standardized pieces directly.
StandardizedDataset toy_single_column(double y0, double y1) {
  StandardizedDataset s;
  s.Xs = Matrix(2, 1);
  s.Xs << 1, -1;
  s.ys = Vector(2);
  s.ys << y0, y1;
  s.column_means = Vector::Zero(1);
  s.column_scales = Vector::Ones(1);
  s.y_mean = 0.0;
  return s;
}

}  // namespace

TEST_CASE("compute_xi formula and fallback") {
  Vector b0(3);
  b0 << 0.5, -2.0, 0.0;
  CHECK(compute_xi(b0, 0.1, 1e-5, 100) == doctest::Approx(2.5e-7).epsilon(1e-12));
  CHECK(compute_xi(Vector::Zero(3), 0.1, 1e-5, 100) == doctest::Approx(5e-7).epsilon(1e-12));
  // formula identity: tau = 2 n lambda c and min nonzero 1 gives xi = c
  CHECK(compute_xi(Vector::Ones(2), 0.5, 2.0 * 10 * 0.5 * 0.01, 10) ==
        doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(compute_xi(b0, 0.0, 1e-5, 100), std::invalid_argument);
}

TEST_CASE("mm_step hand cases on a 2-point single-column design") {
  PenaltyParams params(0.1, 3.7);
  Matrix Xs(2, 1);
  Xs << 1, 1;  // X'X = 2, matching the hand-worked system 2b = 2
  Vector ys(2);
  ys << 1, 1;

  // b_k = 1 > a*lambda = 0.37: D entry 0, plain OLS
  CHECK(mm_step(Xs, ys, Vector::Constant(1, 1.0), 0.001, params)(0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // b_k = 0.05: 2/(2 + 2*(0.5*0.1/0.051))
  CHECK(mm_step(Xs, ys, Vector::Constant(1, 0.05), 0.001, params)(0) ==
        doctest::Approx(2.0 / (2.0 + 2.0 * (0.5 * 0.1 / 0.051))).epsilon(1e-12));
  // zero right-hand side
  CHECK(mm_step(Xs, Vector::Zero(2), Vector::Constant(1, 0.05), 0.001, params)(0) ==
        doctest::Approx(0.0));
}

TEST_CASE("converged matches the gradient criterion") {
  PenaltyParams params(0.1, 3.7);
  Matrix Xs(2, 1);
  Xs << 1, 1;
  Vector ys(2);
  ys << 1, 1;
  // residual 0 and penalty gradient 0 beyond a*lambda
  CHECK(converged(Xs, ys, Vector::Constant(1, 1.0), 0.001, params, 1e-5));
  // unpenalized OLS solution satisfies the normal equations
  const Dataset d = gaussian_dataset(40, 3, Vector::Zero(3), 9);
  const StandardizedDataset s = standardize(d);
  const Vector b_ols = ols_solve(s.Xs, s.ys);
  CHECK(converged(s.Xs, s.ys, b_ols, 1e-6, PenaltyParams(0.0, 3.7), 1e-5));
  // perturbing one coordinate by 1 breaks it
  Vector b = b_ols;
  b(1) += 1.0;
  CHECK_FALSE(converged(s.Xs, s.ys, b, 1e-6, PenaltyParams(0.0, 3.7), 1e-5));
}

TEST_CASE("finalize_zeros") {
  PenaltyParams params(0.1, 3.7);
  const double tau = 1e-5;
  const int n = 100;
  Vector b(3);
  b << 0.0, 5.0, 1e-9;
  const double xi = 2.5e-7;
  const Vector out = finalize_zeros(b, xi, params, tau, n);
  // b=0: gap = n*xi*lambda/xi = n*lambda >> tau/2, stays exact 0
  CHECK(out(0) == 0.0);
  // b=5 beyond a*lambda: derivative 0, untouched
  CHECK(out(1) == 5.0);
  // tiny coordinate: gap ~ n*xi*lambda/(xi+1e-9) > tau/2, zeroed
  CHECK(out(2) == 0.0);
  // b_j = xi with p' = lambda: gap = n*xi*lambda/(2*xi) = n*lambda/2, zeroed iff n*lambda > tau
  Vector edge(1);
  edge << xi;
  CHECK(finalize_zeros(edge, xi, params, tau, n)(0) == 0.0);
  CHECK(finalize_zeros(edge, xi, params, 2.0 * n * params.lambda, n)(0) == xi);
}

TEST_CASE("fit_scad: zero response") {
  Matrix X(6, 2);
  X << 1, 0, -1, 1, 2, -2, 0, 1, -2, 0, 0, 0;
  const Dataset d(X, Vector::Zero(6));
  SolverConfig cfg{PenaltyParams(0.1, 3.7)};
  const FitResult fit = fit_scad(d, cfg);
  CHECK(fit.coefficients.isZero(0.0));
  CHECK(fit.intercept == doctest::Approx(0.0));
  CHECK(fit.converged);
}

TEST_CASE("fit_scad: lambda = 0 equals OLS") {
  Vector beta(4);
  beta << 1, -0.5, 0, 2;
  const Dataset d = gaussian_dataset(50, 4, beta, 13);
  SolverConfig cfg{PenaltyParams(0.0, 3.7)};
  const FitResult fit = fit_scad(d, cfg);
  const StandardizedDataset s = standardize(d);
  const Vector b_ols = ols_solve(s.Xs, s.ys);
  auto [coefs, intercept] = destandardize(b_ols, s);
  CHECK((fit.coefficients - coefs).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(fit.intercept == doctest::Approx(intercept).epsilon(1e-10));
  CHECK(fit.objective_trace.size() == static_cast<std::size_t>(fit.iterations) + 1);
}

TEST_CASE("fit_scad recovers a sparse signal and zeroes noise coordinates") {
  Vector beta(6);
  beta << 2, -3, 0, 0, 0, 0;
  const Dataset d = gaussian_dataset(200, 6, beta, 42);
  SolverConfig cfg{PenaltyParams(0.25, 3.7)};
  const FitResult fit = fit_scad(d, cfg);
  CHECK(fit.converged);
  CHECK(fit.coefficients(0) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(fit.coefficients(1) == doctest::Approx(-3.0).epsilon(0.1));
  for (int j = 2; j < 6; ++j) CHECK(fit.coefficients(j) == 0.0);
  // rss recomputable
  const double rss = (d.y.array() - fit.intercept -
                      (d.X * fit.coefficients).array()).matrix().squaredNorm();
  const StandardizedDataset s = standardize(d);
  CHECK(fit.rss == doctest::Approx(rss).epsilon(1e-8));
  // trace length contract
  CHECK(fit.objective_trace.size() == static_cast<std::size_t>(fit.iterations) + 1);
}

TEST_CASE("MM descent along the objective trace") {
  Vector beta(5);
  beta << 1, 0, 0, 2, 0;
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    const Dataset d = gaussian_dataset(80, 5, beta, seed);
    for (double lambda : {0.05, 0.2, 0.5}) {
      SolverConfig cfg{PenaltyParams(lambda, 3.7)};
      const FitResult fit = fit_scad(d, cfg);
      for (std::size_t i = 0; i + 1 < fit.objective_trace.size(); ++i) {
        CHECK(fit.objective_trace[i + 1] <=
              fit.objective_trace[i] + 1e-8 * (1.0 + std::abs(fit.objective_trace[i])));
      }
    }
  }
}

TEST_CASE("orthonormal-design fit matches the univariate prox oracle") {
  // single standardized column: the penalized problem is univariate with z = X'y/n
  for (double z : {0.1, -0.1, 0.3, -0.3, 0.5, -0.5, 1.0, -1.0, 3.0, -3.0}) {
    for (double lambda : {0.05, 0.2, 0.5}) {
      const int n = 2;
      StandardizedDataset s = toy_single_column(z, -z);  // X'y = 2z, so X'y/n = z
      SolverConfig cfg{PenaltyParams(lambda, 3.7)};
      // with one covariate the default xi scales with |z| itself, which inflates
      // the zero threshold far beyond the perturbation's intent; pin it small
      cfg.xi_override = 1e-10;
      const FitResult fit = fit_scad_standardized(s, cfg);
      const PenaltyParams params(lambda, 3.7);
      // oracle minimizes (theta - z)^2 + p(theta), matching Q/n on this design
      const double oracle = univariate_prox_oracle(
          z, params, std::abs(z) + params.a * lambda + 1.0, 1e-4);
      CHECK(std::abs(fit.coefficients_std(0) - oracle) < 1e-3);
      (void)n;
    }
  }
}

TEST_CASE("permutation equivariance") {
  Vector beta(4);
  beta << 1.5, 0, -2, 0;
  const Dataset d = gaussian_dataset(60, 4, beta, 77);
  SolverConfig cfg{PenaltyParams(0.2, 3.7)};
  const FitResult fit = fit_scad(d, cfg);
  // reverse the columns
  Matrix Xr = d.X.rowwise().reverse();
  const FitResult fit_r = fit_scad(Dataset(Xr, d.y), cfg);
  for (int j = 0; j < 4; ++j)
    CHECK(fit_r.coefficients(3 - j) == doctest::Approx(fit.coefficients(j)).epsilon(1e-10));
}

TEST_CASE("support honesty: finalize_zeros is a no-op on the output") {
  Vector beta(5);
  beta << 2, 0, 0, 1, 0;
  const Dataset d = gaussian_dataset(100, 5, beta, 8);
  SolverConfig cfg{PenaltyParams(0.2, 3.7)};
  const FitResult fit = fit_scad(d, cfg);
  const Vector again =
      finalize_zeros(fit.coefficients_std, fit.xi, cfg.penalty, cfg.tau, 100);
  CHECK((again - fit.coefficients_std).lpNorm<Eigen::Infinity>() == 0.0);
  for (int j : fit.support.zero_indices) CHECK(fit.coefficients(j) == 0.0);
  for (int j : fit.support.nonzero_indices) CHECK(fit.coefficients(j) != 0.0);
}

TEST_CASE("large-coefficient fits reduce to OLS on the support") {
  Vector beta(4);
  beta << 3, -4, 5, 2;  // all far beyond a*lambda
  const Dataset d = gaussian_dataset(120, 4, beta, 31);
  SolverConfig cfg{PenaltyParams(0.1, 3.7)};
  const FitResult fit = fit_scad(d, cfg);
  REQUIRE(fit.support.nonzero_indices.size() == 4);
  const StandardizedDataset s = standardize(d);
  const Vector b_ols = ols_solve(s.Xs, s.ys);
  CHECK((fit.coefficients_std - b_ols).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("non-convergence is flagged, not thrown") {
  Vector beta(3);
  beta << 1, 0.4, 0;
  const Dataset d = gaussian_dataset(50, 3, beta, 4);
  SolverConfig cfg{PenaltyParams(0.3, 3.7)};
  cfg.max_iter = 1;
  const FitResult fit = fit_scad(d, cfg);
  CHECK(fit.iterations <= 1);
  // either it genuinely converged in one step or the flag is false
  if (!fit.converged) CHECK(fit.iterations == 1);
}
