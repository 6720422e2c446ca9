#pragma once

#include <cmath>
#include <stdexcept>

namespace lsscad {

// SCAD penalty parameters. Requires a > 2; lambda = 0 degenerates to no penalty.
struct PenaltyParams {
  double lambda;
  double a;

  PenaltyParams(double lambda_, double a_) : lambda(lambda_), a(a_) {
    if (!(a > 2.0)) throw std::invalid_argument("PenaltyParams: a must be > 2");
    if (!(lambda >= 0.0)) throw std::invalid_argument("PenaltyParams: lambda must be >= 0");
  }
};

// Piecewise SCAD penalty value. Even in theta, flat at (a+1)*lambda^2/2 beyond a*lambda.
inline double penalty(double theta, const PenaltyParams& params) {
  const double lam = params.lambda;
  const double a = params.a;
  const double t = std::abs(theta);
  if (t <= lam) return lam * t;
  if (t <= a * lam) return -(t * t - 2.0 * a * lam * t + lam * lam) / (2.0 * (a - 1.0));
  return (a + 1.0) * lam * lam / 2.0;
}

// Right derivative p'(|theta|+): lambda on [0, lambda), (a*lambda - |theta|)/(a-1)
// on [lambda, a*lambda), 0 from a*lambda on. The two formulas agree at |theta| = lambda.
inline double penalty_right_derivative(double theta_abs, const PenaltyParams& params) {
  const double lam = params.lambda;
  const double a = params.a;
  if (theta_abs < lam) return lam;
  if (theta_abs < a * lam) return (a * lam - theta_abs) / (a - 1.0);
  return 0.0;
}

// Derivative of the perturbed penalty p_{lambda,xi}: b * p'(|b|+) / (xi + |b|).
// Odd in b, zero at the origin.
inline double perturbed_gradient(double b, double xi, const PenaltyParams& params) {
  if (b == 0.0) return 0.0;
  return b * penalty_right_derivative(std::abs(b), params) / (xi + std::abs(b));
}

// Perturbed penalty p_{lambda,xi}(b) = p_lambda(b) - xi * int_0^{|b|} p'(t)/(xi+t) dt,
// with the integral evaluated in closed form per branch.
inline double perturbed_penalty(double b, double xi, const PenaltyParams& params) {
  const double lam = params.lambda;
  const double a = params.a;
  const double t = std::abs(b);
  if (lam == 0.0) return 0.0;
  // integral of p'(s)/(xi+s) over [0, min(t, lam)]
  double integral = 0.0;
  const double t1 = std::min(t, lam);
  integral += lam * std::log((xi + t1) / xi);
  if (t > lam) {
    // on [lam, min(t, a*lam)]: p'(s) = ((a*lam + xi) - (xi + s)) / (a - 1)
    const double t2 = std::min(t, a * lam);
    integral += ((a * lam + xi) * std::log((xi + t2) / (xi + lam)) - (t2 - lam)) / (a - 1.0);
  }
  return penalty(b, params) - xi * integral;
}

// Brute-force global minimizer of g(theta) = (theta - z)^2 + p_lambda(theta; a)
// over a symmetric grid. Ties go to the smaller |theta|. Test oracle only.
inline double univariate_prox_oracle(double z, const PenaltyParams& params,
                                     double grid_halfwidth, double grid_step) {
  if (grid_halfwidth < std::abs(z) + params.a * params.lambda)
    throw std::invalid_argument("univariate_prox_oracle: grid does not bracket the minimizer");
  double best_theta = 0.0;
  double best_val = z * z + penalty(0.0, params);
  const long steps = static_cast<long>(grid_halfwidth / grid_step);
  for (long i = -steps; i <= steps; ++i) {
    const double theta = static_cast<double>(i) * grid_step;
    const double val = (theta - z) * (theta - z) + penalty(theta, params);
    if (val < best_val - 1e-15 ||
        (std::abs(val - best_val) <= 1e-15 && std::abs(theta) < std::abs(best_theta))) {
      best_val = val;
      best_theta = theta;
    }
  }
  return best_theta;
}

}  // namespace lsscad
