#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsscad/penalty.hpp"

using namespace lsscad;

namespace {

// Simpson quadrature of f over [lo, hi]; test-side oracle, independent of the
// closed-form integral in the library.
template <typename F>
double simpson(F f, double lo, double hi, int intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

double perturbed_penalty_quadrature(double b, double xi, const PenaltyParams& params) {
  const double t = std::abs(b);
  const double integral =
      simpson([&](double s) { return penalty_right_derivative(s, params) / (xi + s); }, 0.0, t);
  return penalty(b, params) - xi * integral;
}

}  // namespace

TEST_CASE("penalty branch values") {
  PenaltyParams params(1.0, 3.7);
  CHECK(penalty(0.0, params) == 0.0);
  CHECK(penalty(0.5, params) == doctest::Approx(0.5).epsilon(1e-14));
  // middle branch, hand-evaluated: -(4 - 14.8 + 1)/5.4
  CHECK(penalty(2.0, params) == doctest::Approx(9.8 / 5.4).epsilon(1e-14));
  // constant branch: (a+1) lambda^2 / 2
  CHECK(penalty(5.0, params) == doctest::Approx(2.35).epsilon(1e-14));
}

TEST_CASE("penalty middle branch agrees with integrating the derivative") {
  PenaltyParams params(1.0, 3.7);
  const double integral =
      simpson([&](double s) { return penalty_right_derivative(s, params); }, 0.0, 2.0);
  CHECK(penalty(2.0, params) == doctest::Approx(integral).epsilon(1e-10));
}

TEST_CASE("penalty is even, nondecreasing in |theta|, and bounded") {
  PenaltyParams params(0.8, 3.7);
  const double cap = (params.a + 1.0) * params.lambda * params.lambda / 2.0;
  double prev = 0.0;
  for (double t = 0.0; t <= 6.0; t += 0.01) {
    const double v = penalty(t, params);
    CHECK(penalty(-t, params) == v);
    CHECK(v >= prev - 1e-14);  // branch arithmetic can wobble in the last ulp
    CHECK(v <= cap + 1e-15);
    prev = v;
  }
}

TEST_CASE("knot continuity at machine scale") {
  for (double lambda : {0.3, 1.0, 2.5}) {
    PenaltyParams params(lambda, 3.7);
    const double at_lam_left = lambda * lambda;
    const double at_lam_right =
        -(lambda * lambda - 2.0 * params.a * lambda * lambda + lambda * lambda) /
        (2.0 * (params.a - 1.0));
    CHECK(at_lam_left == doctest::Approx(at_lam_right).epsilon(1e-12));
    const double alam = params.a * lambda;
    const double at_alam_mid =
        -(alam * alam - 2.0 * params.a * lambda * alam + lambda * lambda) /
        (2.0 * (params.a - 1.0));
    const double at_alam_flat = (params.a + 1.0) * lambda * lambda / 2.0;
    CHECK(at_alam_mid == doctest::Approx(at_alam_flat).epsilon(1e-12));
    // and through the public function just inside each side of the knots
    const double eps = 1e-9;
    CHECK(penalty(lambda - eps, params) ==
          doctest::Approx(penalty(lambda + eps, params)).epsilon(1e-7));
    CHECK(penalty(alam - eps, params) ==
          doctest::Approx(penalty(alam + eps, params)).epsilon(1e-7));
  }
}

TEST_CASE("right derivative values and knot convention") {
  PenaltyParams params(1.0, 3.7);
  CHECK(penalty_right_derivative(0.0, params) == 1.0);
  CHECK(penalty_right_derivative(2.0, params) == doctest::Approx(1.7 / 2.7).epsilon(1e-14));
  CHECK(penalty_right_derivative(5.0, params) == 0.0);
  // |theta| = lambda: both branch formulas give lambda
  CHECK(penalty_right_derivative(1.0, params) == doctest::Approx(1.0).epsilon(1e-14));
  // |theta| = a*lambda: right limit is 0
  CHECK(penalty_right_derivative(3.7, params) == 0.0);
}

TEST_CASE("right derivative matches forward finite differences away from knots") {
  PenaltyParams params(1.0, 3.7);
  const double h = 1e-7;
  for (double t = 0.0; t <= 5.0; t += 0.0137) {
    if (std::abs(t - 1.0) < 1e-6 || std::abs(t - 3.7) < 1e-6) continue;
    if (t + h > 1.0 && t < 1.0) continue;  // step would cross a knot
    if (t + h > 3.7 && t < 3.7) continue;
    const double fd = (penalty(t + h, params) - penalty(t, params)) / h;
    CHECK(std::abs(penalty_right_derivative(t, params) - fd) < 1e-5);
  }
}

TEST_CASE("perturbed gradient: origin, large values, hand value") {
  PenaltyParams params(1.0, 3.7);
  CHECK(perturbed_gradient(0.0, 0.001, params) == 0.0);
  CHECK(perturbed_gradient(5.0, 0.001, params) == 0.0);
  CHECK(perturbed_gradient(0.5, 0.001, params) == doctest::Approx(0.5 / 0.501).epsilon(1e-12));
  // odd function
  for (double b : {0.2, 0.9, 1.7, 3.0}) {
    CHECK(perturbed_gradient(-b, 0.001, params) ==
          doctest::Approx(-perturbed_gradient(b, 0.001, params)).epsilon(1e-14));
  }
}

TEST_CASE("perturbed gradient agrees with central differences of the quadrature penalty") {
  PenaltyParams params(1.0, 3.7);
  const double xi = 0.01;
  const double h = 1e-5;
  for (double b : {0.3, 0.7, 1.5, 2.5, 3.2, -0.4, -2.0}) {
    const double fd = (perturbed_penalty_quadrature(b + h, xi, params) -
                       perturbed_penalty_quadrature(b - h, xi, params)) /
                      (2.0 * h);
    CHECK(std::abs(perturbed_gradient(b, xi, params) - fd) < 1e-6);
  }
}

TEST_CASE("closed-form perturbed penalty matches quadrature") {
  PenaltyParams params(0.7, 3.7);
  const double xi = 0.005;
  for (double b : {0.0, 0.1, 0.5, 0.7, 1.3, 2.59, 4.0, -1.1}) {
    CHECK(perturbed_penalty(b, xi, params) ==
          doctest::Approx(perturbed_penalty_quadrature(b, xi, params)).epsilon(1e-9));
  }
}

TEST_CASE("lambda = 0 degenerates to the zero penalty") {
  PenaltyParams params(0.0, 3.7);
  for (double t : {0.0, 0.3, 1.0, 10.0}) {
    CHECK(penalty(t, params) == 0.0);
    CHECK(penalty_right_derivative(t, params) == 0.0);
    CHECK(perturbed_gradient(t, 0.01, params) == 0.0);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PenaltyParams(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(PenaltyParams(-0.1, 3.7), std::invalid_argument);
  CHECK_NOTHROW(PenaltyParams(0.0, 2.1));
}

TEST_CASE("univariate prox oracle") {
  PenaltyParams params(1.0, 3.7);
  CHECK(univariate_prox_oracle(0.0, params, 5.0, 1e-4) == 0.0);
  // flat penalty beyond a*lambda: large z is unshrunk
  CHECK(univariate_prox_oracle(10.0, params, 14.0, 1e-3) == doctest::Approx(10.0).epsilon(1e-3));
  // small z is thresholded to zero
  CHECK(std::abs(univariate_prox_oracle(0.4, params, 5.0, 1e-4)) <= 1e-4);
  CHECK_THROWS_AS(univariate_prox_oracle(10.0, params, 5.0, 1e-4), std::invalid_argument);
}
