#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsscad/baselines.hpp"
#include "lsscad/design.hpp"
#include "lsscad/gcv.hpp"
#include "lsscad/inference.hpp"
#include "lsscad/solver.hpp"

namespace lsscad {

enum class Estimator { LS, AIC, ORA, SCAD };

inline std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::LS: return "LS";
    case Estimator::AIC: return "AIC";
    case Estimator::ORA: return "ORA";
    case Estimator::SCAD: return "SCAD";
  }
  return "?";
}

struct SimulationConfig {
  int n = 100;
  int p = 10;
  double rho = 0.0;
  Vector true_beta;  // empty -> default beta_j = j for j < 4, else 0
  double noise_sd = 1.0;
  int replications = 400;
  std::uint64_t seed = 0;
  double tau = 1e-5;
  int grid_size = 50;
  double lambda_min_ratio = 0.025;
  std::vector<Estimator> estimators = {Estimator::LS, Estimator::AIC, Estimator::ORA,
                                       Estimator::SCAD};

  Vector effective_beta() const {
    if (true_beta.size() > 0) {
      if (true_beta.size() != p)
        throw std::invalid_argument("SimulationConfig: true_beta length must equal p");
      return true_beta;
    }
    Vector beta = Vector::Zero(p);
    for (int j = 0; j < std::min(p, 4); ++j) beta(j) = static_cast<double>(j + 1);
    return beta;
  }

  void validate() const {
    if (n < 2 || p < 1 || p >= n) throw std::invalid_argument("SimulationConfig: need 1 <= p < n");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("SimulationConfig: rho in [0,1)");
    if (replications < 1) throw std::invalid_argument("SimulationConfig: replications >= 1");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("SimulationConfig: noise_sd >= 0");
  }
};

struct EstimatorStats {
  std::vector<double> bias;      // per true-nonzero coefficient, original scale
  std::vector<double> sd;        // empirical sd of those estimates
  double k_bar = 0.0;            // mean zero-count among true-trivial coefficients
  int k_mode = 0;                // mode of the zero-counts, ties to the smallest
  std::vector<double> ame;       // one average model error per replication
  std::vector<double> mean_se;   // SCAD only: mean estimated se per nonzero coefficient
  double exact_support_fraction = 0.0;
  int failures = 0;
};

struct SimulationReport {
  SimulationConfig config;
  std::vector<int> true_nonzero;  // indices with beta_j != 0
  std::map<std::string, EstimatorStats> stats;
};

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-replication stream: the generator state depends only on (seed, index).
inline std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t mix = seed ^ (0x517cc1b727220a95ULL * (index + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(mix)),
                    static_cast<std::uint32_t>(splitmix64(mix) >> 32),
                    static_cast<std::uint32_t>(splitmix64(mix)),
                    static_cast<std::uint32_t>(splitmix64(mix) >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Box-Muller, one draw per call; pairs are cached per generator call site.
class NormalSampler {
 public:
  explicit NormalSampler(std::mt19937_64& gen) : gen_(gen) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(gen_);
    while (u1 <= 0.0) u1 = uniform01(gen_);
    const double u2 = uniform01(gen_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64& gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rng

// Lower-triangular factor of the AR(1) covariance rho^{|j-l|}.
inline Matrix ar1_cholesky(int p, double rho) {
  Matrix sigma(p, p);
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < p; ++l) sigma(j, l) = std::pow(rho, std::abs(j - l));
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ar1_cholesky: covariance not positive definite");
  return llt.matrixL();
}

// Draw one replication's dataset: rows of X i.i.d. N(0, Sigma), y = X beta + noise.
inline std::pair<Dataset, SupportSplit> generate_dataset(const SimulationConfig& config,
                                                         int replication_index) {
  config.validate();
  const Vector beta = config.effective_beta();
  const Matrix L = ar1_cholesky(config.p, config.rho);
  auto gen = rng::replication_stream(config.seed, static_cast<std::uint64_t>(replication_index));
  rng::NormalSampler normal(gen);

  Matrix X(config.n, config.p);
  Vector z(config.p);
  for (int i = 0; i < config.n; ++i) {
    for (int j = 0; j < config.p; ++j) z(j) = normal();
    X.row(i) = (L * z).transpose();
  }
  Vector y(config.n);
  for (int i = 0; i < config.n; ++i) y(i) = X.row(i).dot(beta) + config.noise_sd * normal();

  std::vector<int> nonzero;
  for (int j = 0; j < config.p; ++j)
    if (beta(j) != 0.0) nonzero.push_back(j);
  return {Dataset(std::move(X), std::move(y)),
          SupportSplit::from_nonzero(std::move(nonzero), config.p)};
}

// n^{-1} sum_i [X_i'(beta_hat - beta)]^2 against the replication's own design.
inline double average_model_error(const Matrix& X, const Vector& beta_hat,
                                  const Vector& beta_true) {
  return (X * (beta_hat - beta_true)).squaredNorm() / static_cast<double>(X.rows());
}

namespace detail {

inline int mode_smallest(const std::vector<int>& counts) {
  std::map<int, int> tally;
  for (int c : counts) ++tally[c];
  int mode = 0, best = -1;
  for (const auto& [value, freq] : tally) {
    if (freq > best) {  // map iterates ascending, so ties keep the smallest value
      best = freq;
      mode = value;
    }
  }
  return mode;
}

}  // namespace detail

inline SimulationReport run_replications(const SimulationConfig& config) {
  config.validate();
  const Vector beta = config.effective_beta();
  std::vector<int> true_nonzero, true_zero;
  for (int j = 0; j < config.p; ++j)
    (beta(j) != 0.0 ? true_nonzero : true_zero).push_back(j);
  const auto k = true_nonzero.size();

  struct Accum {
    std::vector<std::vector<double>> estimates;  // per nonzero coef, per replication
    std::vector<int> zero_counts;
    std::vector<double> ame;
    std::vector<std::vector<double>> se;  // SCAD only
    int exact_support = 0;
    int failures = 0;
  };
  std::map<Estimator, Accum> accums;
  for (Estimator e : config.estimators) {
    accums[e].estimates.resize(k);
    accums[e].se.resize(k);
  }

  for (int rep = 0; rep < config.replications; ++rep) {
    auto [dataset, true_support] = generate_dataset(config, rep);

    for (Estimator which : config.estimators) {
      Accum& acc = accums[which];
      try {
        FitResult fit;
        StandardizedDataset std_data;
        if (which == Estimator::LS) {
          fit = ls_estimator(dataset);
        } else if (which == Estimator::AIC) {
          fit = aic_estimator(dataset);
        } else if (which == Estimator::ORA) {
          fit = oracle_estimator(dataset, true_support);
        } else {
          std_data = standardize(dataset);
          SolverConfig solver{PenaltyParams(1.0, 3.7), config.tau};
          const LambdaGrid grid =
              default_grid(std_data, config.grid_size, config.lambda_min_ratio);
          TuningResult tuned = tune(std_data, grid, 3.7, solver);
          fit = std::move(tuned.best_fit);
        }

        // zero count among true-trivial coefficients; LS uses the +-1e-5 band
        int zeros = 0;
        for (int j : true_zero) {
          const double c = fit.coefficients(j);
          if (which == Estimator::LS ? std::abs(c) <= 1e-5 : c == 0.0) ++zeros;
        }
        bool exact = (zeros == static_cast<int>(true_zero.size()));
        for (int j : true_nonzero)
          if (fit.coefficients(j) == 0.0) exact = false;

        for (std::size_t c = 0; c < k; ++c)
          acc.estimates[c].push_back(fit.coefficients(true_nonzero[c]));
        acc.zero_counts.push_back(zeros);
        acc.ame.push_back(average_model_error(dataset.X, fit.coefficients, beta));
        if (exact) ++acc.exact_support;

        if (which == Estimator::SCAD && !fit.support.nonzero_indices.empty()) {
          const CovarianceEstimate cov = covariance_estimate(fit, std_data);
          for (std::size_t c = 0; c < k; ++c) {
            const auto& sel = fit.support.nonzero_indices;
            const auto it = std::find(sel.begin(), sel.end(), true_nonzero[c]);
            if (it != sel.end())
              acc.se[c].push_back(cov.se_original(std::distance(sel.begin(), it)));
          }
        }
      } catch (const std::exception&) {
        ++acc.failures;
      }
    }
  }

  SimulationReport report;
  report.config = config;
  report.true_nonzero = true_nonzero;
  for (Estimator e : config.estimators) {
    const Accum& acc = accums[e];
    EstimatorStats st;
    st.failures = acc.failures;
    const auto reps = acc.zero_counts.size();
    for (std::size_t c = 0; c < k; ++c) {
      const auto& xs = acc.estimates[c];
      double mean = 0.0;
      for (double v : xs) mean += v;
      mean /= std::max<std::size_t>(1, xs.size());
      double var = 0.0;
      for (double v : xs) var += (v - mean) * (v - mean);
      if (xs.size() > 1) var /= static_cast<double>(xs.size() - 1);
      st.bias.push_back(mean - beta(true_nonzero[c]));
      st.sd.push_back(std::sqrt(var));
      if (!acc.se[c].empty()) {
        double se_mean = 0.0;
        for (double v : acc.se[c]) se_mean += v;
        st.mean_se.push_back(se_mean / static_cast<double>(acc.se[c].size()));
      }
    }
    if (reps > 0) {
      double zsum = 0.0;
      for (int z : acc.zero_counts) zsum += z;
      st.k_bar = zsum / static_cast<double>(reps);
      st.k_mode = detail::mode_smallest(acc.zero_counts);
      st.exact_support_fraction = static_cast<double>(acc.exact_support) /
                                  static_cast<double>(reps);
    }
    st.ame = acc.ame;
    report.stats[estimator_name(e)] = std::move(st);
  }
  return report;
}

}  // namespace lsscad
