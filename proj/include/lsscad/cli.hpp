#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lsscad/baselines.hpp"
#include "lsscad/diagnostics.hpp"
#include "lsscad/io.hpp"

namespace lsscad {

namespace cli_detail {

inline ResponseSelector parse_selector(const std::string& raw) {
  const auto v = detail::parse_number(raw);
  if (v && *v == static_cast<double>(static_cast<int>(*v)))
    return ResponseSelector{static_cast<int>(*v)};
  return ResponseSelector{raw};
}

inline std::vector<Estimator> parse_estimators(const std::string& raw) {
  std::vector<Estimator> out;
  std::stringstream ss(raw);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "LS") out.push_back(Estimator::LS);
    else if (token == "AIC") out.push_back(Estimator::AIC);
    else if (token == "ORA") out.push_back(Estimator::ORA);
    else if (token == "SCAD") out.push_back(Estimator::SCAD);
    else throw CLI::ValidationError("--estimators", "unknown estimator '" + token + "'");
  }
  if (out.empty()) throw CLI::ValidationError("--estimators", "empty estimator list");
  return out;
}

inline void emit(const json& j, const std::string& output) {
  if (output.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_text(output, j.dump(2) + "\n");
}

}  // namespace cli_detail

// Entry point shared by the binary and the tests.
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"SCAD-penalized least squares: fit, tune, simulate, diagnose"};
  app.require_subcommand(1);

  std::string input, output, response, format = "json";
  double lambda = 0.0, a = 3.7, tau = 1e-5, beta_min = 0.0, rho = 0.0, noise_sd = 1.0;
  double lambda_min_ratio = 0.025;
  int max_iter = 500, grid_size = 50, n = 100, p = 10, reps = 400, k_prefix = -1;
  std::uint64_t seed = 0;
  std::string estimators_raw = "LS,AIC,ORA,SCAD", a_grid_raw, support_raw;

  auto* fit_cmd = app.add_subcommand("fit", "single SCAD fit with standard errors");
  fit_cmd->add_option("--input", input, "CSV input file")->required();
  fit_cmd->add_option("--response", response, "response column (name or zero-based index); default last");
  fit_cmd->add_option("--lambda", lambda, "penalty level")->required();
  fit_cmd->add_option("--a", a, "SCAD shape parameter")->capture_default_str();
  fit_cmd->add_option("--tau", tau, "convergence tolerance")->capture_default_str();
  fit_cmd->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
  fit_cmd->add_option("--output", output, "report path (stdout when omitted)");
  fit_cmd->add_option("--format", format, "json or csv")->capture_default_str();

  auto* tune_cmd = app.add_subcommand("tune", "GCV path over a lambda grid");
  tune_cmd->add_option("--input", input, "CSV input file")->required();
  tune_cmd->add_option("--response", response, "response column (name or zero-based index); default last");
  tune_cmd->add_option("--grid-size", grid_size, "number of lambda grid points")->capture_default_str();
  tune_cmd->add_option("--lambda-min-ratio", lambda_min_ratio, "grid floor as a fraction of lambda_max")->capture_default_str();
  tune_cmd->add_option("--a", a, "SCAD shape parameter")->capture_default_str();
  tune_cmd->add_option("--a-grid", a_grid_raw, "comma-separated a values to search (off by default)");
  tune_cmd->add_option("--tau", tau, "convergence tolerance")->capture_default_str();
  tune_cmd->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();
  tune_cmd->add_option("--output", output, "report path (stdout when omitted)");

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimator comparison");
  sim_cmd->add_option("--n", n, "sample size")->capture_default_str();
  sim_cmd->add_option("--p", p, "covariate count")->capture_default_str();
  sim_cmd->add_option("--rho", rho, "AR(1) correlation")->capture_default_str();
  sim_cmd->add_option("--reps", reps, "replications")->capture_default_str();
  sim_cmd->add_option("--seed", seed, "RNG seed")->required();
  sim_cmd->add_option("--estimators", estimators_raw, "comma-separated subset of LS,AIC,ORA,SCAD")->capture_default_str();
  sim_cmd->add_option("--noise-sd", noise_sd, "noise standard deviation")->capture_default_str();
  sim_cmd->add_option("--tau", tau, "solver tolerance")->capture_default_str();
  sim_cmd->add_option("--grid-size", grid_size, "lambda grid size for SCAD")->capture_default_str();
  sim_cmd->add_option("--lambda-min-ratio", lambda_min_ratio, "lambda grid floor ratio")->capture_default_str();
  sim_cmd->add_option("--output", output, "report path (stdout when omitted)");

  auto* diag_cmd = app.add_subcommand("diagnose", "eigenvalue quantities and condition ratios");
  diag_cmd->add_option("--input", input, "CSV input file")->required();
  diag_cmd->add_option("--response", response, "response column (name or zero-based index); default last");
  auto* support_opt = diag_cmd->add_option("--support", support_raw, "comma-separated nonzero indices");
  auto* k_opt = diag_cmd->add_option("--k", k_prefix, "prefix size of the nonzero block");
  support_opt->excludes(k_opt);
  diag_cmd->add_option("--lambda", lambda, "penalty level")->required();
  diag_cmd->add_option("--beta-min", beta_min, "smallest nonzero |beta_j|")->required();
  diag_cmd->add_option("--output", output, "report path (stdout when omitted)");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (*fit_cmd) {
      std::optional<ResponseSelector> sel;
      if (!response.empty()) sel = cli_detail::parse_selector(response);
      const LoadedDataset loaded = load_dataset(input, sel);
      SolverConfig cfg{PenaltyParams(lambda, a), tau, max_iter};
      const StandardizedDataset s = standardize(loaded.data);
      const FitResult fit = fit_scad_standardized(s, cfg);
      std::optional<CovarianceEstimate> cov;
      if (!fit.support.nonzero_indices.empty()) cov = covariance_estimate(fit, s);
      json j = fit_to_json(fit, cov ? &*cov : nullptr, gcv_score(fit, s));
      j["tau"] = tau;
      j["max_iter"] = max_iter;
      j["input"] = input;
      if (format == "csv" && !output.empty()) {
        write_fit_report(fit, cov ? &*cov : nullptr, loaded.covariate_names, output, "csv",
                         gcv_score(fit, s));
      } else {
        cli_detail::emit(j, output);
      }
      return 0;
    }

    if (*tune_cmd) {
      std::optional<ResponseSelector> sel;
      if (!response.empty()) sel = cli_detail::parse_selector(response);
      const LoadedDataset loaded = load_dataset(input, sel);
      const StandardizedDataset s = standardize(loaded.data);
      const LambdaGrid grid = default_grid(s, grid_size, lambda_min_ratio);
      SolverConfig cfg{PenaltyParams(1.0, a), tau, max_iter};
      std::vector<double> a_values{a};
      if (!a_grid_raw.empty()) {
        a_values.clear();
        std::stringstream ss(a_grid_raw);
        std::string token;
        while (std::getline(ss, token, ',')) a_values.push_back(std::stod(token));
      }
      json j;
      j["grid_size"] = grid_size;
      j["lambda_min_ratio"] = lambda_min_ratio;
      j["tau"] = tau;
      j["max_iter"] = max_iter;
      j["input"] = input;
      json best;
      double best_gcv = std::numeric_limits<double>::infinity();
      json paths = json::array();
      for (double a_value : a_values) {
        const TuningResult tuned = tune(s, grid, a_value, cfg);
        json path = json::array();
        for (const auto& rec : tuned.path)
          path.push_back({{"lambda", rec.lambda},
                          {"gcv", rec.gcv},
                          {"effective_params", rec.effective_params},
                          {"support_size", rec.support_size},
                          {"converged", rec.converged}});
        paths.push_back({{"a", a_value}, {"path", std::move(path)}});
        if (tuned.best_gcv < best_gcv) {
          best_gcv = tuned.best_gcv;
          std::optional<CovarianceEstimate> cov;
          if (!tuned.best_fit.support.nonzero_indices.empty())
            cov = covariance_estimate(tuned.best_fit, s);
          best = fit_to_json(tuned.best_fit, cov ? &*cov : nullptr, tuned.best_gcv);
          if (!tuned.any_converged) best["warning"] = "no grid fit converged";
        }
      }
      j["paths"] = std::move(paths);
      j["best"] = std::move(best);
      cli_detail::emit(j, output);
      return 0;
    }

    if (*sim_cmd) {
      SimulationConfig cfg;
      cfg.n = n;
      cfg.p = p;
      cfg.rho = rho;
      cfg.replications = reps;
      cfg.seed = seed;
      cfg.tau = tau;
      cfg.noise_sd = noise_sd;
      cfg.grid_size = grid_size;
      cfg.lambda_min_ratio = lambda_min_ratio;
      cfg.estimators = cli_detail::parse_estimators(estimators_raw);
      cfg.validate();
      const SimulationReport report = run_replications(cfg);
      cli_detail::emit(simulation_report_to_json(report), output);
      return 0;
    }

    if (*diag_cmd) {
      std::optional<ResponseSelector> sel;
      if (!response.empty()) sel = cli_detail::parse_selector(response);
      const LoadedDataset loaded = load_dataset(input, sel);
      const StandardizedDataset s = standardize(loaded.data);
      const int pcount = static_cast<int>(s.p());
      SupportSplit split;
      if (!support_raw.empty()) {
        std::vector<int> idx;
        std::stringstream ss(support_raw);
        std::string token;
        while (std::getline(ss, token, ',')) {
          const int v = std::stoi(token);
          if (v < 0 || v >= pcount)
            throw CLI::ValidationError("--support", "index " + token + " out of range");
          idx.push_back(v);
        }
        split = SupportSplit::from_nonzero(std::move(idx), pcount);
      } else if (k_prefix >= 0) {
        if (k_prefix > pcount)
          throw CLI::ValidationError("--k", "prefix size exceeds covariate count");
        split = SupportSplit::prefix(k_prefix, pcount);
      } else {
        throw CLI::ValidationError("--support", "one of --support or --k is required");
      }
      const EigenQuantities q = eigen_quantities(s.Xs, split);
      const ConditionReport r = condition_ratios(
          q, lambda, beta_min, static_cast<int>(s.n()), pcount,
          static_cast<int>(split.nonzero_indices.size()));
      json j;
      j["input"] = input;
      j["lambda"] = lambda;
      j["beta_min"] = beta_min;
      j["support"] = split.nonzero_indices;
      j["rho_min"] = q.rho_min;
      if (q.pi_max) j["pi_max"] = *q.pi_max;
      if (q.omega_max) j["omega_max"] = *q.omega_max;
      j["ratios"] = {{"a1a", r.a1a}, {"a1b", r.a1b}, {"a2a", r.a2a},
                     {"a2b", r.a2b}, {"a2c", r.a2c}, {"a3", r.a3}};
      cli_detail::emit(j, output);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace lsscad
