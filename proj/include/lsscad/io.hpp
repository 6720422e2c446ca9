#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lsscad/design.hpp"
#include "lsscad/gcv.hpp"
#include "lsscad/inference.hpp"
#include "lsscad/simulate.hpp"

namespace lsscad {

using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header line
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline std::optional<double> parse_number(const std::string& cell) {
  std::size_t pos = 0;
  try {
    const double v = std::stod(cell, &pos);
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace detail

// Comma-separated numeric table with an optional single header line. A first
// line with any non-numeric cell is taken as the header.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  CsvTable table;
  std::string line;
  int lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const auto& cell : cells) {
      const auto v = detail::parse_number(cell);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (lineno == 1 && table.rows.empty()) {
        table.header.assign(cells.begin(), cells.end());
        width = cells.size();
        continue;
      }
      for (std::size_t c = 0; c < cells.size(); ++c)
        if (!detail::parse_number(cells[c]))
          throw ParseError("non-numeric cell at row " + std::to_string(lineno) + ", column " +
                           std::to_string(c + 1) + ": '" + cells[c] + "'");
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError("ragged row " + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " cells, got " + std::to_string(row.size()));
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw ParseError("no data rows in " + path);
  return table;
}

// Either a zero-based column index or a header name.
using ResponseSelector = std::variant<int, std::string>;

struct LoadedDataset {
  Dataset data;
  std::vector<std::string> covariate_names;
  std::string response_name;
};

inline LoadedDataset load_dataset(const std::string& path,
                                  std::optional<ResponseSelector> selector = std::nullopt) {
  const CsvTable table = read_csv(path);
  const int cols = static_cast<int>(table.rows.front().size());

  int response_col = cols - 1;  // default: last column
  if (selector) {
    if (std::holds_alternative<int>(*selector)) {
      response_col = std::get<int>(*selector);
      if (response_col < 0 || response_col >= cols)
        throw ParseError("response column index " + std::to_string(response_col) +
                         " out of range for " + std::to_string(cols) + " columns");
    } else {
      const std::string& name = std::get<std::string>(*selector);
      response_col = -1;
      for (int c = 0; c < static_cast<int>(table.header.size()); ++c)
        if (table.header[c] == name) response_col = c;
      if (response_col < 0)
        throw ParseError("response column '" + name + "' not found in header");
    }
  }

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Matrix X(n, cols - 1);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int xc = 0;
    for (int c = 0; c < cols; ++c) {
      if (c == response_col)
        y(i) = table.rows[i][c];
      else
        X(i, xc++) = table.rows[i][c];
    }
  }

  LoadedDataset out{Dataset(std::move(X), std::move(y)), {}, ""};
  for (int c = 0; c < cols; ++c) {
    const std::string name =
        c < static_cast<int>(table.header.size()) ? table.header[c] : "x" + std::to_string(c);
    if (c == response_col)
      out.response_name = name;
    else
      out.covariate_names.push_back(name);
  }
  return out;
}

inline json fit_to_json(const FitResult& fit, const CovarianceEstimate* cov,
                        std::optional<double> gcv = std::nullopt) {
  json j;
  j["lambda"] = fit.lambda;
  j["a"] = fit.a;
  j["xi"] = fit.xi;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["intercept"] = fit.intercept;
  j["coefficients"] = std::vector<double>(fit.coefficients.begin(), fit.coefficients.end());
  j["support"] = fit.support.nonzero_indices;
  j["rss"] = fit.rss;
  if (cov) {
    j["se"] = std::vector<double>(cov->se_original.begin(), cov->se_original.end());
    j["se_clipped"] = cov->clipped_negative_diagonal;
  } else {
    j["se"] = json::array();
  }
  if (gcv) j["gcv"] = *gcv;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Structured (JSON) or per-coefficient CSV fit report.
inline void write_fit_report(const FitResult& fit, const CovarianceEstimate* cov,
                             const std::vector<std::string>& names, const std::string& path,
                             const std::string& format,
                             std::optional<double> gcv = std::nullopt) {
  if (format == "json") {
    write_text(path, fit_to_json(fit, cov, gcv).dump(2) + "\n");
    return;
  }
  if (format != "csv") throw std::invalid_argument("unknown report format: " + format);
  std::ostringstream out;
  out << "index,name,estimate,se\n";
  out.precision(17);
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    const std::string name =
        j < static_cast<Eigen::Index>(names.size()) ? names[j] : "x" + std::to_string(j);
    out << j << "," << name << ",";
    if (fit.coefficients(j) == 0.0)
      out << "0";
    else
      out << fit.coefficients(j);
    out << ",";
    if (cov) {
      const auto& sel = fit.support.nonzero_indices;
      const auto it = std::find(sel.begin(), sel.end(), static_cast<int>(j));
      if (it != sel.end()) out << cov->se_original(std::distance(sel.begin(), it));
    }
    out << "\n";
  }
  write_text(path, out.str());
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return json::parse(in);
}

inline json simulation_report_to_json(const SimulationReport& report) {
  json j;
  const auto& c = report.config;
  j["config"] = {{"n", c.n},
                 {"p", c.p},
                 {"rho", c.rho},
                 {"noise_sd", c.noise_sd},
                 {"replications", c.replications},
                 {"seed", c.seed},
                 {"tau", c.tau},
                 {"grid_size", c.grid_size},
                 {"lambda_min_ratio", c.lambda_min_ratio},
                 {"a", 3.7}};
  const Vector beta = c.effective_beta();
  j["config"]["true_beta"] = std::vector<double>(beta.begin(), beta.end());
  j["true_nonzero"] = report.true_nonzero;
  json stats = json::object();
  for (const auto& [name, st] : report.stats) {
    json e;
    e["bias"] = st.bias;
    e["sd"] = st.sd;
    e["k_bar"] = st.k_bar;
    e["k_mode"] = st.k_mode;
    e["exact_support_fraction"] = st.exact_support_fraction;
    e["failures"] = st.failures;
    if (!st.mean_se.empty()) e["mean_se"] = st.mean_se;
    std::vector<double> ame_sorted = st.ame;
    std::sort(ame_sorted.begin(), ame_sorted.end());
    auto quantile = [&](double q) {
      if (ame_sorted.empty()) return 0.0;
      const double pos = q * static_cast<double>(ame_sorted.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const auto hi = std::min(lo + 1, ame_sorted.size() - 1);
      const double frac = pos - static_cast<double>(lo);
      return ame_sorted[lo] * (1.0 - frac) + ame_sorted[hi] * frac;
    };
    e["ame_quantiles"] = {{"q25", quantile(0.25)},
                          {"median", quantile(0.5)},
                          {"q75", quantile(0.75)}};
    e["ame"] = st.ame;
    stats[name] = std::move(e);
  }
  j["estimators"] = std::move(stats);
  return j;
}

}  // namespace lsscad
