#include "alocv/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "alocv/errors.hpp"

namespace alocv {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  for (Index j = 0; j < data.p(); ++j) out << "x_" << (j + 1) << ",";
  out << "y\n";
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) out << format_double(data.x(i, j)) << ",";
    out << format_double(data.y[i]) << "\n";
  }
}

namespace {

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      vals.push_back(std::stod(cell));
    } catch (...) {
      throw InvalidInput("not a number: '" + cell + "'");
    }
  }
  return vals;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty dataset file: " + path);

  // header is x_1..x_p,y; accept any names but require >= 2 columns
  Index cols = static_cast<Index>(std::count(line.begin(), line.end(), ',')) + 1;
  if (cols < 2) throw InvalidInput("dataset needs at least one feature column and y");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto vals = parse_row(line);
    if (static_cast<Index>(vals.size()) != cols)
      throw InvalidInput("ragged row in " + path);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw InvalidInput("no data rows in " + path);

  Dataset data;
  data.x.resize(static_cast<Index>(rows.size()), cols - 1);
  data.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j + 1 < cols; ++j) data.x(static_cast<Index>(i), j) = rows[i][j];
    data.y[static_cast<Index>(i)] = rows[i][cols - 1];
  }
  validate(data);
  return data;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line));
    if (rows.back().size() != rows.front().size()) throw InvalidInput("ragged matrix in " + path);
  }
  if (rows.empty()) throw InvalidInput("empty matrix file: " + path);
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

nlohmann::json fit_result_to_json(const FitResult& fit) {
  nlohmann::json j;
  j["coefficients"] = std::vector<double>(fit.b_hat.begin(), fit.b_hat.end());
  j["active_set"] = fit.active_set;
  j["active_groups"] = fit.active_groups;
  j["kkt_residual"] = fit.kkt_residual;
  j["iterations"] = fit.iterations;
  j["certified"] = fit.certified;
  return j;
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

nlohmann::json risk_report_to_json(const RiskReport& report) {
  nlohmann::json j;
  j["alo"] = report.alo;
  j["loo"] = opt_json(report.loo);
  j["mf_sigma"] = opt_json(report.mf_sigma);
  j["mf_df"] = opt_json(report.mf_df);
  j["mf_hat"] = opt_json(report.mf_hat);
  j["weights_alo"] = std::vector<double>(report.weights_alo.begin(), report.weights_alo.end());
  j["weight_mf"] = opt_json(report.weight_mf);
  j["weight_df_ratio"] = opt_json(report.weight_df_ratio);
  j["weight_hat_ratio"] = opt_json(report.weight_hat_ratio);
  j["discrepancy_sq"] = opt_json(report.discrepancy_sq);
  if (report.rem)
    j["rem"] = std::vector<double>(report.rem->begin(), report.rem->end());
  else
    j["rem"] = nullptr;
  j["rem_sumsq"] = opt_json(report.rem_sumsq);
  return j;
}

void write_weights_csv(const Eigen::VectorXd& weights, const Eigen::VectorXd& lev,
                       const Eigen::VectorXd& denom, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  out << "i,w_i,leverage,denominator\n";
  for (Index i = 0; i < weights.size(); ++i)
    out << i << "," << format_double(weights[i]) << "," << format_double(lev[i]) << ","
        << format_double(denom[i]) << "\n";
}

}  // namespace alocv
