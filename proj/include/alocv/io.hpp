#pragma once

#include <Eigen/Dense>
#include <string>

#include "json.hpp"

#include "alocv/risk.hpp"
#include "alocv/types.hpp"

namespace alocv {

/// 17-significant-digit round-trip formatting; CSV and JSON outputs are built
/// from this so repeated runs are byte-identical.
std::string format_double(double v);

/// Dataset CSV: header x_1,...,x_p,y then one row per observation.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

/// Plain numeric matrix, comma separated, no header.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

nlohmann::json fit_result_to_json(const FitResult& fit);
nlohmann::json risk_report_to_json(const RiskReport& report);

/// Per-observation weight table: columns i, w_i, leverage, denominator.
void write_weights_csv(const Eigen::VectorXd& weights, const Eigen::VectorXd& lev,
                       const Eigen::VectorXd& denom, const std::string& path);

}  // namespace alocv
