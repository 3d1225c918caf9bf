#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "elmsol/dataset.hpp"

namespace elmsol {

// ---------------------------------------------------------------------------
// Leverage / Williams plot

/// Projection U (U^T U)^-1 U^T onto the column space of U, formed as Q Q^T
/// from a column-pivoted Householder QR (no normal-equation inverse).
/// Throws ShapeError when rows < cols, RankError (with the numerical rank)
/// when U is rank deficient.
Eigen::MatrixXd hat_matrix(const Eigen::MatrixXd& design);

/// diag(H) as squared row norms of the thin Q factor; O(N p) memory.
Eigen::VectorXd hat_diagonal(const Eigen::MatrixXd& design);

/// H* = 3 (p + 1) / n. Throws InvalidInputError for p < 1 or n < 1.
double critical_leverage(int parameters, int points);

/// (e_i - mean(e)) / s with e = actual - predicted and s the sample standard
/// deviation (N - 1). Throws DegenerateError when N < 2 or all residuals are
/// equal.
Eigen::VectorXd standardized_residuals(std::span<const double> actual, std::span<const double> predicted);

enum class PointFlag { valid, outlier, high_leverage };

std::string_view to_string(PointFlag flag);

inline constexpr double kResidualBound = 3.0;

/// Flag rule: high_leverage when h > H*; otherwise outlier when
/// |std_residual| > 3; otherwise valid. A point beyond both limits is
/// reported as high_leverage.
PointFlag classify_point(double hat, double std_residual, double critical);

struct LeverageReport {
  Eigen::VectorXd hat_diagonal;
  Eigen::VectorXd std_residuals;
  double critical_leverage = 0.0;
  double residual_lo = -kResidualBound;
  double residual_hi = kResidualBound;
  int parameters = 0;
  std::vector<PointFlag> flags;

  std::size_t count(PointFlag flag) const;
};

struct WilliamsOptions {
  /// Append a constant column to the design matrix. p used for H* stays the
  /// number of input features.
  bool intercept = false;
};

/// Leverage over `design` (typically N x 8 scaled inputs), residual
/// standardization and H* = critical_leverage(p, N).
LeverageReport williams_report(const Eigen::MatrixXd& design, std::span<const double> actual,
                               std::span<const double> predicted, const WilliamsOptions& options = {});

/// CSV `index,hat,std_residual,flag`.
std::string leverage_to_csv(const LeverageReport& report);
/// JSON header: critical_leverage, residual_bounds, parameters, n, counts.
std::string leverage_header_json(const LeverageReport& report);
void write_leverage(const LeverageReport& report, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path);

// ---------------------------------------------------------------------------
// Sensitivity

/// Pearson correlation between one input column and the target, accumulated
/// in a single pass with Welford co-moment updates.
/// Throws ShapeError on length mismatch, DegenerateError when N < 2 or either
/// vector is constant.
double relevancy_factor(std::span<const double> x, std::span<const double> y);

struct SensitivityReport {
  /// Keyed by kFeatureNames order; empty when the column is constant.
  std::array<std::optional<double>, kFeatureCount> factors;

  std::optional<double> operator[](std::string_view feature) const;
};

/// Relevancy factor of each raw feature column against solubility.
/// Constant columns are left undefined. Throws DegenerateError when the
/// target is constant or the dataset has fewer than two rows.
SensitivityReport sensitivity_report(const Dataset& data);

/// CSV `feature,r`; undefined factors are written as "nan".
std::string sensitivity_to_csv(const SensitivityReport& report);
void write_sensitivity_csv(const SensitivityReport& report, const std::filesystem::path& path);
SensitivityReport read_sensitivity_csv(const std::filesystem::path& path);

}  // namespace elmsol
