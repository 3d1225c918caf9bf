#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>

namespace elmsol {

// All functions take (actual, predicted) of equal, nonzero length and throw
// ShapeError otherwise.

/// Mean relative error in percent: 100/N * sum |a - p| / |a|.
/// The unsigned form is used because reported MRE values are magnitudes.
/// Throws DegenerateError naming the first index where actual == 0.
double mre(std::span<const double> actual, std::span<const double> predicted);

/// Signed variant 100/N * sum (a - p) / a, for relative-deviation plots.
double mre_signed(std::span<const double> actual, std::span<const double> predicted);

double mse(std::span<const double> actual, std::span<const double> predicted);
double rmse(std::span<const double> actual, std::span<const double> predicted);

/// 1 - SS_res / SS_tot with SS_tot taken about the mean of `actual` (the
/// printed formula subtracts actual from itself, which is read as a typo for
/// the mean). Needs N >= 2; throws DegenerateError for constant actual.
double r_squared(std::span<const double> actual, std::span<const double> predicted);

struct EvalReport {
  double r2 = 0.0;
  double mre_percent = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
};

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted);

std::string to_json(const EvalReport& report);
EvalReport eval_report_from_json(const std::string& text);

/// Fixed-width table with columns Dataset, R2, MRE(%), MSE, RMSE.
/// `rows` pairs a dataset label with its report.
std::string format_table(std::span<const std::pair<std::string, EvalReport>> rows);

}  // namespace elmsol
