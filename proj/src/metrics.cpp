#include "elmsol/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include <json.hpp>

#include "elmsol/error.hpp"

namespace elmsol {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p) {
  if (a.size() != p.size())
    throw ShapeError("actual has " + std::to_string(a.size()) + " values, predicted has " + std::to_string(p.size()));
  if (a.empty()) throw ShapeError("metrics need at least one value");
}

double sum_squared_error(std::span<const double> a, std::span<const double> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - p[i];
    s += e * e;
  }
  return s;
}

double relative_error_sum(std::span<const double> a, std::span<const double> p, bool absolute) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) throw DegenerateError("relative error undefined: actual value at index " + std::to_string(i) + " is 0");
    const double rel = (a[i] - p[i]) / a[i];
    s += absolute ? std::abs(rel) : rel;
  }
  return s;
}

}  // namespace

double mre(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  return 100.0 * relative_error_sum(actual, predicted, true) / static_cast<double>(actual.size());
}

double mre_signed(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  return 100.0 * relative_error_sum(actual, predicted, false) / static_cast<double>(actual.size());
}

double mse(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  return sum_squared_error(actual, predicted) / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  return std::sqrt(mse(actual, predicted));
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  if (actual.size() < 2) throw DegenerateError("R^2 needs at least two points");
  double mean = 0.0;
  for (double v : actual) mean += v;
  mean /= static_cast<double>(actual.size());
  double ss_tot = 0.0;
  for (double v : actual) ss_tot += (v - mean) * (v - mean);
  if (ss_tot == 0.0) throw DegenerateError("R^2 undefined: actual values have zero variance");
  return 1.0 - sum_squared_error(actual, predicted) / ss_tot;
}

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted) {
  EvalReport r;
  r.n = actual.size();
  r.mse = mse(actual, predicted);
  r.rmse = std::sqrt(r.mse);
  r.mre_percent = mre(actual, predicted);
  r.r2 = r_squared(actual, predicted);
  return r;
}

std::string to_json(const EvalReport& report) {
  nlohmann::json doc = {{"n", report.n},
                        {"r2", report.r2},
                        {"mre_percent", report.mre_percent},
                        {"mse", report.mse},
                        {"rmse", report.rmse}};
  return doc.dump(2) + "\n";
}

EvalReport eval_report_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    EvalReport r;
    r.n = doc.at("n").get<std::size_t>();
    r.r2 = doc.at("r2").get<double>();
    r.mre_percent = doc.at("mre_percent").get<double>();
    r.mse = doc.at("mse").get<double>();
    r.rmse = doc.at("rmse").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError(std::string("malformed evaluation report: ") + e.what());
  }
}

std::string format_table(std::span<const std::pair<std::string, EvalReport>> rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %8s %10s %13s %13s %7s\n", "Dataset", "R2", "MRE(%)", "MSE", "RMSE", "N");
  out += line;
  for (const auto& [label, r] : rows) {
    std::snprintf(line, sizeof line, "%-10s %8.4f %10.3f %13.5e %13.5e %7zu\n", label.c_str(), r.r2, r.mre_percent,
                  r.mse, r.rmse, r.n);
    out += line;
  }
  return out;
}

}  // namespace elmsol
