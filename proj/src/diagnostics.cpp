#include "elmsol/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "elmsol/error.hpp"
#include "elmsol/numfmt.hpp"

namespace elmsol {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& design) {
  if (design.cols() < 1) throw ShapeError("design matrix needs at least one column");
  if (design.rows() < design.cols())
    throw ShapeError("design matrix has fewer rows (" + std::to_string(design.rows()) + ") than columns (" +
                     std::to_string(design.cols()) + ")");
  if (!design.allFinite()) throw InvalidInputError("design matrix contains non-finite values");
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols())
    throw RankError("design matrix is rank deficient: numerical rank " + std::to_string(qr.rank()) + " of " +
                        std::to_string(design.cols()) + " columns",
                    static_cast<long>(qr.rank()));
  // Column pivoting only permutes the basis; span(Q) is unchanged.
  return qr.householderQ() * Eigen::MatrixXd::Identity(design.rows(), design.cols());
}

}  // namespace

Eigen::MatrixXd hat_matrix(const Eigen::MatrixXd& design) {
  const Eigen::MatrixXd q = thin_q(design);
  return q * q.transpose();
}

Eigen::VectorXd hat_diagonal(const Eigen::MatrixXd& design) {
  return thin_q(design).rowwise().squaredNorm();
}

double critical_leverage(int parameters, int points) {
  if (parameters < 1) throw InvalidInputError("critical leverage needs p >= 1");
  if (points < 1) throw InvalidInputError("critical leverage needs n >= 1");
  return 3.0 * (parameters + 1.0) / points;
}

Eigen::VectorXd standardized_residuals(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw ShapeError("actual and predicted lengths differ");
  const auto n = static_cast<Eigen::Index>(actual.size());
  if (n < 2) throw DegenerateError("standardized residuals need at least two points");
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = actual[static_cast<std::size_t>(i)] - predicted[static_cast<std::size_t>(i)];
  const double mean = e.mean();
  e.array() -= mean;
  const double s = std::sqrt(e.squaredNorm() / static_cast<double>(n - 1));
  if (!(s > 0.0) || !std::isfinite(s))
    throw DegenerateError("residuals have zero variance (perfect or constant-offset fit); "
                          "standardized residuals are undefined");
  return e / s;
}

std::string_view to_string(PointFlag flag) {
  switch (flag) {
    case PointFlag::valid: return "valid";
    case PointFlag::outlier: return "outlier";
    case PointFlag::high_leverage: return "high_leverage";
  }
  return "unknown";
}

PointFlag classify_point(double hat, double std_residual, double critical) {
  if (hat > critical) return PointFlag::high_leverage;
  if (std::abs(std_residual) > kResidualBound) return PointFlag::outlier;
  return PointFlag::valid;
}

std::size_t LeverageReport::count(PointFlag flag) const {
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), flag));
}

LeverageReport williams_report(const Eigen::MatrixXd& design, std::span<const double> actual,
                               std::span<const double> predicted, const WilliamsOptions& options) {
  if (static_cast<std::size_t>(design.rows()) != actual.size())
    throw ShapeError("design rows != number of observations");
  LeverageReport report;
  report.std_residuals = standardized_residuals(actual, predicted);
  if (options.intercept) {
    Eigen::MatrixXd augmented(design.rows(), design.cols() + 1);
    augmented << design, Eigen::VectorXd::Ones(design.rows());
    report.hat_diagonal = hat_diagonal(augmented);
  } else {
    report.hat_diagonal = hat_diagonal(design);
  }
  report.parameters = static_cast<int>(design.cols());
  report.critical_leverage = critical_leverage(report.parameters, static_cast<int>(design.rows()));
  report.flags.reserve(actual.size());
  for (Eigen::Index i = 0; i < design.rows(); ++i)
    report.flags.push_back(classify_point(report.hat_diagonal(i), report.std_residuals(i), report.critical_leverage));
  return report;
}

std::string leverage_to_csv(const LeverageReport& report) {
  std::ostringstream out;
  out << "index,hat,std_residual,flag\n";
  for (std::size_t i = 0; i < report.flags.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << i << ',' << format_exact(report.hat_diagonal(k)) << ',' << format_exact(report.std_residuals(k)) << ','
        << to_string(report.flags[i]) << '\n';
  }
  return out.str();
}

std::string leverage_header_json(const LeverageReport& report) {
  nlohmann::json doc = {
      {"critical_leverage", report.critical_leverage},
      {"residual_bounds", {report.residual_lo, report.residual_hi}},
      {"parameters", report.parameters},
      {"n", report.flags.size()},
      {"counts",
       {{"valid", report.count(PointFlag::valid)},
        {"outlier", report.count(PointFlag::outlier)},
        {"high_leverage", report.count(PointFlag::high_leverage)}}},
  };
  return doc.dump(2) + "\n";
}

void write_leverage(const LeverageReport& report, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open '" + csv_path.string() + "' for writing");
  csv << leverage_to_csv(report);
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw IoError("cannot open '" + json_path.string() + "' for writing");
  js << leverage_header_json(report);
}

// ---------------------------------------------------------------------------

double relevancy_factor(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("relevancy factor inputs differ in length");
  if (x.size() < 2) throw DegenerateError("relevancy factor needs at least two points");
  double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    mean_x += dx / k;
    mean_y += dy / k;
    m2x += dx * (x[i] - mean_x);
    m2y += dy * (y[i] - mean_y);
    cxy += dx * (y[i] - mean_y);
  }
  if (!(m2x > 0.0)) throw DegenerateError("relevancy factor undefined: input column is constant");
  if (!(m2y > 0.0)) throw DegenerateError("relevancy factor undefined: target is constant");
  const double r = cxy / std::sqrt(m2x * m2y);
  return std::clamp(r, -1.0, 1.0);
}

std::optional<double> SensitivityReport::operator[](std::string_view feature) const {
  for (std::size_t k = 0; k < kFeatureCount; ++k)
    if (kFeatureNames[k] == feature) return factors[k];
  throw InvalidInputError("unknown feature '" + std::string(feature) + "'");
}

SensitivityReport sensitivity_report(const Dataset& data) {
  if (data.size() < 2) throw DegenerateError("sensitivity analysis needs at least two records");
  const Eigen::MatrixXd x = data.features();
  const Eigen::VectorXd y = data.targets();
  if ((y.array() == y(0)).all()) throw DegenerateError("sensitivity analysis undefined: solubility is constant");
  SensitivityReport report;
  const std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const auto col = x.col(static_cast<Eigen::Index>(k));
    if ((col.array() == col(0)).all()) continue;
    const Eigen::VectorXd c = col;
    report.factors[k] = relevancy_factor(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())), ys);
  }
  return report;
}

std::string sensitivity_to_csv(const SensitivityReport& report) {
  std::ostringstream out;
  out << "feature,r\n";
  for (std::size_t k = 0; k < kFeatureCount; ++k)
    out << kFeatureNames[k] << ',' << (report.factors[k] ? format_exact(*report.factors[k]) : "nan") << '\n';
  return out.str();
}

void write_sensitivity_csv(const SensitivityReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << sensitivity_to_csv(report);
}

SensitivityReport read_sensitivity_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "feature,r")
    throw SchemaError("'" + path.string() + "' is not a sensitivity CSV", "feature");
  SensitivityReport report;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("sensitivity CSV row " + std::to_string(row) + ": missing ','", row);
    const auto name = trim(std::string_view(line).substr(0, comma));
    const auto value = parse_double(std::string_view(line).substr(comma + 1));
    if (!value) throw ParseError("sensitivity CSV row " + std::to_string(row) + ": bad number", row);
    const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
    if (it == kFeatureNames.end())
      throw ParseError("sensitivity CSV row " + std::to_string(row) + ": unknown feature '" + std::string(name) + "'", row);
    const auto k = static_cast<std::size_t>(it - kFeatureNames.begin());
    if (!std::isnan(*value)) report.factors[k] = *value;
  }
  return report;
}

}  // namespace elmsol
