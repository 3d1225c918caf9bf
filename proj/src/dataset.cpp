#include "elmsol/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

#include "elmsol/error.hpp"
#include "elmsol/numfmt.hpp"
#include "elmsol/random.hpp"

namespace elmsol {

double ionic_strength(std::span<const IonSpec> ions) {
  double sum = 0.0;
  for (std::size_t i = 0; i < ions.size(); ++i) {
    const auto& ion = ions[i];
    if (!std::isfinite(ion.molality) || ion.molality < 0.0)
      throw InvalidInputError("ion " + std::to_string(i) + ": molality must be finite and >= 0, got " +
                              format_exact(ion.molality));
    if (ion.charge == 0)
      throw InvalidInputError("ion " + std::to_string(i) + ": charge must be nonzero");
    const double z = static_cast<double>(ion.charge);
    sum += ion.molality * z * z;
  }
  return 0.5 * sum;
}

double SolubilityRecord::gas_fraction(int component) const {
  switch (component) {
    case 1: return c1;
    case 2: return c2;
    case 3: return c3;
    case 4: return c4;
    default: throw InvalidInputError("gas component index must be in 1..4, got " + std::to_string(component));
  }
}

void validate_features(const SolubilityRecord& r) {
  const std::array<double, 4> gas = {r.c1, r.c2, r.c3, r.c4};
  for (std::size_t k = 0; k < gas.size(); ++k) {
    if (!std::isfinite(gas[k]) || gas[k] < 0.0 || gas[k] > 1.0)
      throw InvalidInputError("c" + std::to_string(k + 1) + " must be a mole fraction in [0, 1], got " +
                              format_exact(gas[k]));
  }
  const double total = gas[0] + gas[1] + gas[2] + gas[3];
  if (total > 1.0 + 1e-9)
    throw InvalidInputError("gas mole fractions sum to " + format_exact(total) + " > 1");
  if (!std::isfinite(r.ionic_strength) || r.ionic_strength < 0.0)
    throw InvalidInputError("ionic_strength must be finite and >= 0, got " + format_exact(r.ionic_strength));
  if (!std::isfinite(r.temperature))
    throw InvalidInputError("temperature_c must be finite");
  if (!std::isfinite(r.pressure) || r.pressure <= 0.0)
    throw InvalidInputError("pressure_mpa must be > 0, got " + format_exact(r.pressure));
  if (r.idx < 1 || r.idx > 4)
    throw InvalidInputError("idx must be in {1, 2, 3, 4}, got " + std::to_string(r.idx));
  if (r.gas_fraction(r.idx) <= 0.0)
    throw InvalidInputError("idx " + std::to_string(r.idx) + " selects a component with zero gas-phase fraction");
}

void validate_record(const SolubilityRecord& r) {
  validate_features(r);
  if (!std::isfinite(r.solubility) || r.solubility <= 0.0 || r.solubility >= 1.0)
    throw InvalidInputError("solubility must be in (0, 1), got " + format_exact(r.solubility));
}

std::vector<std::string> range_warnings(const SolubilityRecord& r) {
  std::vector<std::string> out;
  if (r.temperature < kTemperatureMinC || r.temperature > kTemperatureMaxC)
    out.push_back("temperature " + format_exact(r.temperature) + " degC outside [1.4, 245.15]");
  if (r.pressure < kPressureMinMpa || r.pressure > kPressureMaxMpa)
    out.push_back("pressure " + format_exact(r.pressure) + " MPa outside [0.3, 100]");
  if (r.ionic_strength > kIonicStrengthMax)
    out.push_back("ionic strength " + format_exact(r.ionic_strength) + " outside [0, 37.35]");
  return out;
}

FeatureVector feature_vector(const SolubilityRecord& r) {
  return {r.c1, r.c2, r.c3, r.c4, r.ionic_strength, r.pressure, r.temperature, static_cast<double>(r.idx)};
}

Dataset::Dataset(std::vector<SolubilityRecord> records, std::string provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
  if (records_.empty()) throw EmptyDatasetError("dataset has no records (" + provenance_ + ")");
}

Eigen::MatrixXd Dataset::features() const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records_.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto f = feature_vector(records_[i]);
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = f[k];
  }
  return x;
}

Eigen::VectorXd Dataset::targets() const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(records_.size()));
  for (std::size_t i = 0; i < records_.size(); ++i) t(static_cast<Eigen::Index>(i)) = records_[i].solubility;
  return t;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

class CsvTable {
 public:
  CsvTable(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path_ + "' for reading");
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!have_header) {
        // Tolerate a UTF-8 byte-order mark.
        if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        header_line_ = line;
        have_header = true;
        continue;
      }
      if (trim(line).empty()) continue;
      lines_.push_back(line);
    }
    if (!have_header) throw SchemaError("'" + path_ + "' is empty; a header row is required", "");
    for (auto name : split_fields(header_line_)) header_.emplace_back(name);
  }

  std::optional<std::size_t> find(std::string_view column) const {
    const auto it = std::find(header_.begin(), header_.end(), column);
    if (it == header_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header_.begin());
  }

  std::size_t require(std::string_view column) const {
    if (auto pos = find(column)) return *pos;
    throw SchemaError("'" + path_ + "': missing required column '" + std::string(column) + "'",
                      std::string(column));
  }

  std::size_t rows() const noexcept { return lines_.size(); }
  const std::string& path() const noexcept { return path_; }

  std::vector<std::string_view> fields(std::size_t row) const {
    auto f = split_fields(lines_[row]);
    if (f.size() != header_.size())
      throw ParseError("'" + path_ + "' row " + std::to_string(row + 1) + ": expected " +
                           std::to_string(header_.size()) + " fields, found " + std::to_string(f.size()),
                       row + 1);
    return f;
  }

 private:
  std::string path_;
  std::string header_line_;
  std::vector<std::string> header_;
  std::vector<std::string> lines_;
};

double cell_number(const CsvTable& table, const std::vector<std::string_view>& fields, std::size_t col,
                   std::string_view name, std::size_t row) {
  const auto value = parse_double(fields[col]);
  if (!value)
    throw ParseError("'" + table.path() + "' row " + std::to_string(row + 1) + ": column '" +
                         std::string(name) + "' is not numeric: '" + std::string(fields[col]) + "'",
                     row + 1);
  return *value;
}

int cell_integer(const CsvTable& table, const std::vector<std::string_view>& fields, std::size_t col,
                 std::string_view name, std::size_t row) {
  const double value = cell_number(table, fields, col, name, row);
  if (!std::isfinite(value) || value != std::trunc(value) || std::abs(value) > 1e9)
    throw ParseError("'" + table.path() + "' row " + std::to_string(row + 1) + ": column '" +
                         std::string(name) + "' must be an integer, got '" + std::string(fields[col]) + "'",
                     row + 1);
  return static_cast<int>(value);
}

std::vector<SolubilityRecord> read_records(const CsvTable& table, const CsvOptions& options,
                                           bool need_solubility, std::vector<std::string>* warnings) {
  std::array<std::size_t, 4> gas_cols{};
  for (std::size_t k = 0; k < 4; ++k) gas_cols[k] = table.require(kCsvColumns[k]);
  const auto p_col = table.require("pressure_mpa");
  const auto t_col = table.require("temperature_c");
  const auto idx_col = table.require("idx");
  std::optional<std::size_t> sol_col;
  if (need_solubility) sol_col = table.require("solubility");

  std::size_t i_col = 0;
  std::array<std::size_t, 4> ion_cols{};
  constexpr std::array<std::string_view, 4> ion_names = {"cation_molality", "cation_charge", "anion_molality",
                                                         "anion_charge"};
  if (options.ion_columns) {
    for (std::size_t k = 0; k < 4; ++k) ion_cols[k] = table.require(ion_names[k]);
  } else {
    i_col = table.require("ionic_strength");
  }

  std::vector<SolubilityRecord> records;
  records.reserve(table.rows());
  for (std::size_t row = 0; row < table.rows(); ++row) {
    const auto f = table.fields(row);
    SolubilityRecord r;
    std::array<double, 4> gas{};
    for (std::size_t k = 0; k < 4; ++k) {
      gas[k] = cell_number(table, f, gas_cols[k], kCsvColumns[k], row);
      if (options.percent) gas[k] /= 100.0;
    }
    r.c1 = gas[0];
    r.c2 = gas[1];
    r.c3 = gas[2];
    r.c4 = gas[3];
    r.pressure = cell_number(table, f, p_col, "pressure_mpa", row);
    r.temperature = cell_number(table, f, t_col, "temperature_c", row);
    r.idx = cell_integer(table, f, idx_col, "idx", row);
    if (sol_col) r.solubility = cell_number(table, f, *sol_col, "solubility", row);

    try {
      if (options.ion_columns) {
        const std::array<IonSpec, 2> ions = {
            IonSpec{cell_number(table, f, ion_cols[0], ion_names[0], row),
                    cell_integer(table, f, ion_cols[1], ion_names[1], row)},
            IonSpec{cell_number(table, f, ion_cols[2], ion_names[2], row),
                    cell_integer(table, f, ion_cols[3], ion_names[3], row)}};
        r.ionic_strength = ionic_strength(ions);
      } else {
        r.ionic_strength = cell_number(table, f, i_col, "ionic_strength", row);
      }
      if (need_solubility)
        validate_record(r);
      else
        validate_features(r);
    } catch (const InvalidInputError& e) {
      throw ValidationError("'" + table.path() + "' row " + std::to_string(row + 1) + ": " + e.what(), row + 1);
    }
    if (warnings) {
      for (auto& w : range_warnings(r)) warnings->push_back("row " + std::to_string(row + 1) + ": " + w);
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace

LoadResult load_csv_with_warnings(const std::filesystem::path& path, const CsvOptions& options) {
  const CsvTable table(path);
  std::vector<std::string> warnings;
  auto records = read_records(table, options, true, &warnings);
  if (records.empty()) throw EmptyDatasetError("'" + table.path() + "' has a header but no data rows");
  return LoadResult{Dataset(std::move(records), table.path()), std::move(warnings)};
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  return load_csv_with_warnings(path, options).dataset;
}

std::vector<SolubilityRecord> load_feature_csv(const std::filesystem::path& path, const CsvOptions& options) {
  const CsvTable table(path);
  return read_records(table, options, false, nullptr);
}

std::string to_csv_string(std::span<const SolubilityRecord> records) {
  std::ostringstream out;
  for (std::size_t k = 0; k < kCsvColumns.size(); ++k) out << (k ? "," : "") << kCsvColumns[k];
  out << '\n';
  for (const auto& r : records) {
    out << format_exact(r.c1) << ',' << format_exact(r.c2) << ',' << format_exact(r.c3) << ','
        << format_exact(r.c4) << ',' << format_exact(r.ionic_strength) << ',' << format_exact(r.pressure) << ','
        << format_exact(r.temperature) << ',' << r.idx << ',' << format_exact(r.solubility) << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_csv_string(data.records());
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// split

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidInputError("train_fraction must lie in (0, 1), got " + format_exact(train_fraction));
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n)
    throw SplitError("split of " + std::to_string(n) + " records at fraction " + format_exact(train_fraction) +
                     " leaves an empty part");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<SolubilityRecord> train, test;
  train.reserve(n_train);
  test.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) (i < n_train ? train : test).push_back(data[order[i]]);
  const std::string tag = data.provenance() + " split(" + format_exact(train_fraction) + ", seed " +
                          std::to_string(seed) + ")";
  return {Dataset(std::move(train), tag + " train"), Dataset(std::move(test), tag + " test")};
}

// ---------------------------------------------------------------------------
// Scaler

Scaler::Scaler(std::vector<double> min, std::vector<double> max, double lo, double hi)
    : min_(std::move(min)), max_(std::move(max)), lo_(lo), hi_(hi) {
  if (min_.size() != max_.size()) throw ShapeError("scaler min/max length mismatch");
  if (!(lo_ < hi_)) throw InvalidInputError("scaler target range needs lo < hi");
  for (std::size_t k = 0; k < min_.size(); ++k) {
    if (!std::isfinite(min_[k]) || !std::isfinite(max_[k]) || max_[k] < min_[k])
      throw InvalidInputError("scaler column " + std::to_string(k) + " has invalid extrema");
  }
}

Scaler Scaler::fit(const Eigen::MatrixXd& x, double lo, double hi) {
  if (x.rows() == 0) throw EmptyDatasetError("cannot fit a scaler on zero rows");
  std::vector<double> mn(static_cast<std::size_t>(x.cols())), mx(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    mn[static_cast<std::size_t>(k)] = x.col(k).minCoeff();
    mx[static_cast<std::size_t>(k)] = x.col(k).maxCoeff();
  }
  return Scaler(std::move(mn), std::move(mx), lo, hi);
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != dims())
    throw ShapeError("scaler expects " + std::to_string(dims()) + " columns, got " + std::to_string(x.cols()));
  Eigen::MatrixXd out(x.rows(), x.cols());
  const double mid = 0.5 * (lo_ + hi_);
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double a = min_[static_cast<std::size_t>(k)];
    const double b = max_[static_cast<std::size_t>(k)];
    if (b == a) {
      out.col(k).setConstant(mid);
    } else {
      // (x - a) / (b - a) is exactly 0 and 1 at the extrema, keeping the
      // fitted columns inside [lo, hi] after rounding.
      out.col(k) = (lo_ + (hi_ - lo_) * ((x.col(k).array() - a) / (b - a))).matrix();
    }
  }
  return out;
}

Eigen::MatrixXd Scaler::inverse(const Eigen::MatrixXd& scaled) const {
  if (static_cast<std::size_t>(scaled.cols()) != dims())
    throw ShapeError("scaler expects " + std::to_string(dims()) + " columns, got " +
                     std::to_string(scaled.cols()));
  Eigen::MatrixXd out(scaled.rows(), scaled.cols());
  for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
    const double a = min_[static_cast<std::size_t>(k)];
    const double b = max_[static_cast<std::size_t>(k)];
    if (b == a) {
      out.col(k).setConstant(a);
    } else {
      out.col(k) = ((scaled.col(k).array() - lo_) * ((b - a) / (hi_ - lo_)) + a).matrix();
    }
  }
  return out;
}

Scaler fit_scaler(const Dataset& train) { return Scaler::fit(train.features()); }

FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& x) {
  Eigen::MatrixXd row(1, static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t k = 0; k < kFeatureCount; ++k) row(0, static_cast<Eigen::Index>(k)) = x[k];
  const Eigen::MatrixXd s = scaler.transform(row);
  FeatureVector out{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) out[k] = s(0, static_cast<Eigen::Index>(k));
  return out;
}

}  // namespace elmsol
