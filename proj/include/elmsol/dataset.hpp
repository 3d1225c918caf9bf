#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace elmsol {

/// One dissolved ion: molality in mol/kg solvent and signed valence.
struct IonSpec {
  double molality = 0.0;
  int charge = 0;
};

/// I = 1/2 * sum(m_i * z_i^2). The concentration unit is passed through
/// unchanged and documented as mol/kg. Empty input gives 0.
/// Throws InvalidInputError on negative or non-finite molality, or zero charge.
double ionic_strength(std::span<const IonSpec> ions);

inline constexpr std::size_t kFeatureCount = 8;
using FeatureVector = std::array<double, kFeatureCount>;

/// Column names of the feature vector, in feature order. Reports that index
/// features (sensitivity, leverage) use this order.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "c1", "c2", "c3", "c4", "ionic_strength", "pressure_mpa", "temperature_c", "idx"};

// Documented experimental ranges. Values outside only produce warnings.
inline constexpr double kTemperatureMinC = 1.4;
inline constexpr double kTemperatureMaxC = 245.15;
inline constexpr double kPressureMinMpa = 0.3;
inline constexpr double kPressureMaxMpa = 100.0;
inline constexpr double kIonicStrengthMax = 37.35;

/// One measured point. c1..c4 are gas-phase mole fractions of methane, ethane,
/// propane and butane; `idx` picks which of them `solubility` refers to.
struct SolubilityRecord {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double ionic_strength = 0.0;  // mol/kg
  double temperature = 0.0;     // degC
  double pressure = 0.0;        // MPa
  int idx = 1;                  // 1..4
  double solubility = 0.0;      // aqueous mole fraction

  double gas_fraction(int component) const;

  bool operator==(const SolubilityRecord&) const = default;
};

/// Checks every record invariant except the solubility range.
/// Throws InvalidInputError describing the first violation.
void validate_features(const SolubilityRecord& record);

/// validate_features plus 0 < solubility < 1.
void validate_record(const SolubilityRecord& record);

/// Messages for values outside the documented experimental ranges.
std::vector<std::string> range_warnings(const SolubilityRecord& record);

/// [c1, c2, c3, c4, I, P, T, idx]
FeatureVector feature_vector(const SolubilityRecord& record);

/// Immutable, non-empty, ordered collection of records.
class Dataset {
 public:
  /// Throws EmptyDatasetError when `records` is empty.
  Dataset(std::vector<SolubilityRecord> records, std::string provenance);

  const std::vector<SolubilityRecord>& records() const noexcept { return records_; }
  const std::string& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return records_.size(); }
  const SolubilityRecord& operator[](std::size_t i) const { return records_[i]; }

  /// N x 8 matrix of feature vectors, one row per record.
  Eigen::MatrixXd features() const;
  Eigen::VectorXd targets() const;

 private:
  std::vector<SolubilityRecord> records_;
  std::string provenance_;
};

struct CsvOptions {
  /// Gas mole fractions given in percent (0-99.99); divided by 100 on load.
  bool percent = false;
  /// Aqueous phase given as cation_molality,cation_charge,anion_molality,
  /// anion_charge instead of ionic_strength.
  bool ion_columns = false;
};

/// Columns of the standard CSV schema, in write order.
inline constexpr std::array<std::string_view, 9> kCsvColumns = {
    "c1", "c2", "c3", "c4", "ionic_strength", "pressure_mpa", "temperature_c", "idx",
    "solubility"};

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

/// Reads a dataset. Columns are matched by header name, so their order is free.
/// Errors: IoError (unreadable), SchemaError (missing column), ParseError
/// (bad cell, with row), ValidationError (record invariant, with row),
/// EmptyDatasetError (header only).
LoadResult load_csv_with_warnings(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Reads feature rows for prediction: same schema, solubility column optional
/// and ignored. A header-only file yields zero rows.
std::vector<SolubilityRecord> load_feature_csv(const std::filesystem::path& path,
                                               const CsvOptions& options = {});

/// Writes the standard schema with shortest round-trip number formatting.
void write_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv_string(std::span<const SolubilityRecord> records);

/// Seeded random partition: the index permutation is shuffled with
/// Rng(seed).shuffle (MT19937-64 Fisher-Yates, see random.hpp), and the first
/// round(train_fraction * N) shuffled records form the training part.
/// Both parts keep the shuffled order.
/// Throws InvalidInputError for a fraction outside (0, 1), SplitError when a
/// part would be empty.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Affine min-max map of each column onto [lo, hi], no clamping.
/// Constant columns map to (lo + hi) / 2.
class Scaler {
 public:
  Scaler(std::vector<double> min, std::vector<double> max, double lo = -1.0, double hi = 1.0);

  /// Fits column extrema of `x` (rows are samples). Throws EmptyDatasetError
  /// on zero rows.
  static Scaler fit(const Eigen::MatrixXd& x, double lo = -1.0, double hi = 1.0);

  std::size_t dims() const noexcept { return min_.size(); }
  const std::vector<double>& min() const noexcept { return min_; }
  const std::vector<double>& max() const noexcept { return max_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  /// Row-wise transform. Throws ShapeError when columns != dims().
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& scaled) const;

  bool operator==(const Scaler&) const = default;

 private:
  std::vector<double> min_;
  std::vector<double> max_;
  double lo_;
  double hi_;
};

Scaler fit_scaler(const Dataset& train);
FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& x);

}  // namespace elmsol
