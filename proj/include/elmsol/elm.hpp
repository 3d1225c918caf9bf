#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "elmsol/dataset.hpp"

namespace elmsol {

struct ElmConfig {
  int hidden_nodes = 30;
  /// Penalty weight C of 1/2|beta|^2 + C/2 |T - H beta|^2. Empty selects the
  /// plain Moore-Penrose solution.
  std::optional<double> regularization;
  double weight_lo = -1.0;
  double weight_hi = 1.0;
  std::uint64_t seed = 42;
  std::string activation = "sigmoid";

  /// Throws ConfigError on hidden_nodes < 1, weight_lo >= weight_hi,
  /// C <= 0 or an activation other than "sigmoid".
  void validate() const;

  bool operator==(const ElmConfig&) const = default;
};

struct HiddenParams {
  Eigen::MatrixXd input_weights;  // L x n
  Eigen::VectorXd biases;         // L
};

/// Draws input weights then biases uniformly from [weight_lo, weight_hi) with
/// Rng(config.seed): all L*n weights in row-major order first, then the L
/// biases.
HiddenParams init_random(const ElmConfig& config, Eigen::Index n_inputs);

/// H(j, i) = 1 / (1 + exp(-(a_i . x_j + b_i))) for already-scaled inputs x.
/// Throws ShapeError when x has a different column count than the weights.
Eigen::MatrixXd hidden_output(const HiddenParams& params, const Eigen::MatrixXd& scaled_x);

class ElmModel {
 public:
  /// Validates that dimensions agree and all entries are finite.
  ElmModel(ElmConfig config, Scaler scaler, HiddenParams hidden, Eigen::MatrixXd output_weights);

  const ElmConfig& config() const noexcept { return config_; }
  const Scaler& scaler() const noexcept { return scaler_; }
  const HiddenParams& hidden() const noexcept { return hidden_; }
  const Eigen::MatrixXd& input_weights() const noexcept { return hidden_.input_weights; }
  const Eigen::VectorXd& biases() const noexcept { return hidden_.biases; }
  /// beta, L x m.
  const Eigen::MatrixXd& output_weights() const noexcept { return output_weights_; }

  Eigen::Index n_inputs() const noexcept { return hidden_.input_weights.cols(); }
  Eigen::Index n_outputs() const noexcept { return output_weights_.cols(); }

  /// Scales raw rows, maps through the hidden layer and applies beta.
  /// Returns K x m. Zero rows give an empty result.
  Eigen::MatrixXd predict_all(const Eigen::MatrixXd& raw_x) const;
  /// First (usually only) output column.
  Eigen::VectorXd predict(const Eigen::MatrixXd& raw_x) const;

  /// H for raw rows (scaling included).
  Eigen::MatrixXd hidden_matrix(const Eigen::MatrixXd& raw_x) const;

 private:
  ElmConfig config_;
  Scaler scaler_;
  HiddenParams hidden_;
  Eigen::MatrixXd output_weights_;
};

/// Relative cutoff for the pseudoinverse: singular values at or below
/// eps * max(N, L) * sigma_max are treated as zero.
double pinv_cutoff(Eigen::Index rows, Eigen::Index cols, double sigma_max);

/// Output weights for a given hidden matrix.
///   C present: beta = (H^T H + I/C)^-1 H^T T via Cholesky; throws SolverError
///              (carrying the reciprocal condition estimate) when the system
///              is not numerically positive definite.
///   C absent:  beta = H^+ T from a thin SVD with the pinv_cutoff rank rule.
Eigen::MatrixXd solve_output_weights(const Eigen::MatrixXd& h, const Eigen::MatrixXd& targets,
                                     std::optional<double> regularization);

/// Trains on raw inputs with a given (usually train-fitted) scaler.
/// `targets` is N x m. Throws InvalidInputError on non-finite data or
/// N == 0, ShapeError on dimension mismatch.
ElmModel train(const ElmConfig& config, const Eigen::MatrixXd& raw_x, const Eigen::MatrixXd& targets,
               const Scaler& scaler);

/// Same, fitting the scaler on raw_x first.
ElmModel train(const ElmConfig& config, const Eigen::MatrixXd& raw_x, const Eigen::MatrixXd& targets);

/// Fits the scaler on `data` and trains on its features and solubility.
ElmModel train(const ElmConfig& config, const Dataset& data);

// ---------------------------------------------------------------------------
// Persistence

inline constexpr int kModelSchemaVersion = 1;

/// JSON document; numbers are shortest round-trip decimal strings and a
/// FNV-1a 64 checksum covers the numeric payload.
std::string model_to_json(const ElmModel& model);
/// Throws VersionError, ChecksumError or ModelFormatError.
ElmModel model_from_json(const std::string& text);

void save_model(const ElmModel& model, const std::filesystem::path& path);
ElmModel load_model(const std::filesystem::path& path);

}  // namespace elmsol
