#include "elmsol/elm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "elmsol/error.hpp"
#include "elmsol/numfmt.hpp"
#include "elmsol/random.hpp"

namespace elmsol {

void ElmConfig::validate() const {
  if (hidden_nodes < 1) throw ConfigError("hidden_nodes must be >= 1, got " + std::to_string(hidden_nodes));
  if (!(std::isfinite(weight_lo) && std::isfinite(weight_hi) && weight_lo < weight_hi))
    throw ConfigError("weight range needs finite lo < hi");
  if (regularization && !(std::isfinite(*regularization) && *regularization > 0.0))
    throw ConfigError("regularization C must be a finite positive number");
  if (activation != "sigmoid")
    throw ConfigError("unsupported activation '" + activation + "' (only 'sigmoid' is available)");
}

HiddenParams init_random(const ElmConfig& config, Eigen::Index n_inputs) {
  config.validate();
  if (n_inputs < 1) throw ShapeError("need at least one input column");
  const Eigen::Index l = config.hidden_nodes;
  Rng rng(config.seed);
  HiddenParams p{Eigen::MatrixXd(l, n_inputs), Eigen::VectorXd(l)};
  for (Eigen::Index i = 0; i < l; ++i)
    for (Eigen::Index k = 0; k < n_inputs; ++k) p.input_weights(i, k) = rng.uniform(config.weight_lo, config.weight_hi);
  for (Eigen::Index i = 0; i < l; ++i) p.biases(i) = rng.uniform(config.weight_lo, config.weight_hi);
  return p;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

Eigen::MatrixXd hidden_output(const HiddenParams& params, const Eigen::MatrixXd& scaled_x) {
  if (scaled_x.cols() != params.input_weights.cols())
    throw ShapeError("input has " + std::to_string(scaled_x.cols()) + " columns, hidden layer expects " +
                     std::to_string(params.input_weights.cols()));
  if (params.biases.size() != params.input_weights.rows()) throw ShapeError("bias length != hidden nodes");
  Eigen::MatrixXd z = scaled_x * params.input_weights.transpose();
  z.rowwise() += params.biases.transpose();
  return z.unaryExpr(&sigmoid);
}

ElmModel::ElmModel(ElmConfig config, Scaler scaler, HiddenParams hidden, Eigen::MatrixXd output_weights)
    : config_(std::move(config)),
      scaler_(std::move(scaler)),
      hidden_(std::move(hidden)),
      output_weights_(std::move(output_weights)) {
  config_.validate();
  const Eigen::Index l = hidden_.input_weights.rows();
  if (l != config_.hidden_nodes) throw ShapeError("input_weights rows != hidden_nodes");
  if (hidden_.biases.size() != l) throw ShapeError("biases length != hidden_nodes");
  if (output_weights_.rows() != l || output_weights_.cols() < 1)
    throw ShapeError("output_weights must be hidden_nodes x m with m >= 1");
  if (static_cast<std::size_t>(hidden_.input_weights.cols()) != scaler_.dims())
    throw ShapeError("scaler dimension != model input dimension");
  if (!all_finite(hidden_.input_weights) || !hidden_.biases.allFinite() || !all_finite(output_weights_))
    throw InvalidInputError("model parameters must be finite");
}

Eigen::MatrixXd ElmModel::hidden_matrix(const Eigen::MatrixXd& raw_x) const {
  if (raw_x.cols() != n_inputs())
    throw ShapeError("expected " + std::to_string(n_inputs()) + " input columns, got " + std::to_string(raw_x.cols()));
  return hidden_output(hidden_, scaler_.transform(raw_x));
}

Eigen::MatrixXd ElmModel::predict_all(const Eigen::MatrixXd& raw_x) const {
  if (raw_x.cols() != n_inputs())
    throw ShapeError("expected " + std::to_string(n_inputs()) + " input columns, got " + std::to_string(raw_x.cols()));
  if (raw_x.rows() == 0) return Eigen::MatrixXd(0, n_outputs());
  return hidden_matrix(raw_x) * output_weights_;
}

Eigen::VectorXd ElmModel::predict(const Eigen::MatrixXd& raw_x) const { return predict_all(raw_x).col(0); }

double pinv_cutoff(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(rows, cols)) * sigma_max;
}

Eigen::MatrixXd solve_output_weights(const Eigen::MatrixXd& h, const Eigen::MatrixXd& targets,
                                     std::optional<double> regularization) {
  if (h.rows() != targets.rows()) throw ShapeError("hidden matrix and targets disagree on row count");
  const Eigen::Index l = h.cols();

  if (regularization) {
    Eigen::MatrixXd system = h.transpose() * h;
    system.diagonal().array() += 1.0 / *regularization;
    const Eigen::LLT<Eigen::MatrixXd> llt(system);
    const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
    if (llt.info() != Eigen::Success || !(rcond > std::numeric_limits<double>::epsilon())) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", rcond);
      throw SolverError("regularized normal equations are numerically singular (rcond ~ " + std::string(buf) + ")",
                        rcond);
    }
    return llt.solve(h.transpose() * targets);
  }

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(l, targets.cols());
  if (sv.size() == 0 || sv(0) == 0.0) return beta;
  const double cutoff = pinv_cutoff(h.rows(), h.cols(), sv(0));
  const Eigen::MatrixXd ut_t = svd.matrixU().transpose() * targets;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= cutoff) break;  // sorted descending
    beta += svd.matrixV().col(k) * (ut_t.row(k) / sv(k));
  }
  return beta;
}

ElmModel train(const ElmConfig& config, const Eigen::MatrixXd& raw_x, const Eigen::MatrixXd& targets,
               const Scaler& scaler) {
  config.validate();
  if (raw_x.rows() == 0) throw InvalidInputError("training needs at least one row");
  if (targets.rows() != raw_x.rows() || targets.cols() < 1)
    throw ShapeError("targets must have one row per input row");
  if (!raw_x.allFinite() || !targets.allFinite()) throw InvalidInputError("training data contains non-finite values");
  if (static_cast<std::size_t>(raw_x.cols()) != scaler.dims())
    throw ShapeError("scaler dimension != input column count");

  HiddenParams hidden = init_random(config, raw_x.cols());
  const Eigen::MatrixXd h = hidden_output(hidden, scaler.transform(raw_x));
  Eigen::MatrixXd beta = solve_output_weights(h, targets, config.regularization);
  return ElmModel(config, scaler, std::move(hidden), std::move(beta));
}

ElmModel train(const ElmConfig& config, const Eigen::MatrixXd& raw_x, const Eigen::MatrixXd& targets) {
  if (raw_x.rows() == 0) throw InvalidInputError("training needs at least one row");
  return train(config, raw_x, targets, Scaler::fit(raw_x));
}

ElmModel train(const ElmConfig& config, const Dataset& data) {
  const Eigen::MatrixXd x = data.features();
  return train(config, x, Eigen::MatrixXd(data.targets()), Scaler::fit(x));
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json encode_values(const double* data, std::size_t n) {
  json arr = json::array();
  for (std::size_t i = 0; i < n; ++i) arr.push_back(format_exact(data[i]));
  return arr;
}

json encode_row_major(const Eigen::MatrixXd& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  return encode_values(rm.data(), static_cast<std::size_t>(rm.size()));
}

// Payload covered by the checksum: every numeric string of the scaler and
// the three weight arrays, in document order, joined by ','.
std::string checksum_of(const json& doc) {
  std::string payload;
  auto append = [&](const json& arr) {
    for (const auto& v : arr) {
      payload += v.get<std::string>();
      payload += ',';
    }
  };
  append(doc.at("scaler").at("min"));
  append(doc.at("scaler").at("max"));
  payload += doc.at("scaler").at("lo").get<std::string>() + ",";
  payload += doc.at("scaler").at("hi").get<std::string>() + ",";
  append(doc.at("input_weights"));
  append(doc.at("biases"));
  append(doc.at("output_weights"));
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(payload)));
  return buf;
}

double decode_number(const json& v, const char* what) {
  if (!v.is_string()) throw ModelFormatError(std::string(what) + ": expected a decimal string");
  const auto d = parse_double(v.get<std::string>());
  if (!d) throw ModelFormatError(std::string(what) + ": malformed number '" + v.get<std::string>() + "'");
  return *d;
}

std::vector<double> decode_array(const json& arr, std::size_t expected, const char* what) {
  if (!arr.is_array() || arr.size() != expected)
    throw ModelFormatError(std::string(what) + ": expected an array of " + std::to_string(expected) + " values");
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : arr) out.push_back(decode_number(v, what));
  return out;
}

}  // namespace

std::string model_to_json(const ElmModel& model) {
  const auto& cfg = model.config();
  json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["kind"] = "elmsol.elm_model";
  doc["config"] = {
      {"hidden_nodes", cfg.hidden_nodes},
      {"regularization", cfg.regularization ? json(format_exact(*cfg.regularization)) : json(nullptr)},
      {"weight_range", json::array({format_exact(cfg.weight_lo), format_exact(cfg.weight_hi)})},
      {"seed", std::to_string(cfg.seed)},
      {"activation", cfg.activation},
  };
  doc["dims"] = {{"inputs", model.n_inputs()},
                 {"hidden", model.input_weights().rows()},
                 {"outputs", model.n_outputs()}};
  const auto& sc = model.scaler();
  doc["scaler"] = {{"min", encode_values(sc.min().data(), sc.dims())},
                   {"max", encode_values(sc.max().data(), sc.dims())},
                   {"lo", format_exact(sc.lo())},
                   {"hi", format_exact(sc.hi())}};
  doc["input_weights"] = encode_row_major(model.input_weights());
  doc["biases"] = encode_values(model.biases().data(), static_cast<std::size_t>(model.biases().size()));
  doc["output_weights"] = encode_row_major(model.output_weights());
  doc["checksum"] = checksum_of(doc);
  return doc.dump(2) + "\n";
}

ElmModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("schema_version"))
      throw ModelFormatError("malformed model file: missing schema_version");
    const auto& ver = doc.at("schema_version");
    if (!ver.is_number_integer() || ver.get<long long>() != kModelSchemaVersion)
      throw VersionError("unsupported model schema_version " + ver.dump() + " (expected " +
                         std::to_string(kModelSchemaVersion) + ")");

    const std::string expected = checksum_of(doc);
    if (doc.at("checksum").get<std::string>() != expected)
      throw ChecksumError("model checksum mismatch: file says " + doc.at("checksum").get<std::string>() +
                          ", payload hashes to " + expected);

    const auto& c = doc.at("config");
    ElmConfig cfg;
    cfg.hidden_nodes = c.at("hidden_nodes").get<int>();
    if (!c.at("regularization").is_null()) cfg.regularization = decode_number(c.at("regularization"), "regularization");
    const auto range = decode_array(c.at("weight_range"), 2, "weight_range");
    cfg.weight_lo = range[0];
    cfg.weight_hi = range[1];
    cfg.seed = std::stoull(c.at("seed").get<std::string>());
    cfg.activation = c.at("activation").get<std::string>();

    const auto& dims = doc.at("dims");
    const auto n = dims.at("inputs").get<Eigen::Index>();
    const auto l = dims.at("hidden").get<Eigen::Index>();
    const auto m = dims.at("outputs").get<Eigen::Index>();
    if (n < 1 || l < 1 || m < 1) throw ModelFormatError("model dims must be positive");
    const auto nn = static_cast<std::size_t>(n);
    const auto ll = static_cast<std::size_t>(l);
    const auto mm = static_cast<std::size_t>(m);

    const auto& s = doc.at("scaler");
    Scaler scaler(decode_array(s.at("min"), nn, "scaler.min"), decode_array(s.at("max"), nn, "scaler.max"),
                  decode_number(s.at("lo"), "scaler.lo"), decode_number(s.at("hi"), "scaler.hi"));

    const auto w = decode_array(doc.at("input_weights"), ll * nn, "input_weights");
    const auto b = decode_array(doc.at("biases"), ll, "biases");
    const auto beta = decode_array(doc.at("output_weights"), ll * mm, "output_weights");

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    HiddenParams hidden{Eigen::Map<const RowMajor>(w.data(), l, n),
                        Eigen::Map<const Eigen::VectorXd>(b.data(), l)};
    Eigen::MatrixXd out = Eigen::Map<const RowMajor>(beta.data(), l, m);
    return ElmModel(std::move(cfg), std::move(scaler), std::move(hidden), std::move(out));
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  } catch (const std::logic_error& e) {  // stoull
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  } catch (const ModelFormatError&) {
    throw;
  } catch (const Error& e) {
    throw ModelFormatError(std::string("model file describes an invalid model: ") + e.what());
  }
}

void save_model(const ElmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(model);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

ElmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace elmsol
