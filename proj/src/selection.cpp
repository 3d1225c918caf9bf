#include "elmsol/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "elmsol/error.hpp"
#include "elmsol/metrics.hpp"
#include "elmsol/numfmt.hpp"
#include "elmsol/random.hpp"

namespace elmsol {

std::vector<int> NodeRange::values() const {
  if (first < 1 || step < 1 || last < first)
    throw InvalidInputError("node range " + std::to_string(first) + ":" + std::to_string(last) + ":" +
                            std::to_string(step) + " is empty or malformed");
  std::vector<int> out;
  for (int v = first; v <= last; v += step) out.push_back(v);
  return out;
}

NodeRange NodeRange::parse(const std::string& text) {
  std::vector<int> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidInputError("bad node range '" + text + "' (expected first:last[:step])");
    }
  }
  NodeRange r;
  if (parts.size() == 1) {
    r = {parts[0], parts[0], 1};
  } else if (parts.size() == 2) {
    r = {parts[0], parts[1], 1};
  } else if (parts.size() == 3) {
    r = {parts[0], parts[1], parts[2]};
  } else {
    throw InvalidInputError("bad node range '" + text + "' (expected first:last[:step])");
  }
  r.values();
  return r;
}

std::uint64_t sweep_cell_seed(std::uint64_t base_seed, int hidden_nodes, int repeat_index) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(hidden_nodes), static_cast<std::uint64_t>(repeat_index));
}

namespace {

double mean_of(const std::vector<SweepPoint>& points, int nodes, bool test) {
  double sum = 0.0;
  int count = 0;
  for (const auto& p : points) {
    if (p.hidden_nodes != nodes || p.failed) continue;
    sum += test ? p.test_rmse : p.train_rmse;
    ++count;
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double SweepReport::mean_test_rmse(int nodes) const { return mean_of(points, nodes, true); }
double SweepReport::mean_train_rmse(int nodes) const { return mean_of(points, nodes, false); }

int select_nodes(const std::vector<SweepPoint>& points) {
  // node count -> (sum, count) over successful repeats; std::map keeps counts
  // ascending so the first strict minimum is the smallest tied count.
  std::map<int, std::pair<double, int>> acc;
  for (const auto& p : points) {
    if (p.failed) continue;
    auto& [sum, count] = acc[p.hidden_nodes];
    sum += p.test_rmse;
    ++count;
  }
  if (acc.empty()) throw SweepError("every sweep cell failed; nothing to select");
  int best = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (const auto& [nodes, sc] : acc) {
    const double m = sc.first / sc.second;
    if (m < best_mean) {
      best_mean = m;
      best = nodes;
    }
  }
  if (best == 0) throw SweepError("no finite test RMSE in sweep");
  return best;
}

SweepReport sweep(const Dataset& train, const Dataset& test, const SweepOptions& options,
                  const ElmConfig& base_config) {
  if (options.repeats < 1) throw InvalidInputError("repeats must be >= 1");
  base_config.validate();
  const auto counts = options.nodes.values();

  const Eigen::MatrixXd x_train = train.features();
  const Eigen::MatrixXd x_test = test.features();
  const Eigen::VectorXd t_train = train.targets();
  const Eigen::VectorXd t_test = test.targets();
  const Scaler scaler = Scaler::fit(x_train);

  std::vector<SweepPoint> points;
  points.reserve(counts.size() * static_cast<std::size_t>(options.repeats));
  for (int nodes : counts)
    for (int r = 0; r < options.repeats; ++r) points.push_back(SweepPoint{nodes, r, 0.0, 0.0, false, {}});

  auto run_cell = [&](SweepPoint& cell) {
    try {
      ElmConfig cfg = base_config;
      cfg.hidden_nodes = cell.hidden_nodes;
      cfg.seed = sweep_cell_seed(base_config.seed, cell.hidden_nodes, cell.repeat_index);
      const ElmModel model = elmsol::train(cfg, x_train, Eigen::MatrixXd(t_train), scaler);
      const Eigen::VectorXd p_train = model.predict(x_train);
      const Eigen::VectorXd p_test = model.predict(x_test);
      cell.train_rmse = rmse(std::span(t_train.data(), t_train.size()), std::span(p_train.data(), p_train.size()));
      cell.test_rmse = rmse(std::span(t_test.data(), t_test.size()), std::span(p_test.data(), p_test.size()));
      if (!std::isfinite(cell.train_rmse) || !std::isfinite(cell.test_rmse))
        throw SolverError("non-finite RMSE", 0.0);
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
      cell.train_rmse = cell.test_rmse = std::numeric_limits<double>::quiet_NaN();
    }
  };

  // Cells are independent; each worker writes only its own slot, so the
  // report order is fixed regardless of scheduling.
  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, points.size()));
  if (workers <= 1) {
    for (auto& cell : points) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) run_cell(points[i]);
      });
  }

  SweepReport report;
  report.points = std::move(points);
  report.selected_nodes = select_nodes(report.points);
  return report;
}

std::string sweep_to_csv(const SweepReport& report) {
  std::ostringstream out;
  out << "hidden_nodes,repeat,train_rmse,test_rmse\n";
  for (const auto& p : report.points)
    out << p.hidden_nodes << ',' << p.repeat_index << ',' << format_exact(p.train_rmse) << ','
        << format_exact(p.test_rmse) << '\n';
  return out.str();
}

void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << sweep_to_csv(report);
}

SweepReport read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || trim(line) != "hidden_nodes,repeat,train_rmse,test_rmse")
    throw SchemaError("'" + path.string() + "' is not a sweep CSV", "hidden_nodes");
  SweepReport report;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> f;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 4) throw ParseError("sweep CSV row " + std::to_string(row) + ": expected 4 fields", row);
    const auto nodes = parse_double(f[0]);
    const auto rep = parse_double(f[1]);
    const auto tr = parse_double(f[2]);
    const auto te = parse_double(f[3]);
    if (!nodes || !rep || !tr || !te) throw ParseError("sweep CSV row " + std::to_string(row) + ": bad number", row);
    SweepPoint p{static_cast<int>(*nodes), static_cast<int>(*rep), *tr, *te, false, {}};
    p.failed = std::isnan(p.train_rmse) || std::isnan(p.test_rmse);
    report.points.push_back(p);
  }
  report.selected_nodes = select_nodes(report.points);
  return report;
}

}  // namespace elmsol
