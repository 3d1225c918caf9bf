#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "elmsol/dataset.hpp"
#include "elmsol/elm.hpp"

namespace elmsol {

/// Inclusive range first, first + step, ... <= last.
struct NodeRange {
  int first = 1;
  int last = 60;
  int step = 1;

  /// Throws InvalidInputError when empty or malformed (first < 1, step < 1).
  std::vector<int> values() const;
  /// Parses "first:last[:step]" or a single count.
  static NodeRange parse(const std::string& text);
};

struct SweepPoint {
  int hidden_nodes = 0;
  int repeat_index = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  bool failed = false;
  std::string error;  // set when failed
};

struct SweepReport {
  std::vector<SweepPoint> points;  // node-major, then repeat
  int selected_nodes = 0;
  std::string selection_rule = "min_mean_test_rmse;tie=smallest_nodes";

  /// Mean over non-failed repeats; NaN when every repeat at `nodes` failed.
  double mean_test_rmse(int nodes) const;
  double mean_train_rmse(int nodes) const;
};

/// Seed of one sweep cell: mix_seed(base_seed, hidden_nodes, repeat_index)
/// (SplitMix64 chain, see random.hpp).
std::uint64_t sweep_cell_seed(std::uint64_t base_seed, int hidden_nodes, int repeat_index);

struct SweepOptions {
  NodeRange nodes;
  int repeats = 5;
  /// 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Trains one model per (node count, repeat) on `train` with a scaler fitted
/// on `train`, scoring RMSE on both parts. The selected count minimises the
/// mean test RMSE over repeats, ties going to the smallest count. Cells that
/// throw are kept as failed points and ignored by the selection.
/// Throws SweepError when every cell fails.
SweepReport sweep(const Dataset& train, const Dataset& test, const SweepOptions& options,
                  const ElmConfig& base_config);

/// CSV `hidden_nodes,repeat,train_rmse,test_rmse`; failed cells carry "nan".
std::string sweep_to_csv(const SweepReport& report);
void write_sweep_csv(const SweepReport& report, const std::filesystem::path& path);
/// Reads the CSV back and re-derives the selection.
SweepReport read_sweep_csv(const std::filesystem::path& path);

/// Applies the selection rule to `report.points`.
int select_nodes(const std::vector<SweepPoint>& points);

}  // namespace elmsol
