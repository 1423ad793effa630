#pragma once

// JSON description of a simulation grid.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sigsar/experiment.hpp"
#include "sigsar/simgen.hpp"

namespace sigsar {

/// Cartesian grid of cells plus shared tuning settings. Defaults are the
/// desk-scale profile.
struct GridConfig {
  std::vector<int> models{1, 2, 3};
  std::vector<int> ps{2};
  std::vector<int> ks{4};
  std::vector<double> rhos{0.0, 0.2, 0.4, 0.6, 0.8};
  int n = 200;
  int grid = 60;
  int n_times = 101;
  int replicates = 50;
  std::uint64_t master_seed = 20240607;
  SplitFractions split{};
  std::vector<Method> methods = all_methods();
  std::vector<double> lambda_grid;  ///< empty: default grid scaled by N_train
  int d_max = 3;
  int c_max = 30;
  double inertia_threshold = 0.95;
  bool augment_basepoint = true;
  bool augment_time = true;

  /// The large grid: p in {2, 6, 10}, k in {4, 8}, 200 replicates.
  void make_full();

  /// Cells in canonical order (model, p, k, rho). Each is validated.
  std::vector<ExperimentConfig> cells() const;
  TuningOptions tuning() const;
  void validate() const;
};

/// Parses a JSON document. All keys are optional; unknown keys, wrong types
/// and out-of-domain values throw std::invalid_argument.
GridConfig parse_grid_config(const std::string& json_text);

/// Throws std::runtime_error naming the path when it cannot be read.
GridConfig load_grid_config(const std::filesystem::path& path);

std::string to_json(const GridConfig& config);

}  // namespace sigsar
