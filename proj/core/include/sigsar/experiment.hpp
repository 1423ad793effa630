#pragma once

// Simulation-study runner: estimator pipelines, tuning on validation MSE and
// per-cell result rows.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "sigsar/estimators.hpp"
#include "sigsar/simgen.hpp"

namespace sigsar {

enum class Method {
  baseline_fpca_thresh,
  baseline_fpca_free,
  sig_proj_std_thresh,
  sig_proj_std_free,
  sig_proj_raw_thresh,
  sig_proj_raw_free,
  sig_penalized,
};

std::string_view method_name(Method m);
/// Throws std::invalid_argument for an unknown name.
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();

struct TuningOptions {
  /// Ridge levels for the penalised fit; empty means
  /// logspace(1e-6, 1e2, 8) / N_train.
  std::vector<double> lambda_grid;
  int d_max = 3;
  int c_max = 30;
  double inertia_threshold = 0.95;
  AugmentOptions augment{true, true};
  /// Largest signature size fed to the PCA pipelines.
  std::size_t max_sig_coefficients = 1000;
  int spline_interior_knots = 12;
  PenalizedOptions penalized{};
  RhoSearchOptions rho{};
};

/// logspace(lo, hi, count) / n.
std::vector<double> default_lambda_grid(Eigen::Index n_train, double lo = 1e-6, double hi = 1e2, int count = 8);

/// Largest D with sig_dim(dim, D) <= max_coefficients (at least 1).
int max_depth_for_budget(int dim, std::size_t max_coefficients);

struct MethodResult {
  double rho_hat = 0.0;
  double sigma2_hat = 0.0;
  double test_mse = 0.0;
  std::string tuning;
  bool converged = true;
};

/// Tunes on the validation block, fits on the training block and evaluates on
/// the test block.
MethodResult run_method(Method method, const DatasetSplit& data, const TuningOptions& tuning);

SarBlock to_block(const SimulatedDataset& data);

struct ResultRow {
  int model = 0;
  int p = 0;
  int k = 0;
  double rho0 = 0.0;
  int replicate = 0;
  std::string method;
  double rho_hat = 0.0;  ///< NaN for failed rows
  double sigma2_hat = 0.0;
  double test_mse = 0.0;
  std::string tuning;
  bool converged = false;
  std::optional<double> wall_ms;
  bool failed = false;
};

/// Identity of a row: (model, p, k, round(rho0 * 1e6), replicate, method).
using ResultKey = std::tuple<int, int, int, long long, int, std::string>;
ResultKey row_key(const ResultRow& row);
ResultKey row_key(const ExperimentConfig& cell, int replicate, Method method);

/// Canonical order: cell (model, p, k, rho0), replicate, method name.
void sort_rows(std::vector<ResultRow>& rows);

struct RunOptions {
  int threads = 1;
  bool timing = false;  ///< record wall_ms (makes output time dependent)
  std::set<ResultKey> skip;
  std::function<void(const std::string&)> on_error;  ///< called for failed (replicate, method) pairs
};

/// All replicates of one cell, in canonical order. Failures become rows with
/// failed = true. The rows do not depend on the thread count.
std::vector<ResultRow> run_cell(const ExperimentConfig& cell, const std::vector<Method>& methods,
                                const TuningOptions& tuning, const RunOptions& options = {});

struct SummaryRow {
  int model = 0;
  int p = 0;
  int k = 0;
  double rho0 = 0.0;
  std::string method;
  int rows = 0;
  int failed = 0;
  double rho_median = 0.0;
  double rho_iqr = 0.0;
  double mse_median = 0.0;
  double mse_iqr = 0.0;
  double mse_mean = 0.0;
  double convergence_rate = 0.0;  ///< converged rows / all rows (failed rows count as not converged)
  std::optional<double> wall_ms_mean;
};

/// Type-7 (linear interpolation) quantile of unsorted data.
double quantile(std::vector<double> values, double q);

/// Per (cell, method) summary. Failed rows are excluded from the quantiles.
/// Throws std::invalid_argument for empty input.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

}  // namespace sigsar
