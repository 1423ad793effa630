#include "sigsar/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "sigsar/funcdata.hpp"

namespace sigsar {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethodNames{{
    {Method::baseline_fpca_thresh, "baseline_fpca_thresh"},
    {Method::baseline_fpca_free, "baseline_fpca_free"},
    {Method::sig_proj_std_thresh, "sig_proj_std_thresh"},
    {Method::sig_proj_std_free, "sig_proj_std_free"},
    {Method::sig_proj_raw_thresh, "sig_proj_raw_thresh"},
    {Method::sig_proj_raw_free, "sig_proj_raw_free"},
    {Method::sig_penalized, "sig_penalized"},
}};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PreparedSplit {
  SarBlock train;
  SarBlock validation;
  SarBlock test;
};

PreparedSplit prepare(const DatasetSplit& data) {
  if (data.train.empty() || data.validation.empty() || data.test.empty())
    throw std::invalid_argument("every split block must contain units");
  return {to_block(data.train), to_block(data.validation), to_block(data.test)};
}

// Score matrices of the three blocks in a common basis, plus the component
// choice of the inertia rule.
struct Scores {
  Eigen::MatrixXd train;
  Eigen::MatrixXd validation;
  Eigen::MatrixXd test;
  Eigen::Index rank = 0;
  Eigen::Index threshold_components = 0;
};

Scores signature_scores(const PreparedSplit& s, bool standardize, const TuningOptions& tuning) {
  const int dim = s.train.paths.front().dim() + (tuning.augment.time ? 1 : 0);
  const int depth = max_depth_for_budget(dim, tuning.max_sig_coefficients);
  auto features = [&](const SarBlock& b) {
    const Eigen::MatrixXd xi = build_signature_design(b.paths, depth, tuning.augment);
    return Eigen::MatrixXd(xi.rightCols(xi.cols() - 1));  // the level-0 column is constant
  };
  const Eigen::MatrixXd f_train = features(s.train);
  const ProjectionBasis basis = pca_fit(f_train, standardize);
  Scores out;
  out.train = basis.scores(f_train);
  out.validation = basis.scores(features(s.validation));
  out.test = basis.scores(features(s.test));
  out.rank = basis.numerical_rank();
  out.threshold_components = select_components(basis, tuning.inertia_threshold);
  return out;
}

Scores fpca_scores(const PreparedSplit& s, const TuningOptions& tuning) {
  const SplineBasis spline = SplineBasis::with_interior_knots(tuning.spline_interior_knots);
  const Eigen::Index q = spline.dimension();
  auto coefficients = [&](const SarBlock& b) {
    const Eigen::Index p = b.paths.front().dim();
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(b.paths.size()), p * q);
    for (std::size_t i = 0; i < b.paths.size(); ++i) {
      const Eigen::MatrixXd c = curve_smooth(b.paths[i].values(), b.paths[i].times(), spline);
      for (Eigen::Index ch = 0; ch < p; ++ch) rows.block(static_cast<Eigen::Index>(i), ch * q, 1, q) = c.col(ch).transpose();
    }
    return rows;
  };
  const FunctionalPca fpca = fpca_fit(coefficients(s.train), spline.gram());
  Scores out;
  out.train = fpca.scores(coefficients(s.train));
  out.validation = fpca.scores(coefficients(s.validation));
  out.test = fpca.scores(coefficients(s.test));
  out.rank = fpca.basis.numerical_rank();
  out.threshold_components = select_components(fpca.basis, tuning.inertia_threshold);
  return out;
}

MethodResult projection_pipeline(const PreparedSplit& s, const Scores& z, bool free_choice,
                                 const TuningOptions& tuning) {
  const double y_mean = s.train.y.mean();
  const Eigen::VectorXd y_centered = s.train.y.array() - y_mean;
  // Keep at least two residual degrees of freedom.
  const Eigen::Index cap = std::min<Eigen::Index>(z.rank, s.train.y.size() - 2);
  if (cap < 1) throw std::runtime_error("projection pipeline: no usable principal component");

  auto fit_with = [&](Eigen::Index c) {
    return fit_projection(y_centered, z.train.leftCols(c), s.train.system, tuning.rho);
  };

  Eigen::Index chosen = std::min(z.threshold_components, cap);
  if (free_choice) {
    const Eigen::Index last = std::min<Eigen::Index>(tuning.c_max, cap);
    double best = std::numeric_limits<double>::infinity();
    chosen = 0;
    for (Eigen::Index c = 1; c <= last; ++c) {
      try {
        const ProjectionFit fit = fit_with(c);
        const double mse =
            mean_squared_error(s.validation.y, predict(fit, z.validation.leftCols(c), s.validation.system.weights, y_mean));
        if (mse < best) {
          best = mse;
          chosen = c;
        }
      } catch (const std::invalid_argument&) {
        // rank-deficient leading block: skip this C
      }
    }
    if (chosen == 0) throw std::runtime_error("projection pipeline: every component count failed");
  }

  const ProjectionFit fit = fit_with(chosen);
  MethodResult out;
  out.rho_hat = fit.rho;
  out.sigma2_hat = fit.sigma2;
  out.test_mse = mean_squared_error(s.test.y, predict(fit, z.test.leftCols(chosen), s.test.system.weights, y_mean));
  out.tuning = fmt::format("C={}", chosen);
  out.converged = true;
  return out;
}

MethodResult penalized_pipeline(const PreparedSplit& s, const TuningOptions& tuning) {
  const std::vector<double> grid =
      tuning.lambda_grid.empty() ? default_lambda_grid(s.train.y.size()) : tuning.lambda_grid;
  PenalizedOptions options = tuning.penalized;
  options.rho = tuning.rho;
  const PenalizedSelection sel = select_penalized(s.train, s.validation, tuning.d_max, grid, tuning.augment, options);
  const Eigen::MatrixXd xi_test = build_signature_design(s.test.paths, sel.depth, tuning.augment);
  MethodResult out;
  out.rho_hat = sel.fit.rho;
  out.sigma2_hat = sel.fit.sigma2;
  out.test_mse = mean_squared_error(s.test.y, predict(sel.fit, xi_test, s.test.system.weights));
  out.tuning = fmt::format("D={};lambda={}", sel.depth, sel.lambda);
  out.converged = sel.fit.converged;
  return out;
}

MethodResult run_prepared(Method method, const PreparedSplit& s, const TuningOptions& tuning) {
  switch (method) {
    case Method::baseline_fpca_thresh:
      return projection_pipeline(s, fpca_scores(s, tuning), false, tuning);
    case Method::baseline_fpca_free:
      return projection_pipeline(s, fpca_scores(s, tuning), true, tuning);
    case Method::sig_proj_std_thresh:
      return projection_pipeline(s, signature_scores(s, true, tuning), false, tuning);
    case Method::sig_proj_std_free:
      return projection_pipeline(s, signature_scores(s, true, tuning), true, tuning);
    case Method::sig_proj_raw_thresh:
      return projection_pipeline(s, signature_scores(s, false, tuning), false, tuning);
    case Method::sig_proj_raw_free:
      return projection_pipeline(s, signature_scores(s, false, tuning), true, tuning);
    case Method::sig_penalized:
      return penalized_pipeline(s, tuning);
  }
  throw std::invalid_argument("unknown method");
}

ResultRow base_row(const ExperimentConfig& cell, int replicate, Method method) {
  ResultRow row;
  row.model = cell.model;
  row.p = cell.p;
  row.k = cell.k;
  row.rho0 = cell.rho0;
  row.replicate = replicate;
  row.method = std::string(method_name(method));
  return row;
}

void mark_failed(ResultRow& row) {
  row.rho_hat = kNaN;
  row.sigma2_hat = kNaN;
  row.test_mse = kNaN;
  row.tuning.clear();
  row.converged = false;
  row.failed = true;
}

long long rho_code(double rho) { return std::llround(rho * 1e6); }

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  throw std::invalid_argument("unknown method");
}

Method parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames)
    if (n == name) return method;
  throw std::invalid_argument(fmt::format("unknown method '{}'", name));
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& entry : kMethodNames) out.push_back(entry.first);
    return out;
  }();
  return methods;
}

std::vector<double> default_lambda_grid(Eigen::Index n_train, double lo, double hi, int count) {
  if (n_train < 1 || count < 1 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("invalid lambda grid");
  std::vector<double> out;
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    const double e = count == 1 ? a : a + (b - a) * i / (count - 1);
    out.push_back(std::pow(10.0, e) / static_cast<double>(n_train));
  }
  return out;
}

int max_depth_for_budget(int dim, std::size_t max_coefficients) {
  int depth = 1;
  while (depth < 32 && sig_dim(dim, depth + 1) <= max_coefficients) ++depth;
  return depth;
}

SarBlock to_block(const SimulatedDataset& data) { return {data.y, data.paths, SarSystem(data.weights)}; }

MethodResult run_method(Method method, const DatasetSplit& data, const TuningOptions& tuning) {
  return run_prepared(method, prepare(data), tuning);
}

ResultKey row_key(const ResultRow& row) {
  return {row.model, row.p, row.k, rho_code(row.rho0), row.replicate, row.method};
}

ResultKey row_key(const ExperimentConfig& cell, int replicate, Method method) {
  return {cell.model, cell.p, cell.k, rho_code(cell.rho0), replicate, std::string(method_name(method))};
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
}

std::vector<ResultRow> run_cell(const ExperimentConfig& cell, const std::vector<Method>& methods,
                                const TuningOptions& tuning, const RunOptions& options) {
  cell.validate();
  using Clock = std::chrono::steady_clock;
  std::vector<std::vector<ResultRow>> per_replicate(static_cast<std::size_t>(cell.replicates));
  std::mutex log_mutex;
  auto report = [&](const std::string& msg) {
    if (!options.on_error) return;
    std::lock_guard lock(log_mutex);
    options.on_error(msg);
  };

  auto work = [&](int r) {
    std::vector<Method> todo;
    for (Method m : methods)
      if (!options.skip.contains(row_key(cell, r, m))) todo.push_back(m);
    if (todo.empty()) return;
    auto& out = per_replicate[static_cast<std::size_t>(r)];

    std::optional<PreparedSplit> prepared;
    std::string setup_error;
    try {
      const SimulatedDataset data = gen_dataset(cell, r);
      auto rng = replicate_rng(cell, r, SeedStream::split);
      prepared = prepare(split_dataset(data, cell.split, cell.k, rng));
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    for (Method m : todo) {
      ResultRow row = base_row(cell, r, m);
      const auto start = Clock::now();
      try {
        if (!prepared) throw std::runtime_error(setup_error);
        const MethodResult res = run_prepared(m, *prepared, tuning);
        row.rho_hat = res.rho_hat;
        row.sigma2_hat = res.sigma2_hat;
        row.test_mse = res.test_mse;
        row.tuning = res.tuning;
        row.converged = res.converged;
        if (!std::isfinite(res.test_mse)) throw std::runtime_error("non-finite test MSE");
      } catch (const std::exception& e) {
        mark_failed(row);
        report(fmt::format("model={} p={} k={} rho={} replicate={} method={}: {}", cell.model, cell.p, cell.k,
                           cell.rho0, r, row.method, e.what()));
      }
      if (options.timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      out.push_back(std::move(row));
    }
  };

  const int threads = std::max(1, std::min(options.threads, cell.replicates));
  if (threads == 1) {
    for (int r = 0; r < cell.replicates; ++r) work(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int r = next++; r < cell.replicates; r = next++) work(r);
      });
  }

  std::vector<ResultRow> rows;
  for (auto& block : per_replicate)
    for (auto& row : block) rows.push_back(std::move(row));
  sort_rows(rows);
  return rows;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no result rows");
  using GroupKey = std::tuple<int, int, int, long long, std::string>;
  std::map<GroupKey, std::vector<const ResultRow*>> groups;
  for (const auto& row : rows) groups[{row.model, row.p, row.k, rho_code(row.rho0), row.method}].push_back(&row);

  std::vector<SummaryRow> out;
  for (const auto& [key, members] : groups) {
    SummaryRow s;
    s.model = members.front()->model;
    s.p = members.front()->p;
    s.k = members.front()->k;
    s.rho0 = members.front()->rho0;
    s.method = members.front()->method;
    s.rows = static_cast<int>(members.size());
    std::vector<double> rho, mse, wall;
    int converged = 0;
    for (const ResultRow* r : members) {
      if (r->wall_ms) wall.push_back(*r->wall_ms);
      if (r->failed) {
        ++s.failed;
        continue;
      }
      if (r->converged) ++converged;
      rho.push_back(r->rho_hat);
      mse.push_back(r->test_mse);
    }
    s.convergence_rate = static_cast<double>(converged) / static_cast<double>(s.rows);
    if (rho.empty()) {
      s.rho_median = s.rho_iqr = s.mse_median = s.mse_iqr = s.mse_mean = kNaN;
    } else {
      s.rho_median = quantile(rho, 0.5);
      s.rho_iqr = quantile(rho, 0.75) - quantile(rho, 0.25);
      s.mse_median = quantile(mse, 0.5);
      s.mse_iqr = quantile(mse, 0.75) - quantile(mse, 0.25);
      double sum = 0.0;
      for (double v : mse) sum += v;
      s.mse_mean = sum / static_cast<double>(mse.size());
    }
    if (!wall.empty()) {
      double sum = 0.0;
      for (double v : wall) sum += v;
      s.wall_ms_mean = sum / static_cast<double>(wall.size());
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sigsar
