// Acceptance suite: one PASS/FAIL line per criterion.
//
//   sigsar_acceptance            run criteria 1-8
//   sigsar_acceptance 1 4 5      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "sigsar/config.hpp"
#include "sigsar/csv_io.hpp"
#include "sigsar/estimators.hpp"
#include "sigsar/experiment.hpp"
#include "sigsar/inference.hpp"
#include "sigsar/signature.hpp"
#include "sigsar/simgen.hpp"
#include "sigsar/spatial.hpp"
#include "test_support.hpp"

using namespace sigsar;
namespace st = sigsar::testing;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Desk-scale runs shared by criteria 6-8.

class DeskRuns {
 public:
  DeskRuns() : cells_(GridConfig{}.cells()), tuning_(GridConfig{}.tuning()) {}

  const std::vector<ResultRow>& cell(int model, double rho0) {
    const auto key = std::make_pair(model, std::lround(rho0 * 1e6));
    auto it = rows_.find(key);
    if (it != rows_.end()) return it->second;
    for (const auto& c : cells_) {
      if (c.model != model || std::lround(c.rho0 * 1e6) != key.second) continue;
      const auto t0 = Clock::now();
      auto rows = run_cell(c, all_methods(), tuning_);
      seconds_[key] = seconds_since(t0);
      return rows_.emplace(key, std::move(rows)).first->second;
    }
    throw std::logic_error("no such desk-scale cell");
  }

  double seconds(int model, double rho0) const {
    const auto it = seconds_.find({model, std::lround(rho0 * 1e6)});
    return it == seconds_.end() ? 0.0 : it->second;
  }

  /// Every cell of the desk-scale grid, single threaded, in canonical order.
  std::vector<ResultRow> all() {
    std::vector<ResultRow> out;
    for (const auto& c : cells_) {
      const auto& rows = cell(c.model, c.rho0);
      out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
  }

  std::vector<ResultRow> all_threaded(int threads) const {
    std::vector<ResultRow> out;
    RunOptions opts;
    opts.threads = threads;
    for (const auto& c : cells_) {
      auto rows = run_cell(c, all_methods(), tuning_, opts);
      out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
  }

 private:
  std::vector<ExperimentConfig> cells_;
  TuningOptions tuning_;
  std::map<std::pair<int, long>, std::vector<ResultRow>> rows_;
  std::map<std::pair<int, long>, double> seconds_;
};

std::map<std::string, double> mean_mse_by_method(const std::vector<ResultRow>& rows) {
  std::map<std::string, double> out;
  for (const auto& s : summarize(rows)) out[s.method] = s.mse_mean;
  return out;
}

// ---------------------------------------------------------------------------
// 1. Signature vs nested quadrature

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int paths = 0;
  for (int p : {2, 3})
    for (int rep = 0; rep < 20; ++rep) {
      const auto path = st::random_path(rng, 6, p);  // 5 segments
      const auto sig = path_signature(path, 3);
      const auto oracle = st::quadrature_signature(path, 3, 2000);  // 10^4 refinement intervals
      worst = std::max(worst, max_abs_diff(sig.flat(), oracle) / max_abs(oracle));
      ++paths;
    }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 10.0,
          fmt::format("{} paths (2-D and 3-D, D = 3): max relative error {:.2e} (limit 1e-6), {:.1f} s (limit 10 s)",
                      paths, worst, secs),
          secs};
}

// ---------------------------------------------------------------------------
// 2. Algebraic identities

// Random walk on the dyadic grid 2^-20, so that translation by an integer is
// exact in floating point.
DiscretePath dyadic_path(std::mt19937_64& rng, int points, int p) {
  Eigen::MatrixXd v = st::random_matrix(rng, points, p);
  for (int i = 1; i < points; ++i) v.row(i) += v.row(i - 1);
  v = (v * 1048576.0).array().round() / 1048576.0;
  return DiscretePath::uniform(v);
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  const int n_paths = 100;
  double chen = 0.0, shuffle = 0.0, scaling = 0.0;
  bool translation_exact = true, reparam_exact = true;

  for (int rep = 0; rep < n_paths; ++rep) {
    const int p = 2 + rep % 2;
    const int depth = 4;
    const auto path = dyadic_path(rng, 8, p);
    const auto sig = path_signature(path, depth);
    const double scale = max_abs(sig.flat());

    const Eigen::Index cut = 1 + rep % 6;
    const auto head = path_signature(DiscretePath::uniform(path.values().topRows(cut + 1)), depth);
    const auto tail = path_signature(DiscretePath::uniform(path.values().bottomRows(path.length() - cut)), depth);
    chen = std::max(chen, max_abs_diff(tensor_mul(head, tail).flat(), sig.flat()) / scale);

    double worst_shuffle = 0.0;
    for (const Word& u : all_words(p, depth))
      for (const Word& v : all_words(p, depth)) {
        if (u.size() + v.size() > static_cast<std::size_t>(depth)) continue;
        double rhs = 0.0;
        for (const Word& w : shuffle_product(u, v)) rhs += sig[w];
        const double lhs = sig[u] * sig[v];
        worst_shuffle = std::max(worst_shuffle, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    shuffle = std::max(shuffle, worst_shuffle);

    Eigen::MatrixXd shifted = path.values();
    std::uniform_int_distribution<int> offset(-100, 100);
    for (int c = 0; c < p; ++c) shifted.col(c).array() += offset(rng);
    const auto moved = path_signature(DiscretePath(shifted, path.times()), depth);
    translation_exact = translation_exact && std::equal(moved.flat().begin(), moved.flat().end(), sig.flat().begin());

    const auto retimed = path_signature(DiscretePath(path.values(), st::random_times(rng, 8)), depth);
    reparam_exact = reparam_exact && std::equal(retimed.flat().begin(), retimed.flat().end(), sig.flat().begin());

    const double lambda = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    const auto scaled = path_signature(DiscretePath::uniform(lambda * path.values()), depth);
    double num = 0.0, den = 0.0;
    for (int d = 0; d <= depth; ++d) {
      const auto a = scaled.level(d);
      const auto b = sig.level(d);
      const double f = std::pow(lambda, d);
      for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - f * b[i]));
        den = std::max(den, std::abs(f * b[i]));
      }
    }
    scaling = std::max(scaling, num / den);
  }
  const double secs = seconds_since(t0);
  const bool pass = chen < 1e-12 && shuffle < 1e-10 && translation_exact && reparam_exact && scaling < 1e-12 &&
                    secs < 30.0;
  return {pass,
          fmt::format("{} paths: Chen {:.1e} (limit 1e-12), shuffle {:.1e} (limit 1e-10), translation {}, "
                      "reparametrisation {}, scaling {:.1e} (limit 1e-12), {:.1f} s (limit 30 s)",
                      n_paths, chen, shuffle, translation_exact ? "exact" : "NOT exact",
                      reparam_exact ? "bit-identical" : "NOT bit-identical", scaling, secs),
          secs};
}

// ---------------------------------------------------------------------------
// 3. Score and expected Hessian

struct LikProblem {
  SarParameters beta;
  Eigen::MatrixXd chi;
  SpatialWeights w;
};

LikProblem signature_problem(std::mt19937_64& rng, int n) {
  LikProblem p;
  std::vector<DiscretePath> paths;
  for (int i = 0; i < n; ++i) paths.push_back(st::random_path(rng, 6, 2, 0.5));
  p.chi = build_signature_design(paths, 2, {});  // column 0 is the intercept
  p.w = knn_weights(st::random_coords(rng, n, 10.0), 4);
  p.beta.sigma2 = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
  p.beta.rho = std::uniform_real_distribution<double>(-0.6, 0.8)(rng);
  p.beta.gamma = st::random_vector(rng, p.chi.cols());
  return p;
}

Eigen::VectorXd draw_response(std::mt19937_64& rng, const LikProblem& p) {
  const Eigen::VectorXd u = st::random_vector(rng, p.chi.rows(), std::sqrt(p.beta.sigma2));
  return sar_solve(p.w, p.beta.rho, Eigen::VectorXd(p.chi * p.beta.gamma + u));
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  const int n = 30;

  double score_err = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto prob = signature_problem(rng, n);
    const auto y = draw_response(rng, prob);
    const Eigen::VectorXd b = prob.beta.packed();
    const Eigen::VectorXd analytic = score_vector(prob.beta, y, prob.chi, prob.w);
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(b(j)));
      Eigen::VectorXd up = b, dn = b;
      up(j) += h;
      dn(j) -= h;
      const double fd = (sar_loglik(SarParameters::unpack(up), y, prob.chi, prob.w) -
                         sar_loglik(SarParameters::unpack(dn), y, prob.chi, prob.w)) /
                        (2 * h);
      score_err = std::max(score_err, std::abs(analytic(j) - fd) / std::max(std::abs(fd), 1e-3 * analytic.cwiseAbs().maxCoeff()));
    }
  }

  // Monte-Carlo mean of second differences of l / N at the truth.
  const auto prob = signature_problem(rng, n);
  const Eigen::VectorXd b0 = prob.beta.packed();
  const Eigen::Index m = b0.size();
  const int reps = 200;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(m, m), sum_sq = Eigen::MatrixXd::Zero(m, m);
  for (int r = 0; r < reps; ++r) {
    const auto y = draw_response(rng, prob);
    auto f = [&](const Eigen::VectorXd& b) { return sar_loglik(SarParameters::unpack(b), y, prob.chi, prob.w) / n; };
    Eigen::MatrixXd h(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i; j < m; ++j) {
        const double hi = 1e-3 * std::max(1.0, std::abs(b0(i)));
        const double hj = 1e-3 * std::max(1.0, std::abs(b0(j)));
        auto at = [&](double si, double sj) {
          Eigen::VectorXd b = b0;
          b(i) += si * hi;
          b(j) += sj * hj;
          return f(b);
        };
        h(i, j) = h(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hi * hj);
      }
    sum += h;
    sum_sq += h.cwiseProduct(h);
  }
  const Eigen::MatrixXd mean = sum / reps;
  const Eigen::MatrixXd var = (sum_sq / reps - mean.cwiseProduct(mean)) * (reps / (reps - 1.0));
  const Eigen::MatrixXd expected = expected_hessian(prob.beta, prob.chi, prob.w) / n;
  double worst_z = 0.0;
  int outside = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const double se = std::sqrt(std::max(var(i, j), 0.0) / reps);
      // Allowance for the finite-difference error on data-free entries.
      const double fd_tol = 1e-6 * std::max(1.0, std::abs(expected(i, j)));
      const double dev = std::abs(mean(i, j) - expected(i, j));
      if (dev > 3.0 * se + fd_tol) ++outside;
      if (se > 0.0) worst_z = std::max(worst_z, std::max(0.0, dev - fd_tol) / se);
    }
  const double secs = seconds_since(t0);
  const bool pass = score_err < 1e-4 && outside == 0 && secs < 120.0;
  return {pass,
          fmt::format("score vs finite differences on 20 instances (N = 30, D = 2): max relative error {:.1e} (limit 1e-4); "
                      "expected Hessian vs MC mean of {} numerical Hessians: {} of {} entries beyond 3 SE (max {:.2f} SE); "
                      "{:.1f} s (limit 120 s)",
                      score_err, reps, outside, m * (m + 1) / 2, worst_z, secs),
          secs};
}

// ---------------------------------------------------------------------------
// 4. Optimiser vs grid search

double dense_logdet(const Eigen::MatrixXd& v, double rho) {
  const Eigen::Index n = v.rows();
  return std::log(std::abs((Eigen::MatrixXd::Identity(n, n) - rho * v).determinant()));
}

// Penalised objective profiled over (sigma^2, alpha, Theta) at fixed rho by
// alternating the two closed-form conditional maximisers.
struct PenalizedProfile {
  Eigen::VectorXd y;
  Eigen::MatrixXd chi;  // intercept + free columns
  Eigen::MatrixXd v;
  double lambda;

  double operator()(double rho, Eigen::VectorXd& gamma) const {
    const double n = static_cast<double>(y.size());
    const Eigen::VectorXd sy = y - rho * (v * y);
    Eigen::VectorXd pen = Eigen::VectorXd::Constant(chi.cols(), 2.0 * n * lambda);
    pen(0) = 0.0;
    const Eigen::MatrixXd gram = chi.transpose() * chi;
    const Eigen::VectorXd rhs = chi.transpose() * sy;
    double s2 = (sy - chi * gamma).squaredNorm() / n;
    for (int it = 0; it < 10000; ++it) {
      Eigen::MatrixXd a = gram / s2;
      a.diagonal() += pen;
      const Eigen::VectorXd next = a.ldlt().solve(rhs / s2);
      const double change = (next - gamma).cwiseAbs().maxCoeff();
      gamma = next;
      s2 = (sy - chi * gamma).squaredNorm() / n;
      if (change < 1e-13) break;
    }
    const Eigen::VectorXd theta = gamma.tail(gamma.size() - 1);
    return -0.5 * n * std::log(s2) - 0.5 * n + dense_logdet(v, rho) - n * lambda * theta.squaredNorm();
  }
};

double projection_profile(double rho, const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const Eigen::MatrixXd& v) {
  const double n = static_cast<double>(y.size());
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(y.size(), y.size()) - z * (z.transpose() * z).inverse() * z.transpose();
  const Eigen::VectorXd r = m * (y - rho * (v * y));
  return -0.5 * n * std::log(r.squaredNorm() / n) + dense_logdet(v, rho);
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  const int instances = 25;
  double worst_pen = 0.0, worst_proj = 0.0;
  for (int rep = 0; rep < instances; ++rep) {
    const int n = 12 + rep % 9;  // 12..20
    const double rho0 = std::uniform_real_distribution<double>(-0.5, 0.8)(rng);
    const auto w = knn_weights(st::random_coords(rng, n, 10.0), 3);
    const Eigen::MatrixXd v = w.dense();

    // Penalised: depth-2 design on 2-D paths plus a small ridge level.
    std::vector<DiscretePath> paths;
    for (int i = 0; i < n; ++i) paths.push_back(st::random_path(rng, 6, 2, 0.5));
    const Eigen::MatrixXd xi = build_signature_design(paths, 2, {});
    const Eigen::VectorXd theta = st::random_vector(rng, xi.cols());
    const Eigen::VectorXd y = sar_solve(w, rho0, Eigen::VectorXd(xi * theta + st::random_vector(rng, n)));
    const double lambda = 1e-3;
    const auto fit = fit_penalized(y, xi, w, lambda);
    PenalizedProfile prof{y, xi, v, lambda};  // column 0 of xi is the intercept
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(xi.cols());
    const double pen_grid = st::grid_argmax([&](double r) { return prof(r, gamma); }, -0.99, 0.99, 1e-4);
    worst_pen = std::max(worst_pen, std::abs(fit.rho - pen_grid));

    // Projection: centred scores and response.
    Eigen::MatrixXd z = st::random_matrix(rng, n, 2);
    z = z.rowwise() - z.colwise().mean();
    Eigen::VectorXd yz = sar_solve(w, rho0, Eigen::VectorXd(z * Eigen::Vector2d(1.0, -0.5) + st::random_vector(rng, n)));
    yz.array() -= yz.mean();
    const auto pfit = fit_projection(yz, z, w);
    const double proj_grid =
        st::grid_argmax([&](double r) { return projection_profile(r, yz, z, v); }, -0.99, 0.99, 1e-4);
    worst_proj = std::max(worst_proj, std::abs(pfit.rho - proj_grid));
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_pen <= 2e-4 && worst_proj <= 2e-4 && secs < 60.0;
  return {pass,
          fmt::format("{} instances with N <= 20: max |rho-hat - grid argmax| penalized {:.1e}, projection {:.1e} "
                      "(limit 2e-4), {:.1f} s (limit 60 s)",
                      instances, worst_pen, worst_proj, secs),
          secs};
}

// ---------------------------------------------------------------------------
// 5. Monotone penalised iterations

Outcome criterion5() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.model = 3;
  const int fits = 50;
  const auto grid = default_lambda_grid(cfg.n);
  double worst_drop = 0.0;
  int converged = 0;
  for (int r = 0; r < fits; ++r) {
    const auto data = gen_dataset(cfg, r);
    const auto xi = build_signature_design(data.paths, cfg.d_star, cfg.augment);
    const auto fit = fit_penalized(data.y, xi, data.weights, grid[static_cast<std::size_t>(r) % grid.size()]);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      worst_drop = std::max(worst_drop, fit.objective_trace[i - 1] - fit.objective_trace[i]);
    if (fit.converged && fit.iterations <= 500) ++converged;
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_drop <= 1e-8 && converged >= 45;
  return {pass,
          fmt::format("{} Model 3 fits (N = 200, D = 2, lambda over the default grid): largest decrease {:.1e} "
                      "(limit 1e-8), {} converged within 500 sweeps (need >= 45)",
                      fits, worst_drop, converged),
          secs};
}

// ---------------------------------------------------------------------------
// 6. Parameter recovery and Wald coverage

Outcome criterion6(DeskRuns& desk) {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  double run_secs = 0.0;
  for (double rho0 : {0.0, 0.4, 0.8}) {
    const auto& rows = desk.cell(3, rho0);
    run_secs += desk.seconds(3, rho0);
    std::map<std::string, std::vector<double>> rho;
    for (const auto& r : rows)
      if (!r.failed) rho[r.method].push_back(r.rho_hat);
    double worst = 0.0;
    std::string worst_method;
    for (Method m : all_methods()) {
      const auto& v = rho[std::string(method_name(m))];
      const double dev = v.empty() ? INFINITY : std::abs(quantile(v, 0.5) - rho0);
      if (dev > worst) {
        worst = dev;
        worst_method = method_name(m);
      }
    }
    pass = pass && worst <= 0.10;
    detail += fmt::format("rho0 = {}: worst |median - rho0| {:.3f} ({}); ", rho0, worst, worst_method);
  }

  ExperimentConfig cfg;
  cfg.model = 3;
  cfg.rho0 = 0.4;
  const int reps = 100;
  const double lambda = default_lambda_grid(cfg.n).front();
  int covered = 0, failed = 0;
  for (int r = 0; r < reps; ++r) {
    try {
      const auto data = gen_dataset(cfg, r);
      const auto xi = build_signature_design(data.paths, cfg.d_star, cfg.augment);
      const auto fit = fit_penalized(data.y, xi, data.weights, lambda);
      const auto rep = asymptotic_cov_penalized(fit, data.y, xi, data.weights);
      if (rep.rho_lower <= cfg.rho0 && cfg.rho0 <= rep.rho_upper) ++covered;
    } catch (const std::exception&) {
      ++failed;
    }
  }
  const double secs = seconds_since(t0) + run_secs;
  pass = pass && covered >= 90 && covered <= 99 && secs < 1200.0;
  detail += fmt::format("Wald 95% coverage {}/{} (need 90-99){}; {:.0f} s (limit 1200 s)", covered, reps,
                        failed ? fmt::format(", {} failed fits", failed) : std::string(), secs);
  return {pass, detail, secs};
}

// ---------------------------------------------------------------------------
// 7. Qualitative MSE orderings

Outcome criterion7(DeskRuns& desk) {
  const auto t0 = Clock::now();
  double run_secs = 0.0;
  std::map<int, std::map<std::string, double>> mse;
  for (int model : {1, 2, 3}) {
    mse[model] = mean_mse_by_method(desk.cell(model, 0.4));
    run_secs += desk.seconds(model, 0.4);
  }
  const std::vector<std::string> baselines{"baseline_fpca_thresh", "baseline_fpca_free"};
  const std::vector<std::string> signature_methods{"sig_proj_std_thresh", "sig_proj_std_free", "sig_proj_raw_thresh",
                                                   "sig_proj_raw_free", "sig_penalized"};

  // (a)
  bool a = true;
  for (const char* s : {"sig_penalized", "sig_proj_std_thresh", "sig_proj_std_free"})
    for (const auto& b : baselines) a = a && mse[3][s] < mse[3][b];

  // (b)
  const double best_baseline = std::min(mse[1][baselines[0]], mse[1][baselines[1]]);
  bool b_lowest = true;
  for (const auto& s : signature_methods) b_lowest = b_lowest && best_baseline <= mse[1][s];
  const bool b_close = mse[1]["sig_penalized"] <= 1.3 * best_baseline;

  // (c)
  bool c = true;
  for (const auto& [name, value] : mse[2]) c = c && mse[2]["sig_penalized"] <= value;

  // (d)
  bool d = true;
  for (int model : {1, 2, 3})
    d = d && mse[model]["sig_proj_std_thresh"] < mse[model]["sig_proj_raw_thresh"] &&
        mse[model]["sig_proj_std_free"] < mse[model]["sig_proj_raw_free"];

  const double secs = seconds_since(t0) + run_secs;
  std::string table;
  for (int model : {1, 2, 3}) {
    table += fmt::format("\n    Model {}:", model);
    for (const auto& [name, value] : mse[model]) table += fmt::format(" {}={:.3f}", name, value);
  }
  const bool pass = a && b_lowest && b_close && c && d && secs < 2700.0;
  return {pass,
          fmt::format("(a) {} (b) baseline lowest {}, penalized/baseline = {:.3f} (limit 1.3) {} (c) {} (d) {}; "
                      "{:.0f} s (limit 2700 s); mean test MSE:{}",
                      a ? "ok" : "violated", b_lowest ? "ok" : "violated", mse[1]["sig_penalized"] / best_baseline,
                      b_close ? "ok" : "violated", c ? "ok" : "violated", d ? "ok" : "violated", secs, table),
          secs};
}

// ---------------------------------------------------------------------------
// 8. Determinism across thread counts

Outcome criterion8(DeskRuns& desk) {
  const auto t0 = Clock::now();
  std::ostringstream first, second;
  const auto rows = desk.all();
  write_results_csv(first, rows);
  write_results_csv(second, desk.all_threaded(4));
  const bool same = first.str() == second.str();
  const double secs = seconds_since(t0);
  return {same,
          fmt::format("desk-scale grid ({} rows): 1 thread vs 4 threads {} ({} vs {} bytes), {:.0f} s", rows.size(),
                      same ? "byte-identical" : "DIFFER", first.str().size(), second.str().size(), secs),
          secs};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  DeskRuns desk;
  const std::map<int, std::function<Outcome()>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, criterion5},
      {6, [&] { return criterion6(desk); }},
      {7, [&] { return criterion7(desk); }},
      {8, [&] { return criterion8(desk); }},
  };

  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      fmt::print("criterion {}: unknown\n", id);
      ++failures;
      continue;
    }
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out = {false, fmt::format("threw: {}", e.what()), 0.0};
    }
    if (!out.pass) ++failures;
    fmt::print("criterion {}: {}  {}\n", id, out.pass ? "PASS" : "FAIL", out.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
