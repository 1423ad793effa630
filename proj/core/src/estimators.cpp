#include "sigsar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <fmt/format.h>

namespace sigsar {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2 pi)

}  // namespace

Eigen::MatrixXd build_signature_design(std::span<const DiscretePath> paths, int depth, AugmentOptions augment) {
  if (paths.empty()) throw std::invalid_argument("build_signature_design: no paths");
  Eigen::MatrixXd out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto sig = path_signature(augment_path(paths[i], augment), depth);
    if (i == 0) {
      out.resize(static_cast<Eigen::Index>(paths.size()), static_cast<Eigen::Index>(sig.size()));
    } else if (static_cast<Eigen::Index>(sig.size()) != out.cols()) {
      throw std::invalid_argument("build_signature_design: paths have inconsistent dimensions");
    }
    const auto flat = sig.flat();
    out.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  }
  return out;
}

double penalized_loglik(double sigma2, double rho, double alpha, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SpatialWeights& weights) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("penalized_loglik: sigma2 must be positive");
  if (xi.rows() != y.size() || xi.cols() != theta.size() || weights.size() != y.size())
    throw std::invalid_argument("penalized_loglik: shape mismatch");
  const double n = static_cast<double>(y.size());
  const Eigen::VectorXd r = apply_sar(weights, rho, y) - Eigen::VectorXd::Constant(y.size(), alpha) - xi * theta;
  return -0.5 * n * std::log(sigma2) - 0.5 * n * kLog2Pi + log_det_S(weights, rho) - r.squaredNorm() / (2.0 * sigma2);
}

// ---------------------------------------------------------------------------

PenalizedSolver::PenalizedSolver(const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SarSystem& system,
                                 double lambda, PenalizedOptions options)
    : y_(y), system_(system), lambda_(lambda), options_(options), xi_cols_(xi.cols()) {
  const Eigen::Index n = y.size();
  if (!(lambda >= 0.0)) throw std::invalid_argument("fit_penalized: lambda must be nonnegative");
  if (xi.rows() != n || system.weights.size() != n) throw std::invalid_argument("fit_penalized: shape mismatch");
  if (n < 2) throw std::invalid_argument("fit_penalized: need at least two units");

  for (Eigen::Index j = 0; j < xi.cols(); ++j) {
    if ((xi.col(j).array() == 1.0).all())
      pinned_.push_back(j);
    else
      free_.push_back(j);
  }
  chi_.resize(n, 1 + static_cast<Eigen::Index>(free_.size()));
  chi_.col(0).setOnes();
  for (std::size_t j = 0; j < free_.size(); ++j) chi_.col(static_cast<Eigen::Index>(j) + 1) = xi.col(free_[j]);

  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(chi_);
    if (qr.rank() < chi_.cols())
      throw std::invalid_argument(
          fmt::format("fit_penalized: design (1, xi) has rank {} < {} and lambda = 0", qr.rank(), chi_.cols()));
  }

  gram_ = chi_.transpose() * chi_;
  vy_ = system_.weights.matrix() * y_;
  chi_t_y_ = chi_.transpose() * y_;
  chi_t_vy_ = chi_.transpose() * vy_;
  penalty_ = Eigen::VectorXd::Constant(chi_.cols(), lambda);
  penalty_(0) = 0.0;
}

PenalizedSolver::State PenalizedSolver::initial_state() const {
  const double n = static_cast<double>(y_.size());
  Eigen::MatrixXd a = gram_;
  a.diagonal() += n * penalty_;
  State s;
  s.gamma = a.ldlt().solve(chi_t_y_);
  s.rho = 0.0;
  s.sigma2 = std::max((y_ - chi_ * s.gamma).squaredNorm() / n, options_.sigma2_floor);
  return s;
}

PenalizedSolver::State PenalizedSolver::update_sigma2(const State& s) const {
  State out = s;
  const Eigen::VectorXd r = y_ - s.rho * vy_ - chi_ * s.gamma;
  out.sigma2 = std::max(r.squaredNorm() / static_cast<double>(y_.size()), options_.sigma2_floor);
  return out;
}

PenalizedSolver::State PenalizedSolver::update_rho(const State& s) const {
  if (system_.weights.empty()) {
    State out = s;
    out.rho = 0.0;
    return out;
  }
  const Eigen::VectorXd e = y_ - chi_ * s.gamma;
  const double ee = e.squaredNorm();
  const double ew = e.dot(vy_);
  const double ww = vy_.squaredNorm();
  const double inv2s = 1.0 / (2.0 * s.sigma2);
  auto f = [&](double rho) { return system_.log_det(rho) - (ee - 2.0 * rho * ew + rho * rho * ww) * inv2s; };
  const auto best = maximize_rho(f, options_.rho);
  State out = s;
  // An exact coordinate step never loses ground against the incumbent.
  if (best.value >= f(s.rho)) out.rho = best.rho;
  return out;
}

PenalizedSolver::State PenalizedSolver::update_coefficients(const State& s) const {
  const double n = static_cast<double>(y_.size());
  Eigen::MatrixXd a = gram_ / s.sigma2;
  a.diagonal() += 2.0 * n * penalty_;
  const Eigen::VectorXd b = (chi_t_y_ - s.rho * chi_t_vy_) / s.sigma2;
  State out = s;
  out.gamma = a.ldlt().solve(b);
  return out;
}

double PenalizedSolver::loglik(const State& s) const {
  const double n = static_cast<double>(y_.size());
  const Eigen::VectorXd r = y_ - s.rho * vy_ - chi_ * s.gamma;
  return -0.5 * n * std::log(s.sigma2) - 0.5 * n * kLog2Pi + system_.log_det(s.rho) -
         r.squaredNorm() / (2.0 * s.sigma2);
}

double PenalizedSolver::objective(const State& s) const {
  const double n = static_cast<double>(y_.size());
  return loglik(s) - n * lambda_ * s.gamma.tail(s.gamma.size() - 1).squaredNorm();
}

double PenalizedSolver::relative_change(const State& a, const State& b) {
  auto rel = [](double old_v, double new_v) { return std::abs(new_v - old_v) / std::max(1.0, std::abs(old_v)); };
  double out = std::max(rel(a.sigma2, b.sigma2), rel(a.rho, b.rho));
  for (Eigen::Index j = 0; j < a.gamma.size(); ++j) out = std::max(out, rel(a.gamma(j), b.gamma(j)));
  return out;
}

PenalizedFit PenalizedSolver::run() const {
  PenalizedFit fit;
  fit.lambda = lambda_;
  fit.pinned_columns = pinned_;
  fit.rho_identified = !system_.weights.empty();

  State s = initial_state();
  fit.objective_trace.push_back(objective(s));
  for (int it = 1; it <= options_.max_iter; ++it) {
    State next = sweep(s);
    fit.objective_trace.push_back(objective(next));
    const double change = relative_change(s, next);
    s = std::move(next);
    fit.iterations = it;
    if (change < options_.tol) {
      fit.converged = true;
      break;
    }
  }

  fit.rho = s.rho;
  fit.sigma2 = s.sigma2;
  fit.alpha = s.gamma(0);
  fit.theta = Eigen::VectorXd::Zero(xi_cols_);
  for (std::size_t j = 0; j < free_.size(); ++j) fit.theta(free_[j]) = s.gamma(static_cast<Eigen::Index>(j) + 1);
  fit.loglik = loglik(s);
  fit.objective = objective(s);
  return fit;
}

PenalizedFit fit_penalized(const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SarSystem& system,
                           double lambda, const PenalizedOptions& options) {
  return PenalizedSolver(y, xi, system, lambda, options).run();
}

PenalizedFit fit_penalized(const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SpatialWeights& weights,
                           double lambda, const PenalizedOptions& options) {
  return fit_penalized(y, xi, SarSystem(weights), lambda, options);
}

Eigen::VectorXd predict(const PenalizedFit& fit, const Eigen::MatrixXd& xi_eval, const SpatialWeights& weights_eval) {
  if (xi_eval.cols() != fit.theta.size()) throw std::invalid_argument("predict: design width does not match the fit");
  if (xi_eval.rows() != weights_eval.size()) throw std::invalid_argument("predict: design rows do not match weights");
  Eigen::VectorXd mean = xi_eval * fit.theta;
  mean.array() += fit.alpha;
  return sar_solve(weights_eval, fit.rho, mean);
}

PenalizedSelection select_penalized(const SarBlock& train, const SarBlock& validation, int max_depth,
                                    std::span<const double> lambda_grid, AugmentOptions augment,
                                    const PenalizedOptions& options) {
  if (max_depth < 1) throw std::invalid_argument("select_penalized: max_depth must be >= 1");
  if (lambda_grid.empty()) throw std::invalid_argument("select_penalized: empty lambda grid");

  const Eigen::MatrixXd xi_train_full = build_signature_design(train.paths, max_depth, augment);
  const Eigen::MatrixXd xi_val_full = build_signature_design(validation.paths, max_depth, augment);
  const int dim = train.paths.front().dim() + (augment.time ? 1 : 0);

  std::vector<std::size_t> order(lambda_grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambda_grid[a] < lambda_grid[b]; });

  PenalizedSelection best;
  best.validation_mse = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int depth = 1; depth <= max_depth; ++depth) {
    const auto cols = static_cast<Eigen::Index>(sig_dim(dim, depth));
    const Eigen::MatrixXd xi_train = xi_train_full.leftCols(cols);
    const Eigen::MatrixXd xi_val = xi_val_full.leftCols(cols);
    for (std::size_t idx : order) {
      const double lambda = lambda_grid[idx];
      PenalizedCandidate cand{depth, lambda, std::numeric_limits<double>::infinity(), false};
      try {
        PenalizedFit fit = fit_penalized(train.y, xi_train, train.system, lambda, options);
        fit.depth = depth;
        cand.converged = fit.converged;
        cand.validation_mse = mean_squared_error(validation.y, predict(fit, xi_val, validation.system.weights));
        if (!std::isfinite(cand.validation_mse)) cand.validation_mse = std::numeric_limits<double>::infinity();
        if (cand.validation_mse < best.validation_mse) {
          best.depth = depth;
          best.lambda = lambda;
          best.validation_mse = cand.validation_mse;
          best.fit = std::move(fit);
          found = true;
        }
      } catch (const std::exception&) {
        // Failed candidates stay in the table with an infinite MSE.
      }
      best.candidates.push_back(cand);
    }
  }
  if (!found) throw std::runtime_error("select_penalized: every (D, lambda) candidate failed");
  return best;
}

// ---------------------------------------------------------------------------

double projection_concentrated_loglik(double rho, const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                                      const SpatialWeights& weights, double sigma2_floor) {
  const Eigen::Index n = y.size();
  const Eigen::MatrixXd ztz = z.transpose() * z;
  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n, n) - z * ztz.ldlt().solve(z.transpose());
  const Eigen::VectorXd sy = apply_sar(weights, rho, y);
  const double sigma2 = std::max(sy.dot(m * sy) / static_cast<double>(n), sigma2_floor);
  const double nn = static_cast<double>(n);
  return -0.5 * nn * (kLog2Pi + 1.0) - 0.5 * nn * std::log(sigma2) + log_det_S(weights, rho);
}

double projection_loglik(double sigma2, double rho, const Eigen::VectorXd& phi, const Eigen::VectorXd& y,
                         const Eigen::MatrixXd& z, const SpatialWeights& weights) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("projection_loglik: sigma2 must be positive");
  const double n = static_cast<double>(y.size());
  const Eigen::VectorXd r = apply_sar(weights, rho, y) - z * phi;
  return -0.5 * n * std::log(sigma2) - 0.5 * n * kLog2Pi + log_det_S(weights, rho) - r.squaredNorm() / (2.0 * sigma2);
}

ProjectionFit fit_projection(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const SarSystem& system,
                             const RhoSearchOptions& rho_options, double sigma2_floor) {
  const Eigen::Index n = y.size();
  if (z.rows() != n || system.weights.size() != n) throw std::invalid_argument("fit_projection: shape mismatch");
  if (z.cols() < 1) throw std::invalid_argument("fit_projection: need at least one component");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  if (qr.rank() < z.cols())
    throw std::invalid_argument(fmt::format("fit_projection: Z has rank {} < {}", qr.rank(), z.cols()));

  const Eigen::VectorXd vy = system.weights.matrix() * y;
  const Eigen::VectorXd a = y - z * qr.solve(y);   // M y
  const Eigen::VectorXd b = vy - z * qr.solve(vy); // M V y
  const double aa = a.squaredNorm();
  const double ab = a.dot(b);
  const double bb = b.squaredNorm();
  const double nn = static_cast<double>(n);
  auto sigma2_at = [&](double rho) { return std::max((aa - 2.0 * rho * ab + rho * rho * bb) / nn, sigma2_floor); };
  auto concentrated = [&](double rho) {
    return -0.5 * nn * (kLog2Pi + 1.0) - 0.5 * nn * std::log(sigma2_at(rho)) + system.log_det(rho);
  };

  ProjectionFit fit;
  fit.components = z.cols();
  if (system.weights.empty()) {
    fit.rho = 0.0;
    fit.rho_identified = false;
  } else {
    fit.rho = maximize_rho(concentrated, rho_options).rho;
  }
  fit.phi = qr.solve(Eigen::VectorXd(y - fit.rho * vy));
  fit.sigma2 = sigma2_at(fit.rho);
  fit.loglik = concentrated(fit.rho);
  return fit;
}

ProjectionFit fit_projection(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const SpatialWeights& weights,
                             const RhoSearchOptions& rho_options, double sigma2_floor) {
  return fit_projection(y, z, SarSystem(weights), rho_options, sigma2_floor);
}

Eigen::VectorXd predict(const ProjectionFit& fit, const Eigen::MatrixXd& z_eval, const SpatialWeights& weights_eval,
                        double y_offset) {
  if (z_eval.cols() != fit.phi.size()) throw std::invalid_argument("predict: score width does not match the fit");
  Eigen::VectorXd out = sar_solve(weights_eval, fit.rho, Eigen::VectorXd(z_eval * fit.phi));
  out.array() += y_offset;
  return out;
}

double mean_squared_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& prediction) {
  if (truth.size() != prediction.size() || truth.size() == 0)
    throw std::invalid_argument("mean_squared_error: size mismatch");
  return (truth - prediction).squaredNorm() / static_cast<double>(truth.size());
}

}  // namespace sigsar
