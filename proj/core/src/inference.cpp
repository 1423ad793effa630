#include "sigsar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

namespace sigsar {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void check_shapes(const SarParameters& beta, const Eigen::MatrixXd& chi, const SpatialWeights& weights) {
  if (!(beta.sigma2 > 0.0)) throw std::invalid_argument("inference: sigma2 must be positive");
  if (chi.cols() != beta.gamma.size()) throw std::invalid_argument("inference: gamma does not match the design");
  if (chi.rows() != weights.size()) throw std::invalid_argument("inference: design rows do not match weights");
}

// chi = (1, free columns of xi), mirroring PenalizedSolver.
Eigen::MatrixXd reduced_design(const Eigen::MatrixXd& xi, const std::vector<Eigen::Index>& pinned,
                               std::vector<Eigen::Index>& free) {
  free.clear();
  for (Eigen::Index j = 0; j < xi.cols(); ++j)
    if (std::find(pinned.begin(), pinned.end(), j) == pinned.end()) free.push_back(j);
  Eigen::MatrixXd chi(xi.rows(), 1 + static_cast<Eigen::Index>(free.size()));
  chi.col(0).setOnes();
  for (std::size_t j = 0; j < free.size(); ++j) chi.col(static_cast<Eigen::Index>(j) + 1) = xi.col(free[j]);
  return chi;
}

}  // namespace

Eigen::VectorXd SarParameters::packed() const {
  Eigen::VectorXd out(size());
  out(0) = sigma2;
  out(1) = rho;
  out.tail(gamma.size()) = gamma;
  return out;
}

SarParameters SarParameters::unpack(const Eigen::VectorXd& beta) {
  if (beta.size() < 3) throw std::invalid_argument("SarParameters::unpack: need at least three entries");
  SarParameters out;
  out.sigma2 = beta(0);
  out.rho = beta(1);
  out.gamma = beta.tail(beta.size() - 2);
  return out;
}

double sar_loglik(const SarParameters& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& chi,
                  const SpatialWeights& weights) {
  check_shapes(beta, chi, weights);
  const double n = static_cast<double>(y.size());
  const Eigen::VectorXd r = apply_sar(weights, beta.rho, y) - chi * beta.gamma;
  return -0.5 * n * std::log(beta.sigma2) - 0.5 * n * kLog2Pi + log_det_S(weights, beta.rho) -
         r.squaredNorm() / (2.0 * beta.sigma2);
}

Eigen::VectorXd score_vector(const SarParameters& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& chi,
                             const SpatialWeights& weights) {
  check_shapes(beta, chi, weights);
  const double n = static_cast<double>(y.size());
  const double s2 = beta.sigma2;
  const Eigen::VectorXd vy = weights.matrix() * y;
  const Eigen::VectorXd r = y - beta.rho * vy - chi * beta.gamma;
  const Eigen::MatrixXd g = g_matrix(weights, beta.rho);

  Eigen::VectorXd out(beta.size());
  out(0) = -0.5 * n / s2 + r.squaredNorm() / (2.0 * s2 * s2);
  out(1) = -g.trace() + r.dot(vy) / s2;
  out.tail(beta.gamma.size()) = chi.transpose() * r / s2;
  return out;
}

Eigen::MatrixXd expected_hessian(const SarParameters& beta, const Eigen::MatrixXd& chi, const SpatialWeights& weights) {
  check_shapes(beta, chi, weights);
  const double n = static_cast<double>(chi.rows());
  const double s2 = beta.sigma2;
  const Eigen::Index m = beta.gamma.size();
  const Eigen::MatrixXd g = g_matrix(weights, beta.rho);
  const Eigen::VectorXd gmu = g * (chi * beta.gamma);
  const double tr_g = g.trace();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(beta.size(), beta.size());
  h(0, 0) = -0.5 * n / (s2 * s2);
  h(0, 1) = h(1, 0) = -tr_g / s2;
  h(1, 1) = -(g.transpose() + g).cwiseProduct(g.transpose()).sum() - gmu.squaredNorm() / s2;
  const Eigen::RowVectorXd cross = -(gmu.transpose() * chi) / s2;
  h.block(1, 2, 1, m) = cross;
  h.block(2, 1, m, 1) = cross.transpose();
  h.block(2, 2, m, m) = -(chi.transpose() * chi) / s2;
  return h;
}

ResidualMoments residual_moments(const Eigen::VectorXd& residuals) {
  if (residuals.size() == 0) throw std::invalid_argument("residual_moments: empty residual vector");
  const Eigen::ArrayXd c = residuals.array() - residuals.mean();
  ResidualMoments out;
  out.sigma2 = c.square().mean();
  out.mu3 = c.cube().mean();
  out.mu4 = c.square().square().mean();
  return out;
}

Eigen::MatrixXd sigma_n(const SarParameters& beta, const Eigen::MatrixXd& chi, const SpatialWeights& weights,
                        const ResidualMoments& moments) {
  check_shapes(beta, chi, weights);
  const double n = static_cast<double>(chi.rows());
  const double s2 = beta.sigma2;
  const double s4 = s2 * s2;
  const double s6 = s4 * s2;
  const double mu3 = moments.mu3;
  const double excess = moments.mu4 - s4;
  const Eigen::Index m = beta.gamma.size();

  const Eigen::MatrixXd g = g_matrix(weights, beta.rho);
  const Eigen::VectorXd gdiag = g.diagonal();
  const Eigen::VectorXd gmu = g * (chi * beta.gamma);
  const double tr_g = g.trace();
  // tr((G^T + G) G) = sum_ij (G^T + G)_ij G_ji
  const double tr_sym = (g.transpose() + g).cwiseProduct(g.transpose()).sum();

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(beta.size(), beta.size());
  out(0, 0) = excess / (4.0 * s4 * s4);
  out(0, 1) = excess * tr_g / (2.0 * n * s6) + mu3 * gmu.sum() / (2.0 * n * s6);
  out.block(0, 2, 1, m) = mu3 * chi.colwise().sum() / (2.0 * n * s6);
  out(1, 1) = gmu.squaredNorm() / (n * s2) + excess * gdiag.squaredNorm() / (n * s4) + tr_sym / n +
              2.0 * mu3 * gdiag.dot(gmu) / (n * s4);
  out.block(1, 2, 1, m) = (gmu.transpose() * chi) / (n * s2) + mu3 * (gdiag.transpose() * chi) / (n * s4);
  out.block(2, 2, m, m) = (chi.transpose() * chi) / (n * s2);
  out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
  return out;
}

InferenceReport asymptotic_cov_penalized(const PenalizedFit& fit, const Eigen::VectorXd& y, const Eigen::MatrixXd& xi,
                                         const SpatialWeights& weights) {
  if (!(fit.sigma2 > 0.0)) throw std::invalid_argument("asymptotic_cov_penalized: sigma2 must be positive");
  if (xi.cols() != fit.theta.size()) throw std::invalid_argument("asymptotic_cov_penalized: design does not match fit");
  std::vector<Eigen::Index> free;
  const Eigen::MatrixXd chi = reduced_design(xi, fit.pinned_columns, free);

  SarParameters beta;
  beta.sigma2 = fit.sigma2;
  beta.rho = fit.rho;
  beta.gamma.resize(chi.cols());
  beta.gamma(0) = fit.alpha;
  for (std::size_t j = 0; j < free.size(); ++j) beta.gamma(static_cast<Eigen::Index>(j) + 1) = fit.theta(free[j]);

  const double n = static_cast<double>(y.size());
  InferenceReport out;
  const Eigen::VectorXd r = apply_sar(weights, beta.rho, y) - chi * beta.gamma;
  out.moments = residual_moments(r);
  out.score = score_vector(beta, y, chi, weights);
  out.expected_hessian = expected_hessian(beta, chi, weights);
  out.sigma_n = sigma_n(beta, chi, weights, out.moments);

  Eigen::MatrixXd bread = -out.expected_hessian / n;
  for (Eigen::Index j = 3; j < bread.rows(); ++j) bread(j, j) += 2.0 * fit.lambda;
  const Eigen::MatrixXd inv = bread.fullPivLu().inverse();
  out.covariance = inv * out.sigma_n * inv.transpose() / n;
  out.rho_se = std::sqrt(std::max(out.covariance(1, 1), 0.0));
  out.rho_lower = fit.rho - 1.959963984540054 * out.rho_se;
  out.rho_upper = fit.rho + 1.959963984540054 * out.rho_se;
  return out;
}

ProjectionVariance asymptotic_var_projection(const ProjectionFit& fit, const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& z, const SpatialWeights& weights,
                                             std::optional<double> h) {
  if (!(fit.sigma2 > 0.0)) throw std::invalid_argument("asymptotic_var_projection: sigma2 must be positive");
  if (z.cols() != fit.phi.size() || z.rows() != y.size() || weights.size() != y.size())
    throw std::invalid_argument("asymptotic_var_projection: shape mismatch");
  const double n = static_cast<double>(y.size());
  const double s2 = fit.sigma2;
  const double s4 = s2 * s2;

  ProjectionVariance out;
  out.h = h.value_or(weights.neighbours() > 0 ? static_cast<double>(weights.neighbours()) : 1.0);
  out.moments = residual_moments(apply_sar(weights, fit.rho, y) - z * fit.phi);
  const double mu4 = out.moments.mu4;

  if (weights.empty()) {
    out.degenerate = true;
    out.s_n2 = 0.0;
    out.delta_n = 0.0;
    out.s_rho2 = std::numeric_limits<double>::quiet_NaN();
    out.s_sigma2 = mu4 - s4;
    return out;
  }

  const Eigen::MatrixXd g = g_matrix(weights, fit.rho);
  const double tr_g = g.trace();
  const double tr_ggt = g.squaredNorm();  // tr(G G^T) = tr(G^T G)
  const double tr_sym = (g.transpose() + g).cwiseProduct(g.transpose()).sum();
  const double q = fit.phi.dot((z.transpose() * z / n) * fit.phi);

  out.s_n2 = (mu4 - 2.0 * s4) * g.diagonal().squaredNorm() + tr_g * tr_g / n * (s4 - mu4 - s2 * q) +
             tr_ggt * (s4 + s2 * q);
  out.delta_n = (tr_ggt - tr_g * tr_g / n) * q;
  const double hn = out.h / n;
  const double denom = hn * (out.delta_n + s2 * tr_sym);
  out.s_rho2 = out.s_n2 * hn / (denom * denom);
  out.s_sigma2 = mu4 - s4 + 4.0 * out.s_rho2 * out.h * (tr_g / n) * (tr_g / n);
  return out;
}

double phi_statistic(const ProjectionFit& fit, const Eigen::MatrixXd& z, const std::optional<Eigen::VectorXd>& phi_star,
                     double sigma0_sq) {
  if (!phi_star) throw std::logic_error("phi_statistic: the true Phi* is unknown outside simulation");
  if (phi_star->size() != fit.phi.size() || z.cols() != fit.phi.size())
    throw std::invalid_argument("phi_statistic: dimension mismatch");
  const double c = static_cast<double>(fit.phi.size());
  const Eigen::VectorXd d = fit.phi - *phi_star;
  const double quad = (z * d).squaredNorm();  // N d^T Gamma d
  return (quad - sigma0_sq * c) / std::sqrt(2.0 * c);
}

}  // namespace sigsar
