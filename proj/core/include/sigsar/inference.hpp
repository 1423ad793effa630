#pragma once

// Score, expected Hessian and asymptotic variances of the SAR estimators.
//
// Parameters are ordered beta = (sigma^2, rho, gamma) with gamma = (alpha,
// Theta) the coefficients of the design chi = (1, xi).

#include <optional>

#include <Eigen/Dense>

#include "sigsar/estimators.hpp"
#include "sigsar/spatial.hpp"

namespace sigsar {

struct SarParameters {
  double sigma2 = 1.0;
  double rho = 0.0;
  Eigen::VectorXd gamma;

  Eigen::Index size() const noexcept { return 2 + gamma.size(); }
  Eigen::VectorXd packed() const;
  static SarParameters unpack(const Eigen::VectorXd& beta);
};

/// Gaussian quasi log-likelihood with design chi (intercept included).
double sar_loglik(const SarParameters& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& chi,
                  const SpatialWeights& weights);

/// Analytic gradient of sar_loglik.
Eigen::VectorXd score_vector(const SarParameters& beta, const Eigen::VectorXd& y, const Eigen::MatrixXd& chi,
                             const SpatialWeights& weights);

/// E[d^2 l / d beta d beta^T] under the model at beta.
Eigen::MatrixXd expected_hessian(const SarParameters& beta, const Eigen::MatrixXd& chi, const SpatialWeights& weights);

struct ResidualMoments {
  double sigma2 = 0.0;  ///< second central moment
  double mu3 = 0.0;
  double mu4 = 0.0;
};

/// Central sample moments (divisor N).
ResidualMoments residual_moments(const Eigen::VectorXd& residuals);

/// Variance of N^{-1/2} times the score at beta for errors with the given
/// third and fourth moments. `moments.sigma2` is ignored in favour of
/// beta.sigma2.
Eigen::MatrixXd sigma_n(const SarParameters& beta, const Eigen::MatrixXd& chi, const SpatialWeights& weights,
                        const ResidualMoments& moments);

struct InferenceReport {
  Eigen::VectorXd score;
  Eigen::MatrixXd expected_hessian;
  Eigen::MatrixXd sigma_n;
  Eigen::MatrixXd covariance;  ///< sandwich covariance of beta-hat (already divided by N)
  ResidualMoments moments;
  double rho_se = 0.0;
  double rho_lower = 0.0;  ///< 95% Wald interval
  double rho_upper = 0.0;
};

/// Plug-in inference for a penalised fit. `xi` is the design the fit was
/// computed on; pinned constant columns are dropped so chi = (1, free xi).
InferenceReport asymptotic_cov_penalized(const PenalizedFit& fit, const Eigen::VectorXd& y, const Eigen::MatrixXd& xi,
                                         const SpatialWeights& weights);

struct ProjectionVariance {
  double s_n2 = 0.0;
  double delta_n = 0.0;
  double s_rho2 = 0.0;    ///< NaN when degenerate
  double s_sigma2 = 0.0;
  double h = 0.0;         ///< rate sequence, the neighbour count for k-NN weights
  bool degenerate = false;  ///< V = 0: rho is not identified
  ResidualMoments moments;
};

/// Plug-in variances of rho-hat (scaled by sqrt(N/h)) and sigma^2-hat.
/// `h` defaults to weights.neighbours() (1 when that is zero).
ProjectionVariance asymptotic_var_projection(const ProjectionFit& fit, const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& z, const SpatialWeights& weights,
                                             std::optional<double> h = std::nullopt);

/// (N (Phi - Phi*)^T Gamma (Phi - Phi*) - sigma0^2 C) / sqrt(2 C) with
/// Gamma = Z^T Z / N. Only defined when the true Phi* is known; throws
/// std::logic_error when it is absent.
double phi_statistic(const ProjectionFit& fit, const Eigen::MatrixXd& z, const std::optional<Eigen::VectorXd>& phi_star,
                     double sigma0_sq);

}  // namespace sigsar
