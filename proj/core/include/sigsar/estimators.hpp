#pragma once

// Quasi-maximum-likelihood estimators of the signature SAR model
//
//   S(rho) Y = alpha 1 + xi_D Theta + U,   S(rho) = I - rho V,
//
// in two flavours: a ridge-penalised fit on truncated signatures and a
// projection fit on principal-component scores (also used by the spline/FPCA
// baseline).

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sigsar/funcdata.hpp"
#include "sigsar/rho_search.hpp"
#include "sigsar/signature.hpp"
#include "sigsar/spatial.hpp"

namespace sigsar {

/// N x sig_dim(p', D) matrix whose row i is the flattened depth-D signature of
/// the augmented path i (p' = augmented dimension). Column 0 is the constant 1.
Eigen::MatrixXd build_signature_design(std::span<const DiscretePath> paths, int depth, AugmentOptions augment);

// ---------------------------------------------------------------------------
// Penalised estimator

struct PenalizedOptions {
  double tol = 1e-6;  ///< max relative parameter change for convergence
  int max_iter = 500;
  double sigma2_floor = 1e-12;
  RhoSearchOptions rho{};
};

struct PenalizedFit {
  double rho = 0.0;
  double alpha = 0.0;
  Eigen::VectorXd theta;  ///< one entry per column of xi
  double sigma2 = 0.0;
  double lambda = 0.0;
  int depth = 0;  ///< truncation order, when known to the caller
  int iterations = 0;
  bool converged = false;
  bool rho_identified = true;  ///< false when V has no neighbours and rho is pinned to 0
  double loglik = 0.0;         ///< unpenalised log-likelihood at the estimate
  double objective = 0.0;      ///< loglik - N lambda |Theta|^2
  /// Objective after initialisation and after every sweep.
  std::vector<double> objective_trace;
  /// Columns of xi identical to the intercept; their coefficient is held at 0
  /// and the level is carried by alpha.
  std::vector<Eigen::Index> pinned_columns;
};

/// Log-likelihood of the truncated model (no penalty), LU log-determinant.
double penalized_loglik(double sigma2, double rho, double alpha, const Eigen::VectorXd& theta,
                        const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SpatialWeights& weights);

/// Coordinate-ascent maximisation of loglik - N lambda |Theta|^2: ridge
/// initialisation, then sweeps of closed-form sigma^2, 1-D search for rho and
/// the closed-form ridge update of (alpha, Theta).
class PenalizedSolver {
 public:
  struct State {
    double sigma2 = 1.0;
    double rho = 0.0;
    Eigen::VectorXd gamma;  ///< (alpha, free Theta entries)
  };

  /// Throws std::invalid_argument for lambda < 0, shape mismatches, or (with
  /// lambda = 0) a rank-deficient design.
  PenalizedSolver(const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SarSystem& system, double lambda,
                  PenalizedOptions options = {});

  /// Non-spatial ridge fit: rho = 0, (alpha, Theta) ridge with penalty
  /// N lambda |Theta|^2 on the mean squared error scale, sigma^2 = RSS / N.
  State initial_state() const;

  State update_sigma2(const State& s) const;
  State update_rho(const State& s) const;
  State update_coefficients(const State& s) const;
  State sweep(const State& s) const { return update_coefficients(update_rho(update_sigma2(s))); }

  double loglik(const State& s) const;
  double objective(const State& s) const;

  /// Max over parameters of |new - old| / max(1, |old|).
  static double relative_change(const State& a, const State& b);

  PenalizedFit run() const;

  const Eigen::MatrixXd& chi() const noexcept { return chi_; }
  const std::vector<Eigen::Index>& pinned_columns() const noexcept { return pinned_; }

 private:
  Eigen::VectorXd y_;
  SarSystem system_;
  double lambda_;
  PenalizedOptions options_;
  Eigen::Index xi_cols_;
  std::vector<Eigen::Index> pinned_;
  std::vector<Eigen::Index> free_;
  Eigen::MatrixXd chi_;  ///< (1, free columns of xi)
  Eigen::MatrixXd gram_;  ///< chi^T chi
  Eigen::VectorXd vy_;    ///< V y
  Eigen::VectorXd chi_t_y_;
  Eigen::VectorXd chi_t_vy_;
  Eigen::VectorXd penalty_;  ///< diagonal of Lambda: 0 for alpha, lambda otherwise
};

PenalizedFit fit_penalized(const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SarSystem& system,
                           double lambda, const PenalizedOptions& options = {});
PenalizedFit fit_penalized(const Eigen::VectorXd& y, const Eigen::MatrixXd& xi, const SpatialWeights& weights,
                           double lambda, const PenalizedOptions& options = {});

/// Reduced-form prediction S(rho)^{-1} (alpha 1 + xi Theta) on evaluation units.
Eigen::VectorXd predict(const PenalizedFit& fit, const Eigen::MatrixXd& xi_eval, const SpatialWeights& weights_eval);

/// A self-contained SAR block: responses, covariate paths and weights.
struct SarBlock {
  Eigen::VectorXd y;
  std::vector<DiscretePath> paths;
  SarSystem system;
};

struct PenalizedCandidate {
  int depth = 0;
  double lambda = 0.0;
  double validation_mse = 0.0;  ///< +inf when the fit failed
  bool converged = false;
};

struct PenalizedSelection {
  int depth = 0;
  double lambda = 0.0;
  double validation_mse = 0.0;
  PenalizedFit fit;
  std::vector<PenalizedCandidate> candidates;
};

/// Fits every (D, lambda) with D = 1..max_depth on `train` and keeps the pair
/// with the lowest validation MSE. Ties go to the smaller D, then the smaller
/// lambda, then the first occurrence in the grid. Throws std::runtime_error if
/// every candidate fails.
PenalizedSelection select_penalized(const SarBlock& train, const SarBlock& validation, int max_depth,
                                    std::span<const double> lambda_grid, AugmentOptions augment,
                                    const PenalizedOptions& options = {});

// ---------------------------------------------------------------------------
// Projection estimator

struct ProjectionFit {
  double rho = 0.0;
  Eigen::VectorXd phi;
  double sigma2 = 0.0;
  Eigen::Index components = 0;
  double loglik = 0.0;  ///< concentrated log-likelihood at rho
  bool rho_identified = true;
  std::shared_ptr<const ProjectionBasis> basis;  ///< set by pipelines that own a basis
};

/// Concentrated log-likelihood -(N/2)(ln 2pi + 1) - (N/2) ln sigma^2(rho) +
/// ln|S(rho)| with the LU log-determinant. Reference implementation.
double projection_concentrated_loglik(double rho, const Eigen::VectorXd& y, const Eigen::MatrixXd& z,
                                      const SpatialWeights& weights, double sigma2_floor = 1e-12);

/// Unconcentrated log-likelihood at (sigma2, rho, phi).
double projection_loglik(double sigma2, double rho, const Eigen::VectorXd& phi, const Eigen::VectorXd& y,
                         const Eigen::MatrixXd& z, const SpatialWeights& weights);

/// Maximises the concentrated likelihood over rho, then Phi and sigma^2 in
/// closed form. Y and the columns of Z are expected to be centred. Throws
/// std::invalid_argument when Z is rank deficient.
ProjectionFit fit_projection(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const SarSystem& system,
                             const RhoSearchOptions& rho_options = {}, double sigma2_floor = 1e-12);
ProjectionFit fit_projection(const Eigen::VectorXd& y, const Eigen::MatrixXd& z, const SpatialWeights& weights,
                             const RhoSearchOptions& rho_options = {}, double sigma2_floor = 1e-12);

/// Reduced-form prediction y_offset + S(rho)^{-1} Z Phi on evaluation units.
Eigen::VectorXd predict(const ProjectionFit& fit, const Eigen::MatrixXd& z_eval, const SpatialWeights& weights_eval,
                        double y_offset = 0.0);

double mean_squared_error(const Eigen::VectorXd& truth, const Eigen::VectorXd& prediction);

}  // namespace sigsar
