#pragma once

// Functional-data preprocessing shared by the projection estimator and the
// spline/FPCA baseline.

#include <vector>

#include <Eigen/Dense>

#include "sigsar/signature.hpp"

namespace sigsar {

/// Principal axes of a data matrix. Scores of a row x are
/// ((x - center) ./ scale) * loadings.
struct ProjectionBasis {
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;            ///< all ones when fitted without standardisation
  Eigen::MatrixXd loadings;            ///< q x r, orthonormal columns
  Eigen::VectorXd explained_inertia;   ///< r eigenvalues of the covariance, descending

  Eigen::Index components() const noexcept { return loadings.cols(); }
  double total_inertia() const { return explained_inertia.sum(); }

  /// Number of components with inertia above a relative floor of 1e-12.
  Eigen::Index numerical_rank() const;

  Eigen::MatrixXd scores(const Eigen::MatrixXd& rows) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& scores) const;
};

/// PCA through the thin SVD of the centred (optionally standardised) data.
/// Inertia uses the N-1 divisor. Columns with standard deviation below 1e-12
/// keep scale 1. Throws std::invalid_argument for fewer than two rows.
ProjectionBasis pca_fit(const Eigen::MatrixXd& rows, bool standardize);

/// Smallest C whose cumulative inertia share reaches `threshold` (at least 1,
/// at most the number of components). Shares are compared with a 1e-12 slack
/// so a share sum that lands exactly on the threshold counts as reaching it.
Eigen::Index select_components(const ProjectionBasis& basis, double threshold);

/// Clamped cubic B-spline basis on [0, 1] with equally spaced interior knots.
class SplineBasis {
 public:
  static constexpr int kDegree = 3;

  /// `interior` knots strictly inside (0, 1); dimension interior + 4.
  static SplineBasis with_interior_knots(int interior);
  /// `total` knots counting both boundary knots once; dimension total + 2.
  static SplineBasis with_total_knots(int total);

  int dimension() const noexcept { return static_cast<int>(knots_.size()) - kDegree - 1; }
  const std::vector<double>& knots() const noexcept { return knots_; }  ///< full clamped knot vector

  /// Values of all basis functions at t in [0, 1].
  Eigen::RowVectorXd evaluate(double t) const;

  /// Gram matrix of inner products int_0^1 B_i B_j dt (exact Gauss-Legendre).
  Eigen::MatrixXd gram() const;

 private:
  explicit SplineBasis(std::vector<double> knots) : knots_(std::move(knots)) {}
  std::vector<double> knots_;
};

/// n x q collocation matrix. Throws std::invalid_argument for times outside
/// [0, 1].
Eigen::MatrixXd bspline_design(const SplineBasis& basis, const Eigen::VectorXd& times);

/// Least-squares spline coefficients per channel (q x p). Throws
/// std::invalid_argument when the collocation matrix is rank deficient.
Eigen::MatrixXd curve_smooth(const Eigen::MatrixXd& values, const Eigen::VectorXd& times, const SplineBasis& basis);

/// Multivariate functional PCA in the L2 metric of a basis expansion. Each
/// row of the coefficient matrix concatenates p channel blocks of q basis
/// coefficients; the metric is block-diagonal with the q x q Gram matrix.
struct FunctionalPca {
  ProjectionBasis basis;           ///< PCA of coefficient rows mapped through W^{1/2}
  Eigen::MatrixXd sqrt_metric;     ///< W^{1/2}
  Eigen::MatrixXd eigenfunctions;  ///< W^{-1/2} * loadings: eigenfunction coefficients

  Eigen::MatrixXd scores(const Eigen::MatrixXd& coeff_rows) const;
  const Eigen::VectorXd& inertia() const noexcept { return basis.explained_inertia; }
};

/// Throws std::invalid_argument when the Gram matrix is not symmetric
/// positive definite or the row width is not a multiple of its size.
FunctionalPca fpca_fit(const Eigen::MatrixXd& coeff_rows, const Eigen::MatrixXd& gram);

/// Trapezoidal rule for int sum_k x_k(t) theta_k(t) dt over a shared grid.
double trapezoid_inner(const DiscretePath& x, const DiscretePath& theta);

}  // namespace sigsar
