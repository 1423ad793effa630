#pragma once

// Spatial weight matrices and the linear algebra of the SAR operator
// S(rho) = I - rho * V.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace sigsar {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Coordinates = std::vector<Point>;

/// Thrown when S(rho) is singular or has a non-positive determinant.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double rho) : std::runtime_error(what), rho_(rho) {}
  double rho() const noexcept { return rho_; }

 private:
  double rho_;
};

/// Sparse nonnegative N x N weight matrix with zero diagonal.
class SpatialWeights {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SpatialWeights() = default;

  /// Validates nonnegativity, zero diagonal and, if `row_normalized`, unit row
  /// sums on nonempty rows. Throws std::invalid_argument otherwise.
  SpatialWeights(Sparse matrix, bool row_normalized);

  static SpatialWeights from_dense(const Eigen::MatrixXd& dense);
  /// N x N matrix with no neighbours at all.
  static SpatialWeights none(Eigen::Index n);

  Eigen::Index size() const noexcept { return matrix_.rows(); }
  const Sparse& matrix() const noexcept { return matrix_; }
  bool row_normalized() const noexcept { return row_normalized_; }
  bool empty() const noexcept { return matrix_.nonZeros() == 0; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

  /// Neighbour count used to build the matrix (0 when not k-NN built). Stands
  /// in for the rate sequence h_N in the asymptotic variance formulas.
  int neighbours() const noexcept { return neighbours_; }

 private:
  friend SpatialWeights knn_weights(const Coordinates&, int);
  Sparse matrix_;
  bool row_normalized_ = false;
  int neighbours_ = 0;
};

/// Row-normalised k-nearest-neighbour weights (Euclidean distance, self
/// excluded, ties broken by the smaller index). Throws std::invalid_argument
/// for k outside [1, N) or duplicate coordinates.
SpatialWeights knn_weights(const Coordinates& coords, int k);

/// Dense S(rho) = I - rho V.
Eigen::MatrixXd sar_operator(const SpatialWeights& weights, double rho);

/// S(rho) y without forming S.
Eigen::VectorXd apply_sar(const SpatialWeights& weights, double rho, const Eigen::VectorXd& y);

/// ln|det S(rho)| by LU factorisation with sign tracking. Throws
/// SingularSystemError if S(rho) is numerically singular or det <= 0.
double log_det_S(const SpatialWeights& weights, double rho);

/// S(rho)^{-1} rhs.
Eigen::MatrixXd sar_solve(const SpatialWeights& weights, double rho, const Eigen::MatrixXd& rhs);
Eigen::VectorXd sar_solve(const SpatialWeights& weights, double rho, const Eigen::VectorXd& rhs);

/// G(rho) = V S(rho)^{-1}, dense.
Eigen::MatrixXd g_matrix(const SpatialWeights& weights, double rho);

/// ln|det S(rho)| = sum_i ln|1 - rho lambda_i| over the (complex) eigenvalues
/// of V, computed once per matrix. Evaluation is O(N) per rho, which is what
/// the 1-D likelihood searches need; log_det_S stays the reference.
class SpectralLogDet {
 public:
  SpectralLogDet() = default;
  explicit SpectralLogDet(const SpatialWeights& weights);

  /// Throws SingularSystemError when some factor 1 - rho lambda_i vanishes or
  /// the determinant is negative.
  double operator()(double rho) const;

  /// d/drho ln|det S(rho)| = -tr(G(rho)).
  double derivative(double rho) const;

  const std::vector<std::complex<double>>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<std::complex<double>> eigenvalues_;
};

/// A weight matrix bundled with its cached spectral log-determinant.
struct SarSystem {
  SpatialWeights weights;
  SpectralLogDet log_det;

  SarSystem() = default;
  explicit SarSystem(SpatialWeights w) : weights(std::move(w)), log_det(weights) {}
};

}  // namespace sigsar
