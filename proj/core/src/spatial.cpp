#include "sigsar/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <fmt/format.h>

namespace sigsar {

SpatialWeights::SpatialWeights(Sparse matrix, bool row_normalized)
    : matrix_(std::move(matrix)), row_normalized_(row_normalized) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("weight matrix must be square");
  matrix_.makeCompressed();
  for (Eigen::Index i = 0; i < matrix_.outerSize(); ++i) {
    double row_sum = 0.0;
    bool nonempty = false;
    for (Sparse::InnerIterator it(matrix_, i); it; ++it) {
      if (!std::isfinite(it.value()) || it.value() < 0.0)
        throw std::invalid_argument("weights must be finite and nonnegative");
      if (it.col() == i && it.value() != 0.0) throw std::invalid_argument("weight matrix diagonal must be zero");
      row_sum += it.value();
      nonempty = nonempty || it.value() != 0.0;
    }
    if (row_normalized_ && nonempty && std::abs(row_sum - 1.0) > 1e-12)
      throw std::invalid_argument(fmt::format("row {} sums to {} in a row-normalised matrix", i, row_sum));
  }
}

SpatialWeights SpatialWeights::from_dense(const Eigen::MatrixXd& dense) {
  Sparse m = dense.sparseView();
  bool normalized = true;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    const double s = dense.row(i).sum();
    if (s != 0.0 && std::abs(s - 1.0) > 1e-12) normalized = false;
  }
  return SpatialWeights(std::move(m), normalized);
}

SpatialWeights SpatialWeights::none(Eigen::Index n) { return SpatialWeights(Sparse(n, n), true); }

SpatialWeights knn_weights(const Coordinates& coords, int k) {
  const auto n = static_cast<Eigen::Index>(coords.size());
  if (k < 1 || k >= n)
    throw std::invalid_argument(fmt::format("k-NN weights need 1 <= k < N (k = {}, N = {})", k, n));

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n * k));
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n - 1));
  const double w = 1.0 / k;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = coords[static_cast<std::size_t>(i)].x - coords[static_cast<std::size_t>(j)].x;
      const double dy = coords[static_cast<std::size_t>(i)].y - coords[static_cast<std::size_t>(j)].y;
      const double d2 = dx * dx + dy * dy;
      if (d2 == 0.0) throw std::invalid_argument(fmt::format("duplicate coordinates for units {} and {}", i, j));
      dist[m++] = {d2, j};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (int r = 0; r < k; ++r) triplets.emplace_back(i, dist[static_cast<std::size_t>(r)].second, w);
  }
  SpatialWeights::Sparse m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  SpatialWeights out(std::move(m), true);
  out.neighbours_ = k;
  return out;
}

Eigen::MatrixXd sar_operator(const SpatialWeights& weights, double rho) {
  const Eigen::Index n = weights.size();
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
  s -= rho * weights.dense();
  return s;
}

Eigen::VectorXd apply_sar(const SpatialWeights& weights, double rho, const Eigen::VectorXd& y) {
  return y - rho * (weights.matrix() * y);
}

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> factor_checked(const SpatialWeights& weights, double rho) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sar_operator(weights, rho));
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double scale = std::max(1.0, diag.maxCoeff());
  if (!(diag.minCoeff() > 1e-13 * scale))
    throw SingularSystemError(fmt::format("S(rho) = I - rho V is singular at rho = {}", rho), rho);
  return lu;
}

}  // namespace

double log_det_S(const SpatialWeights& weights, double rho) {
  if (rho == 0.0 || weights.empty()) return 0.0;
  const auto lu = factor_checked(weights, rho);
  const auto& u = lu.matrixLU();
  double log_abs = 0.0;
  int sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double d = u(i, i);
    if (d < 0.0) sign = -sign;
    log_abs += std::log(std::abs(d));
  }
  if (sign <= 0)
    throw SingularSystemError(fmt::format("det S(rho) is negative at rho = {}", rho), rho);
  return log_abs;
}

Eigen::MatrixXd sar_solve(const SpatialWeights& weights, double rho, const Eigen::MatrixXd& rhs) {
  if (rhs.rows() != weights.size()) throw std::invalid_argument("sar_solve: rhs has the wrong number of rows");
  if (rho == 0.0 || weights.empty()) return rhs;
  return factor_checked(weights, rho).solve(rhs);
}

Eigen::VectorXd sar_solve(const SpatialWeights& weights, double rho, const Eigen::VectorXd& rhs) {
  return sar_solve(weights, rho, Eigen::MatrixXd(rhs)).col(0);
}

Eigen::MatrixXd g_matrix(const SpatialWeights& weights, double rho) {
  if (rho == 0.0 || weights.empty()) return weights.dense();
  // G = V S^{-1}  <=>  S^T G^T = V^T
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sar_operator(weights, rho).transpose());
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 1e-13 * std::max(1.0, diag.maxCoeff())))
    throw SingularSystemError(fmt::format("S(rho) = I - rho V is singular at rho = {}", rho), rho);
  Eigen::MatrixXd gt = lu.solve(weights.dense().transpose());
  return gt.transpose();
}

SpectralLogDet::SpectralLogDet(const SpatialWeights& weights) {
  if (weights.empty()) return;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(weights.dense(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue decomposition of V failed");
  const auto& ev = solver.eigenvalues();
  eigenvalues_.assign(ev.data(), ev.data() + ev.size());
}

double SpectralLogDet::operator()(double rho) const {
  double out = 0.0;
  int negative_real = 0;
  for (const auto& lambda : eigenvalues_) {
    const std::complex<double> f = 1.0 - rho * lambda;
    const double mag = std::abs(f);
    if (!(mag > 1e-13)) throw SingularSystemError(fmt::format("S(rho) is singular at rho = {}", rho), rho);
    if (lambda.imag() == 0.0 && f.real() < 0.0) ++negative_real;
    out += std::log(mag);
  }
  if (negative_real % 2 != 0)
    throw SingularSystemError(fmt::format("det S(rho) is negative at rho = {}", rho), rho);
  return out;
}

double SpectralLogDet::derivative(double rho) const {
  double out = 0.0;
  for (const auto& lambda : eigenvalues_) out -= (lambda / (1.0 - rho * lambda)).real();
  return out;
}

}  // namespace sigsar
