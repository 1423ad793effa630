#include "sigsar/funcdata.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

namespace sigsar {

Eigen::Index ProjectionBasis::numerical_rank() const {
  if (explained_inertia.size() == 0) return 0;
  const double floor = 1e-12 * std::max(explained_inertia(0), 0.0);
  Eigen::Index r = 0;
  while (r < explained_inertia.size() && explained_inertia(r) > floor) ++r;
  return r;
}

Eigen::MatrixXd ProjectionBasis::scores(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != center.size()) throw std::invalid_argument("projection: row width does not match the basis");
  Eigen::MatrixXd z = (rows.rowwise() - center).array().rowwise() / scale.array();
  return z * loadings;
}

Eigen::MatrixXd ProjectionBasis::reconstruct(const Eigen::MatrixXd& s) const {
  Eigen::MatrixXd z = s * loadings.transpose();
  return (z.array().rowwise() * scale.array()).matrix().rowwise() + center;
}

ProjectionBasis pca_fit(const Eigen::MatrixXd& rows, bool standardize) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index q = rows.cols();
  if (n < 2) throw std::invalid_argument("pca_fit: need at least two rows");
  if (q < 1) throw std::invalid_argument("pca_fit: need at least one column");

  ProjectionBasis out;
  out.center = rows.colwise().mean();
  Eigen::MatrixXd z = rows.rowwise() - out.center;
  out.scale = Eigen::RowVectorXd::Ones(q);
  if (standardize) {
    for (Eigen::Index j = 0; j < q; ++j) {
      const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(n - 1));
      if (sd >= 1e-12) out.scale(j) = sd;
    }
    z = z.array().rowwise() / out.scale.array();
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinV);
  out.loadings = svd.matrixV();
  out.explained_inertia = svd.singularValues().array().square() / static_cast<double>(n - 1);
  // Deterministic sign: the largest-magnitude entry of each loading is positive.
  for (Eigen::Index c = 0; c < out.loadings.cols(); ++c) {
    Eigen::Index imax = 0;
    out.loadings.col(c).cwiseAbs().maxCoeff(&imax);
    if (out.loadings(imax, c) < 0.0) out.loadings.col(c) *= -1.0;
  }
  return out;
}

Eigen::Index select_components(const ProjectionBasis& basis, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("inertia threshold must lie in (0, 1]");
  const Eigen::Index r = basis.components();
  if (r == 0) throw std::invalid_argument("select_components: empty basis");
  const double total = basis.total_inertia();
  if (!(total > 0.0)) return 1;
  double cumulative = 0.0;
  for (Eigen::Index c = 0; c < r; ++c) {
    cumulative += basis.explained_inertia(c) / total;
    if (cumulative >= threshold - 1e-12) return c + 1;
  }
  return r;
}

// ---------------------------------------------------------------------------

SplineBasis SplineBasis::with_interior_knots(int interior) {
  if (interior < 0) throw std::invalid_argument("interior knot count must be nonnegative");
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(interior + 2 * (kDegree + 1)));
  for (int i = 0; i <= kDegree; ++i) knots.push_back(0.0);
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  for (int i = 0; i <= kDegree; ++i) knots.push_back(1.0);
  return SplineBasis(std::move(knots));
}

SplineBasis SplineBasis::with_total_knots(int total) {
  if (total < 2) throw std::invalid_argument("a knot sequence needs both boundary knots");
  return with_interior_knots(total - 2);
}

Eigen::RowVectorXd SplineBasis::evaluate(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument(fmt::format("spline evaluation point {} outside [0, 1]", t));
  const int q = dimension();
  const auto& u = knots_;
  // Knot span: u[span] <= t < u[span + 1], with t = 1 in the last span.
  int span = q - 1;
  if (t < 1.0) {
    span = static_cast<int>(std::upper_bound(u.begin(), u.end(), t) - u.begin()) - 1;
  }
  // Triangular Cox-de Boor table for the kDegree + 1 nonzero functions.
  double n[kDegree + 1] = {1.0};
  double left[kDegree + 1];
  double right[kDegree + 1];
  for (int j = 1; j <= kDegree; ++j) {
    left[j] = t - u[static_cast<std::size_t>(span + 1 - j)];
    right[j] = u[static_cast<std::size_t>(span + j)] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(q);
  for (int j = 0; j <= kDegree; ++j) out(span - kDegree + j) = n[j];
  return out;
}

Eigen::MatrixXd SplineBasis::gram() const {
  const int q = dimension();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(q, q);
  using Rule = boost::math::quadrature::gauss<double, 4>;
  for (std::size_t s = 0; s + 1 < knots_.size(); ++s) {
    const double a = knots_[s];
    const double b = knots_[s + 1];
    if (b <= a) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    // Rule::abscissa() lists the nonnegative nodes; mirror them.
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int sign : {-1, 1}) {
        if (sign < 0 && x[i] == 0.0) continue;
        const Eigen::RowVectorXd v = evaluate(mid + sign * half * x[i]);
        g.noalias() += (w[i] * half) * v.transpose() * v;
      }
    }
  }
  return g;
}

Eigen::MatrixXd bspline_design(const SplineBasis& basis, const Eigen::VectorXd& times) {
  Eigen::MatrixXd out(times.size(), basis.dimension());
  for (Eigen::Index i = 0; i < times.size(); ++i) out.row(i) = basis.evaluate(times(i));
  return out;
}

Eigen::MatrixXd curve_smooth(const Eigen::MatrixXd& values, const Eigen::VectorXd& times, const SplineBasis& basis) {
  if (values.rows() != times.size()) throw std::invalid_argument("curve_smooth: values and times disagree");
  if (values.rows() < basis.dimension())
    throw std::invalid_argument("curve_smooth: fewer samples than basis functions");
  const Eigen::MatrixXd design = bspline_design(basis, times);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) throw std::invalid_argument("curve_smooth: rank-deficient spline design");
  return qr.solve(values);
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd FunctionalPca::scores(const Eigen::MatrixXd& coeff_rows) const {
  return basis.scores(coeff_rows * sqrt_metric);
}

FunctionalPca fpca_fit(const Eigen::MatrixXd& coeff_rows, const Eigen::MatrixXd& gram) {
  const Eigen::Index q = gram.rows();
  if (gram.cols() != q || q == 0) throw std::invalid_argument("fpca: Gram matrix must be square");
  if (coeff_rows.cols() % q != 0) throw std::invalid_argument("fpca: row width is not a multiple of the basis size");
  if (!gram.isApprox(gram.transpose(), 1e-12)) throw std::invalid_argument("fpca: Gram matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (gram + gram.transpose()));
  const Eigen::VectorXd lam = eig.eigenvalues();
  if (!(lam.minCoeff() > 1e-12 * std::max(1.0, lam.maxCoeff())))
    throw std::invalid_argument("fpca: Gram matrix is not positive definite");
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  const Eigen::MatrixXd root = vecs * lam.cwiseSqrt().asDiagonal() * vecs.transpose();
  const Eigen::MatrixXd inv_root = vecs * lam.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();

  const Eigen::Index channels = coeff_rows.cols() / q;
  FunctionalPca out;
  out.sqrt_metric = Eigen::MatrixXd::Zero(coeff_rows.cols(), coeff_rows.cols());
  Eigen::MatrixXd inv_metric = Eigen::MatrixXd::Zero(coeff_rows.cols(), coeff_rows.cols());
  for (Eigen::Index c = 0; c < channels; ++c) {
    out.sqrt_metric.block(c * q, c * q, q, q) = root;
    inv_metric.block(c * q, c * q, q, q) = inv_root;
  }
  out.basis = pca_fit(coeff_rows * out.sqrt_metric, false);
  out.eigenfunctions = inv_metric * out.basis.loadings;
  return out;
}

double trapezoid_inner(const DiscretePath& x, const DiscretePath& theta) {
  if (x.dim() != theta.dim()) throw std::invalid_argument("trapezoid_inner: paths differ in dimension");
  if (x.times().size() != theta.times().size() || x.times() != theta.times())
    throw std::invalid_argument("trapezoid_inner: paths are sampled on different grids");
  const Eigen::VectorXd f = (x.values().array() * theta.values().array()).rowwise().sum();
  const auto& t = x.times();
  double acc = 0.0;
  for (Eigen::Index j = 1; j < t.size(); ++j) acc += 0.5 * (t(j) - t(j - 1)) * (f(j) + f(j - 1));
  return acc;
}

}  // namespace sigsar
