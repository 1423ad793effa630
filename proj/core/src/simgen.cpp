#include "sigsar/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include "sigsar/funcdata.hpp"

namespace sigsar {

void ExperimentConfig::validate() const {
  if (model < 1 || model > 3) throw std::invalid_argument(fmt::format("model must be 1, 2 or 3 (got {})", model));
  if (p < 1) throw std::invalid_argument("p must be positive");
  if (n < 2) throw std::invalid_argument("N must be at least 2");
  if (grid < 1 || static_cast<long long>(grid) * grid < n)
    throw std::invalid_argument(fmt::format("a {0}x{0} grid cannot hold {1} units", grid, n));
  if (k < 1 || k >= n) throw std::invalid_argument(fmt::format("k = {} outside [1, N)", k));
  if (!(rho0 > -1.0 && rho0 < 1.0)) throw std::invalid_argument("rho0 must lie in (-1, 1)");
  if (n_times < 2) throw std::invalid_argument("n_times must be at least 2");
  if (d_star < 1) throw std::invalid_argument("D* must be at least 1");
  if (replicates < 0) throw std::invalid_argument("replicates must be nonnegative");
  const double fs[] = {split.train, split.validation, split.test};
  for (double f : fs)
    if (!(f > 0.0)) throw std::invalid_argument("split fractions must be positive");
  if (std::abs(split.train + split.validation + split.test - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");
}

Coordinates allocate_grid(int n, int grid, std::mt19937_64& rng) {
  if (n < 0 || grid < 1) throw std::invalid_argument("allocate_grid: invalid sizes");
  const int cells = grid * grid;
  if (n > cells) throw std::invalid_argument(fmt::format("allocate_grid: {} units exceed {} cells", n, cells));
  std::vector<int> idx(static_cast<std::size_t>(cells));
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first n entries are a uniform sample.
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> pick(i, cells - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  Coordinates out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = idx[static_cast<std::size_t>(i)];
    out.push_back({static_cast<double>(c % grid), static_cast<double>(c / grid)});
  }
  return out;
}

GaussianProcess::GaussianProcess(const Eigen::VectorXd& times) : times_(times) {
  const Eigen::Index n = times.size();
  if (n == 0) throw std::invalid_argument("GaussianProcess: empty grid");
  if (!((times.array() >= 0.0).all() && (times.array() <= 1.0).all()))
    throw std::invalid_argument("GaussianProcess: times must lie in [0, 1]");
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = std::exp(-std::abs(times(i) - times(j)));
  for (double jitter = 1e-10; jitter <= 1e-4 * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
  }
  throw std::runtime_error("GaussianProcess: Cholesky factorisation failed after jitter escalation");
}

Eigen::VectorXd GaussianProcess::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(times_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return factor_.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_gp(const Eigen::VectorXd& times, std::mt19937_64& rng) {
  return GaussianProcess(times).sample(rng);
}

Eigen::VectorXd uniform_times(int n) {
  if (n < 2) throw std::invalid_argument("uniform_times: need at least two points");
  return Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
}

std::mt19937_64 replicate_rng(const ExperimentConfig& config, int replicate, SeedStream stream) {
  const auto lo = static_cast<std::uint32_t>(config.master_seed & 0xffffffffULL);
  const auto hi = static_cast<std::uint32_t>(config.master_seed >> 32);
  const auto rho_code = static_cast<std::uint32_t>(static_cast<std::int32_t>(std::lround(config.rho0 * 1e6)));
  std::seed_seq seq{lo,
                    hi,
                    static_cast<std::uint32_t>(config.model),
                    static_cast<std::uint32_t>(config.p),
                    static_cast<std::uint32_t>(config.k),
                    rho_code,
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double model_mean(const ExperimentConfig& config, const DiscretePath& x, const Eigen::VectorXd& alpha,
                  const DiscretePath& theta_star) {
  switch (config.model) {
    case 1:
      return trapezoid_inner(x, theta_star);
    case 2:
      return alpha.norm();
    case 3: {
      const auto sx = path_signature(augment_path(x, config.augment), config.d_star);
      const auto st = path_signature(augment_path(theta_star, config.augment), config.d_star);
      const auto a = sx.flat();
      const auto b = st.flat();
      return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    }
    default:
      throw std::invalid_argument("unknown model");
  }
}

SimulatedDataset gen_dataset(const ExperimentConfig& config, int replicate) {
  config.validate();
  auto rng = replicate_rng(config, replicate, SeedStream::data);
  const int n = config.n;
  const int p = config.p;
  const Eigen::VectorXd times = uniform_times(config.n_times);
  const GaussianProcess gp(times);
  std::uniform_real_distribution<double> slope(-3.0, 3.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SimulatedDataset out;
  out.coords = allocate_grid(n, config.grid, rng);
  out.weights = knn_weights(out.coords, config.k);
  out.unit_ids.resize(static_cast<std::size_t>(n));
  std::iota(out.unit_ids.begin(), out.unit_ids.end(), 0);

  TruthRecord& truth = out.truth;
  truth.rho0 = config.rho0;
  truth.beta.resize(p);
  Eigen::MatrixXd theta(config.n_times, p);
  for (int c = 0; c < p; ++c) {
    truth.beta(c) = slope(rng);
    theta.col(c) = truth.beta(c) * times + gp.sample(rng);
  }
  truth.theta_star = DiscretePath(theta, times);

  truth.alpha.resize(n, p);
  out.paths.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd x(config.n_times, p);
    for (int c = 0; c < p; ++c) {
      truth.alpha(i, c) = slope(rng);
      x.col(c) = truth.alpha(i, c) * times + gp.sample(rng);
    }
    out.paths.emplace_back(std::move(x), times);
  }

  truth.noise.resize(n);
  for (int i = 0; i < n; ++i) truth.noise(i) = normal(rng);

  truth.mean.resize(n);
  for (int i = 0; i < n; ++i)
    truth.mean(i) = model_mean(config, out.paths[static_cast<std::size_t>(i)], truth.alpha.row(i).transpose(),
                               truth.theta_star);

  out.y = sar_solve(out.weights, config.rho0, Eigen::VectorXd(truth.mean + truth.noise));
  return out;
}

SimulatedDataset subset(const SimulatedDataset& data, const std::vector<int>& rows, int k) {
  SimulatedDataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.y.resize(m);
  out.truth.rho0 = data.truth.rho0;
  out.truth.beta = data.truth.beta;
  out.truth.theta_star = data.truth.theta_star;
  out.truth.alpha.resize(m, data.truth.alpha.cols());
  out.truth.mean.resize(m);
  out.truth.noise.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const int r = rows[static_cast<std::size_t>(j)];
    if (r < 0 || r >= data.size()) throw std::out_of_range("subset: row index out of range");
    out.unit_ids.push_back(data.unit_ids[static_cast<std::size_t>(r)]);
    out.coords.push_back(data.coords[static_cast<std::size_t>(r)]);
    out.paths.push_back(data.paths[static_cast<std::size_t>(r)]);
    out.y(j) = data.y(r);
    if (data.truth.alpha.rows() == data.size()) out.truth.alpha.row(j) = data.truth.alpha.row(r);
    if (data.truth.mean.size() == data.size()) out.truth.mean(j) = data.truth.mean(r);
    if (data.truth.noise.size() == data.size()) out.truth.noise(j) = data.truth.noise(r);
  }
  if (m == 0) {
    out.weights = SpatialWeights::none(0);
  } else {
    if (m <= k)
      throw std::invalid_argument(fmt::format("split block of {} units is too small for k = {} neighbours", m, k));
    out.weights = knn_weights(out.coords, k);
  }
  return out;
}

DatasetSplit split_dataset(const SimulatedDataset& data, const SplitFractions& fractions, int k,
                           std::mt19937_64& rng) {
  const double fs[] = {fractions.train, fractions.validation, fractions.test};
  for (double f : fs)
    if (!(f >= 0.0)) throw std::invalid_argument("split fractions must be nonnegative");
  if (std::abs(fractions.train + fractions.validation + fractions.test - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");

  const int n = static_cast<int>(data.size());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  const int n_train = static_cast<int>(std::lround(n * fractions.train));
  const int n_val = std::min(n - n_train, static_cast<int>(std::lround(n * fractions.validation)));
  auto block = [&](int from, int to) {
    std::vector<int> rows(perm.begin() + from, perm.begin() + to);
    std::sort(rows.begin(), rows.end());
    return subset(data, rows, k);
  };
  DatasetSplit out;
  out.train = block(0, n_train);
  out.validation = block(n_train, n_train + n_val);
  out.test = block(n_train + n_val, n);
  return out;
}

}  // namespace sigsar
