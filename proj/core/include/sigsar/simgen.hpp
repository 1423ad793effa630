#pragma once

// Simulated SAR datasets with Gaussian-process functional covariates.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sigsar/signature.hpp"
#include "sigsar/spatial.hpp"

namespace sigsar {

struct SplitFractions {
  double train = 0.5;
  double validation = 0.25;
  double test = 0.25;
};

/// One cell of the simulation grid.
struct ExperimentConfig {
  int model = 3;  ///< 1: integral of X^T theta*, 2: |alpha_i|, 3: signature inner product
  int p = 2;
  int k = 4;
  double rho0 = 0.4;
  int n = 200;
  int grid = 60;
  int n_times = 101;
  int d_star = 2;
  int replicates = 50;
  std::uint64_t master_seed = 20240607;
  SplitFractions split{};
  /// Preprocessing of X_i and theta* for the Model 3 truth.
  AugmentOptions augment{true, true};

  /// Throws std::invalid_argument when a field is outside its domain.
  void validate() const;
};

struct TruthRecord {
  double rho0 = 0.0;
  Eigen::MatrixXd alpha;  ///< N x p slopes of the covariates
  Eigen::VectorXd beta;   ///< p slopes of theta*
  DiscretePath theta_star;
  Eigen::VectorXd mean;   ///< m_i
  Eigen::VectorXd noise;  ///< U_i
};

struct SimulatedDataset {
  std::vector<int> unit_ids;
  Coordinates coords;
  SpatialWeights weights;
  std::vector<DiscretePath> paths;
  Eigen::VectorXd y;
  TruthRecord truth;

  Eigen::Index size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.size() == 0; }
};

/// N distinct cells of a grid x grid lattice, uniformly without replacement,
/// as integer (column, row) coordinates.
Coordinates allocate_grid(int n, int grid, std::mt19937_64& rng);

/// Mean-zero Gaussian process with covariance exp(-|s - t|) on a fixed grid.
/// The Cholesky factor is computed once; jitter starts at 1e-10 and grows
/// tenfold up to 1e-4 before giving up with std::runtime_error.
class GaussianProcess {
 public:
  explicit GaussianProcess(const Eigen::VectorXd& times);
  Eigen::VectorXd sample(std::mt19937_64& rng) const;
  const Eigen::VectorXd& times() const noexcept { return times_; }
  double jitter() const noexcept { return jitter_; }

 private:
  Eigen::VectorXd times_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

Eigen::VectorXd sample_gp(const Eigen::VectorXd& times, std::mt19937_64& rng);

/// Equally spaced times on [0, 1].
Eigen::VectorXd uniform_times(int n);

enum class SeedStream : std::uint32_t { data = 0, split = 1 };

/// Child generator for (cell, replicate, stream), derived from the master seed
/// through std::seed_seq.
std::mt19937_64 replicate_rng(const ExperimentConfig& config, int replicate, SeedStream stream);

/// Deterministic in (config, replicate).
SimulatedDataset gen_dataset(const ExperimentConfig& config, int replicate);

/// Mean term of the configured model for one unit.
double model_mean(const ExperimentConfig& config, const DiscretePath& x, const Eigen::VectorXd& alpha,
                  const DiscretePath& theta_star);

struct DatasetSplit {
  SimulatedDataset train;
  SimulatedDataset validation;
  SimulatedDataset test;
};

/// Random partition into blocks of round(N * fraction) units (the test block
/// takes the remainder). Each nonempty block rebuilds its k-NN weights from
/// its own coordinates; empty blocks are returned empty. Throws
/// std::invalid_argument if a nonempty block has k or fewer units or the
/// fractions do not sum to 1.
DatasetSplit split_dataset(const SimulatedDataset& data, const SplitFractions& fractions, int k,
                           std::mt19937_64& rng);

/// Subset of units (rows of every per-unit field), with fresh k-NN weights.
SimulatedDataset subset(const SimulatedDataset& data, const std::vector<int>& rows, int k);

}  // namespace sigsar
