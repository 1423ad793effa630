#pragma once

// Truncated tensor algebra over R^p and exact signatures of piecewise-linear
// paths.
//
// Coefficients of a degree-D truncated tensor are stored level by level. Level
// d holds p^d entries indexed by words (i_1, ..., i_d) in lexicographic order,
// so the flat offset of a word inside its level is sum_j i_j * p^(d-j) with
// 0-based letters. Level 0 is the single scalar term. The flattened vector
// (level 0 first, then ascending levels) is the layout used by every design
// matrix built from signatures.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sigsar {

/// A word over the alphabet {0, ..., p-1}. Letters are channel indices.
using Word = std::vector<int>;

/// Number of coefficients of a depth-D truncated tensor over R^p, i.e.
/// sum_{d=0}^{D} p^d. Throws std::invalid_argument for p < 1 or D < 0.
std::size_t sig_dim(int dim, int depth);

/// Flat offset of `word` inside its own level.
std::size_t word_offset(const Word& word, int dim);

/// Inverse of word_offset for a word of the given length.
Word word_from_offset(std::size_t offset, int length, int dim);

/// All words of the given length, in lexicographic order.
std::vector<Word> words_of_length(int length, int dim);

/// All words of length 0..depth in flattening order.
std::vector<Word> all_words(int dim, int depth);

/// Human-readable label with 1-based letters, e.g. "(1,2)"; "()" for the
/// empty word.
std::string word_label(const Word& word);

class TruncatedTensor {
 public:
  TruncatedTensor() = default;

  /// All-zero tensor.
  TruncatedTensor(int dim, int depth);

  /// Unit of the algebra: 1 in level 0, zero elsewhere.
  static TruncatedTensor identity(int dim, int depth);

  static TruncatedTensor from_flat(int dim, int depth, std::vector<double> coeffs);

  int dim() const noexcept { return dim_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<const double> level(int d) const;
  std::span<double> level(int d);

  std::span<const double> flat() const noexcept { return coeffs_; }

  /// Coefficient of `word`. The word length must not exceed depth().
  double operator[](const Word& word) const;

 private:
  int dim_ = 0;
  int depth_ = -1;
  std::vector<std::size_t> offsets_;
  std::vector<double> coeffs_;
};

/// Truncated exponential of a single increment: the signature of the linear
/// segment with that displacement. Coefficient of word w at level d is
/// prod_j increment[w_j] / d!.
TruncatedTensor tensor_exp(std::span<const double> increment, int depth);

/// Truncated tensor product. Throws std::invalid_argument on dim/depth
/// mismatch.
TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b);

/// A p-dimensional path sampled at strictly increasing times in [0, 1]; the
/// signature is taken of its piecewise-linear interpolant.
class DiscretePath {
 public:
  DiscretePath() = default;

  /// Throws std::invalid_argument unless values is n x p with n >= 2, all
  /// values finite and times strictly increasing inside [0, 1].
  DiscretePath(Eigen::MatrixXd values, Eigen::VectorXd times);

  /// Equally spaced times on [0, 1].
  static DiscretePath uniform(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const Eigen::VectorXd& times() const noexcept { return times_; }
  Eigen::Index length() const noexcept { return values_.rows(); }
  int dim() const noexcept { return static_cast<int>(values_.cols()); }

 private:
  Eigen::MatrixXd values_;
  Eigen::VectorXd times_;
};

/// Exact truncated signature of the piecewise-linear interpolant: left fold of
/// tensor_mul over the tensor exponentials of consecutive increments.
TruncatedTensor path_signature(const DiscretePath& path, int depth);

struct AugmentOptions {
  bool basepoint = false;  ///< prepend a zero observation
  bool time = false;       ///< append the sample time as an extra channel
};

/// Basepoint and time-channel augmentation. A prepended zero row receives time
/// t0 - (t1 - t0), clamped into [0, t0) so the times stay increasing; when the
/// time channel is also added, that row has time-channel value 0 and the other
/// rows keep their original times as the channel value.
DiscretePath augment_path(const DiscretePath& path, AugmentOptions options);

/// All interleavings of u and v that keep each word's internal order, listed
/// with multiplicity.
std::vector<Word> shuffle_product(const Word& u, const Word& v);

}  // namespace sigsar
