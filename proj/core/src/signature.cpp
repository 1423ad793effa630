#include "sigsar/signature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sigsar {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void require_valid_shape(int dim, int depth) {
  if (dim < 1) throw std::invalid_argument("signature dimension must be >= 1, got " + std::to_string(dim));
  if (depth < 0) throw std::invalid_argument("truncation depth must be >= 0, got " + std::to_string(depth));
}

}  // namespace

std::size_t sig_dim(int dim, int depth) {
  require_valid_shape(dim, depth);
  std::size_t total = 0;
  std::size_t level = 1;
  for (int d = 0; d <= depth; ++d) {
    total += level;
    level *= static_cast<std::size_t>(dim);
  }
  return total;
}

std::size_t word_offset(const Word& word, int dim) {
  std::size_t offset = 0;
  for (int letter : word) {
    if (letter < 0 || letter >= dim) throw std::out_of_range("word letter outside alphabet");
    offset = offset * static_cast<std::size_t>(dim) + static_cast<std::size_t>(letter);
  }
  return offset;
}

Word word_from_offset(std::size_t offset, int length, int dim) {
  Word word(static_cast<std::size_t>(length));
  for (int j = length - 1; j >= 0; --j) {
    word[static_cast<std::size_t>(j)] = static_cast<int>(offset % static_cast<std::size_t>(dim));
    offset /= static_cast<std::size_t>(dim);
  }
  return word;
}

std::vector<Word> words_of_length(int length, int dim) {
  const std::size_t count = ipow(static_cast<std::size_t>(dim), length);
  std::vector<Word> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(word_from_offset(i, length, dim));
  return out;
}

std::vector<Word> all_words(int dim, int depth) {
  std::vector<Word> out;
  out.reserve(sig_dim(dim, depth));
  for (int d = 0; d <= depth; ++d) {
    auto level = words_of_length(d, dim);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::string word_label(const Word& word) {
  std::string out = "(";
  for (std::size_t j = 0; j < word.size(); ++j) {
    if (j) out += ',';
    out += std::to_string(word[j] + 1);
  }
  out += ')';
  return out;
}

// ---------------------------------------------------------------------------

TruncatedTensor::TruncatedTensor(int dim, int depth) : dim_(dim), depth_(depth) {
  require_valid_shape(dim, depth);
  offsets_.resize(static_cast<std::size_t>(depth) + 2);
  std::size_t level = 1;
  offsets_[0] = 0;
  for (int d = 0; d <= depth; ++d) {
    offsets_[static_cast<std::size_t>(d) + 1] = offsets_[static_cast<std::size_t>(d)] + level;
    level *= static_cast<std::size_t>(dim);
  }
  coeffs_.assign(offsets_.back(), 0.0);
}

TruncatedTensor TruncatedTensor::identity(int dim, int depth) {
  TruncatedTensor t(dim, depth);
  t.coeffs_[0] = 1.0;
  return t;
}

TruncatedTensor TruncatedTensor::from_flat(int dim, int depth, std::vector<double> coeffs) {
  TruncatedTensor t(dim, depth);
  if (coeffs.size() != t.coeffs_.size())
    throw std::invalid_argument("flat coefficient vector has length " + std::to_string(coeffs.size()) +
                                ", expected " + std::to_string(t.coeffs_.size()));
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("tensor coefficients must be finite");
  t.coeffs_ = std::move(coeffs);
  return t;
}

std::span<const double> TruncatedTensor::level(int d) const {
  if (d < 0 || d > depth_) throw std::out_of_range("tensor level out of range");
  const auto i = static_cast<std::size_t>(d);
  return std::span<const double>(coeffs_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<double> TruncatedTensor::level(int d) {
  if (d < 0 || d > depth_) throw std::out_of_range("tensor level out of range");
  const auto i = static_cast<std::size_t>(d);
  return std::span<double>(coeffs_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

double TruncatedTensor::operator[](const Word& word) const {
  return level(static_cast<int>(word.size()))[word_offset(word, dim_)];
}

// ---------------------------------------------------------------------------

TruncatedTensor tensor_exp(std::span<const double> increment, int depth) {
  const int dim = static_cast<int>(increment.size());
  for (double x : increment)
    if (!std::isfinite(x)) throw std::invalid_argument("tensor_exp: increment must be finite");
  TruncatedTensor out = TruncatedTensor::identity(dim, depth);
  // level d = level (d-1) (x) increment / d
  for (int d = 1; d <= depth; ++d) {
    auto prev = out.level(d - 1);
    auto cur = out.level(d);
    const double inv = 1.0 / d;
    std::size_t k = 0;
    for (double a : prev)
      for (double x : increment) cur[k++] = a * x * inv;
  }
  return out;
}

TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b) {
  if (a.dim() != b.dim() || a.depth() != b.depth())
    throw std::invalid_argument("tensor_mul: operands differ in dimension or depth");
  TruncatedTensor out(a.dim(), a.depth());
  for (int d = 0; d <= a.depth(); ++d) {
    auto dst = out.level(d);
    for (int j = 0; j <= d; ++j) {
      auto left = a.level(j);
      auto right = b.level(d - j);
      std::size_t k = 0;
      for (double x : left) {
        if (x == 0.0) {
          k += right.size();
          continue;
        }
        for (double y : right) dst[k++] += x * y;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DiscretePath::DiscretePath(Eigen::MatrixXd values, Eigen::VectorXd times)
    : values_(std::move(values)), times_(std::move(times)) {
  if (values_.rows() < 2) throw std::invalid_argument("a path needs at least two samples");
  if (values_.cols() < 1) throw std::invalid_argument("a path needs at least one channel");
  if (times_.size() != values_.rows())
    throw std::invalid_argument("path times and values disagree on the number of samples");
  if (!values_.allFinite() || !times_.allFinite()) throw std::invalid_argument("path samples must be finite");
  if (times_(0) < 0.0 || times_(times_.size() - 1) > 1.0)
    throw std::invalid_argument("path times must lie in [0, 1]");
  for (Eigen::Index j = 1; j < times_.size(); ++j)
    if (!(times_(j) > times_(j - 1))) throw std::invalid_argument("path times must be strictly increasing");
}

DiscretePath DiscretePath::uniform(Eigen::MatrixXd values) {
  const Eigen::Index n = values.rows();
  Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
  return DiscretePath(std::move(values), std::move(times));
}

TruncatedTensor path_signature(const DiscretePath& path, int depth) {
  if (depth < 1) throw std::invalid_argument("path_signature: depth must be >= 1");
  const auto& x = path.values();
  const int dim = path.dim();
  TruncatedTensor sig = TruncatedTensor::identity(dim, depth);
  std::vector<double> inc(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 1; j < x.rows(); ++j) {
    for (int c = 0; c < dim; ++c) inc[static_cast<std::size_t>(c)] = x(j, c) - x(j - 1, c);
    sig = tensor_mul(sig, tensor_exp(inc, depth));
  }
  return sig;
}

DiscretePath augment_path(const DiscretePath& path, AugmentOptions options) {
  if (!options.basepoint && !options.time) return path;

  const auto& x = path.values();
  const auto& t = path.times();
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const Eigen::Index offset = options.basepoint ? 1 : 0;
  const Eigen::Index cols = p + (options.time ? 1 : 0);

  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n + offset, cols);
  values.bottomLeftCorner(n, p) = x;
  if (options.time) values.bottomRightCorner(n, 1) = t;

  Eigen::VectorXd times(n + offset);
  times.tail(n) = t;
  if (options.basepoint) {
    times(0) = t(0) - (t(1) - t(0));
    if (times(0) < 0.0) {
      // Map the extended grid affinely back onto [0, t_last].
      const double lo = times(0);
      const double hi = t(n - 1);
      times = ((times.array() - lo) / (hi - lo) * hi).matrix();
      times(0) = 0.0;
    }
  }
  return DiscretePath(std::move(values), std::move(times));
}

std::vector<Word> shuffle_product(const Word& u, const Word& v) {
  if (u.empty()) return {v};
  if (v.empty()) return {u};
  // Every shuffle ends with the last letter of u or of v.
  std::vector<Word> out;
  Word u_head(u.begin(), u.end() - 1);
  Word v_head(v.begin(), v.end() - 1);
  for (auto w : shuffle_product(u_head, v)) {
    w.push_back(u.back());
    out.push_back(std::move(w));
  }
  for (auto w : shuffle_product(u, v_head)) {
    w.push_back(v.back());
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace sigsar
