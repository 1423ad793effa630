#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "sigsar/signature.hpp"
#include "test_support.hpp"

using namespace sigsar;
using sigsar::testing::random_path;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

DiscretePath two_segment() {
  Eigen::MatrixXd v(3, 2);
  v << 0, 0, 1, 0, 1, 1;
  return DiscretePath::uniform(v);
}

}  // namespace

TEST_CASE("sig_dim counts words up to the truncation order") {
  CHECK(sig_dim(2, 2) == 7);
  CHECK(sig_dim(3, 0) == 1);
  CHECK(sig_dim(2, 10) == 2047);
  CHECK(sig_dim(1, 4) == 5);
  CHECK(sig_dim(3, 5) == 364);
  CHECK_THROWS_AS(sig_dim(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(sig_dim(2, -1), std::invalid_argument);
}

TEST_CASE("word offsets are a bijection within each level") {
  for (int p : {1, 2, 3}) {
    for (int d = 0; d <= 4; ++d) {
      const auto words = words_of_length(d, p);
      REQUIRE(words.size() == static_cast<std::size_t>(std::pow(p, d)));
      for (std::size_t i = 0; i < words.size(); ++i) {
        CHECK(word_offset(words[i], p) == i);
        CHECK(word_from_offset(i, d, p) == words[i]);
      }
    }
  }
  CHECK(word_label({0, 1}) == "(1,2)");
  CHECK(word_label({}) == "()");
  CHECK(all_words(2, 2).size() == 7);
}

TEST_CASE("tensor_exp of a single increment") {
  SUBCASE("zero increment is the identity") {
    const double zero[] = {0.0, 0.0};
    const auto e = tensor_exp(zero, 3);
    CHECK(max_abs_diff(e.flat(), TruncatedTensor::identity(2, 3).flat()) == 0.0);
  }
  SUBCASE("level two is the symmetric square over 2") {
    const double a = 0.7, b = -1.3;
    const double inc[] = {a, b};
    const auto e = tensor_exp(inc, 2);
    CHECK(e[{}] == 1.0);
    CHECK(e[{0}] == doctest::Approx(a));
    CHECK(e[{1}] == doctest::Approx(b));
    CHECK(e[{0, 0}] == doctest::Approx(a * a / 2));
    CHECK(e[{0, 1}] == doctest::Approx(a * b / 2));
    CHECK(e[{1, 0}] == doctest::Approx(a * b / 2));
    CHECK(e[{1, 1}] == doctest::Approx(b * b / 2));
  }
  SUBCASE("product of letters over d factorial") {
    const double inc[] = {1.0, 2.0};
    CHECK(tensor_exp(inc, 3)[{0, 1, 1}] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("tensor_mul") {
  std::mt19937_64 rng(11);
  const auto x = path_signature(random_path(rng, 6, 2), 3);
  SUBCASE("identity is the unit") {
    CHECK(max_abs_diff(tensor_mul(TruncatedTensor::identity(2, 3), x).flat(), x.flat()) == 0.0);
    CHECK(max_abs_diff(tensor_mul(x, TruncatedTensor::identity(2, 3)).flat(), x.flat()) == 0.0);
  }
  SUBCASE("a segment followed by its reverse cancels") {
    const double d1[] = {0.4, -2.1};
    const double d2[] = {-0.4, 2.1};
    const auto prod = tensor_mul(tensor_exp(d1, 4), tensor_exp(d2, 4));
    CHECK(max_abs_diff(prod.flat(), TruncatedTensor::identity(2, 4).flat()) < 1e-14);
  }
  SUBCASE("two orthogonal unit steps") {
    const double e1[] = {1.0, 0.0};
    const double e2[] = {0.0, 1.0};
    const auto prod = tensor_mul(tensor_exp(e1, 2), tensor_exp(e2, 2));
    CHECK(prod[{0, 1}] == doctest::Approx(1.0));
    CHECK(prod[{1, 0}] == doctest::Approx(0.0));
    const auto oracle = sigsar::testing::quadrature_signature(two_segment(), 2, 1000);
    CHECK(max_abs_diff(prod.flat(), oracle) < 1e-9);
  }
  SUBCASE("mismatched shapes are rejected") {
    CHECK_THROWS_AS(tensor_mul(TruncatedTensor(2, 3), TruncatedTensor(2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(tensor_mul(TruncatedTensor(2, 3), TruncatedTensor(3, 3)), std::invalid_argument);
  }
}

TEST_CASE("path_signature of simple paths") {
  SUBCASE("one segment equals tensor_exp") {
    Eigen::MatrixXd v(2, 2);
    v << 0, 0, 0.3, -0.8;
    const double inc[] = {0.3, -0.8};
    CHECK(max_abs_diff(path_signature(DiscretePath::uniform(v), 2).flat(), tensor_exp(inc, 2).flat()) == 0.0);
  }
  SUBCASE("the L-shaped path") {
    const auto s = path_signature(two_segment(), 2);
    CHECK(s[{0}] == doctest::Approx(1.0));
    CHECK(s[{1}] == doctest::Approx(1.0));
    CHECK(s[{0, 0}] == doctest::Approx(0.5));
    CHECK(s[{1, 1}] == doctest::Approx(0.5));
    CHECK(s[{0, 1}] == doctest::Approx(1.0));
    CHECK(s[{1, 0}] == doctest::Approx(0.0));
  }
  SUBCASE("flattened length and leading one") {
    std::mt19937_64 rng(3);
    for (int p : {1, 2, 3}) {
      const auto s = path_signature(random_path(rng, 7, p), 4);
      CHECK(s.size() == sig_dim(p, 4));
      CHECK(s.flat()[0] == 1.0);
    }
  }
  SUBCASE("matches nested quadrature on random paths") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 3; ++rep) {
      const auto path = random_path(rng, 6, 2, 0.5);
      const auto s = path_signature(path, 3);
      const auto oracle = sigsar::testing::quadrature_signature(path, 3, 2000);
      for (int d = 1; d <= 3; ++d) {
        const auto level = s.level(d);
        const std::size_t off = sig_dim(2, d - 1);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < level.size(); ++i) {
          err = std::max(err, std::abs(level[i] - oracle[off + i]));
          scale = std::max(scale, std::abs(oracle[off + i]));
        }
        CHECK(err / scale < 1e-6);
      }
    }
  }
  SUBCASE("depth zero is rejected") {
    CHECK_THROWS_AS(path_signature(two_segment(), 0), std::invalid_argument);
  }
}

TEST_CASE("DiscretePath validation") {
  Eigen::MatrixXd one(1, 2);
  one << 1, 2;
  CHECK_THROWS_AS(DiscretePath::uniform(one), std::invalid_argument);
  Eigen::MatrixXd v(3, 1);
  v << 1, 2, 3;
  Eigen::VectorXd bad(3);
  bad << 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(DiscretePath(v, bad), std::invalid_argument);
  Eigen::VectorXd outside(3);
  outside << 0.0, 0.5, 1.5;
  CHECK_THROWS_AS(DiscretePath(v, outside), std::invalid_argument);
  Eigen::MatrixXd nan_values = v;
  nan_values(1, 0) = std::nan("");
  CHECK_THROWS_AS(DiscretePath::uniform(nan_values), std::invalid_argument);
}

TEST_CASE("augment_path") {
  Eigen::MatrixXd v(3, 1);
  v << 3, 4, 5;
  Eigen::VectorXd t(3);
  t << 0.0, 0.5, 1.0;
  const DiscretePath path(v, t);

  SUBCASE("no flags is the identity") {
    const auto out = augment_path(path, {});
    CHECK(out.values() == path.values());
    CHECK(out.times() == path.times());
  }
  SUBCASE("basepoint and time") {
    const auto out = augment_path(path, {true, true});
    Eigen::MatrixXd expected(4, 2);
    expected << 0, 0, 3, 0, 4, 0.5, 5, 1;
    CHECK(out.values() == expected);
    for (Eigen::Index i = 1; i < out.times().size(); ++i) CHECK(out.times()(i) > out.times()(i - 1));
  }
  SUBCASE("time only appends the sample time") {
    const auto out = augment_path(path, {false, true});
    CHECK(out.dim() == 2);
    CHECK(out.values().col(1) == t);
  }
  SUBCASE("basepoint on an interior start keeps times increasing") {
    Eigen::VectorXd t2(3);
    t2 << 0.2, 0.5, 1.0;
    const auto out = augment_path(DiscretePath(v, t2), {true, false});
    CHECK(out.length() == 4);
    CHECK(out.times()(0) >= 0.0);
    CHECK(out.times()(0) < 0.2);
  }
  SUBCASE("basepoint breaks translation invariance") {
    Eigen::MatrixXd shifted = v.array() + 10.0;
    const auto a = path_signature(augment_path(path, {true, false}), 2);
    const auto b = path_signature(augment_path(DiscretePath(shifted, t), {true, false}), 2);
    CHECK(a.level(1)[0] != b.level(1)[0]);
  }
}

TEST_CASE("shuffle_product") {
  using W = Word;
  auto count = [](const std::vector<Word>& ws) {
    std::map<Word, int> m;
    for (const auto& w : ws) ++m[w];
    return m;
  };
  CHECK(count(shuffle_product(W{0}, W{1})) == std::map<Word, int>{{W{0, 1}, 1}, {W{1, 0}, 1}});
  CHECK(count(shuffle_product(W{0}, W{})) == std::map<Word, int>{{W{0}, 1}});
  CHECK(count(shuffle_product(W{0, 0}, W{0})) == std::map<Word, int>{{W{0, 0, 0}, 3}});
  CHECK(shuffle_product(W{0, 1}, W{2, 3}).size() == 6);
}

TEST_CASE("algebraic identities on random paths") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 1 + rep % 3;
    const int depth = 1 + rep % 4;
    const auto path = random_path(rng, 8, p);
    const auto sig = path_signature(path, depth);

    // Chen: split at an interior sample.
    const Eigen::Index cut = 1 + rep % 6;
    const DiscretePath head = DiscretePath::uniform(path.values().topRows(cut + 1));
    const DiscretePath tail = DiscretePath::uniform(path.values().bottomRows(path.length() - cut));
    const auto chen = tensor_mul(path_signature(head, depth), path_signature(tail, depth));
    CHECK(max_abs_diff(chen.flat(), sig.flat()) < 1e-12 * std::max(1.0, std::abs(sig.flat().back())) + 1e-12);

    // Translation.
    Eigen::MatrixXd shifted = path.values();
    shifted.rowwise() += Eigen::RowVectorXd::Constant(p, 3.7);
    CHECK(max_abs_diff(path_signature(DiscretePath::uniform(shifted), depth).flat(), sig.flat()) < 1e-12);

    // Reparametrisation: bit-identical.
    const DiscretePath retimed(path.values(), sigsar::testing::random_times(rng, 8));
    const auto r = path_signature(retimed, depth);
    CHECK(std::equal(r.flat().begin(), r.flat().end(), sig.flat().begin()));

    // Scaling.
    const double lambda = 1.7;
    const auto scaled = path_signature(DiscretePath::uniform(lambda * path.values()), depth);
    for (int d = 0; d <= depth; ++d) {
      const auto a = scaled.level(d);
      const auto b = sig.level(d);
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(std::pow(lambda, d) * b[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("shuffle identity holds for signature coefficients") {
  std::mt19937_64 rng(23);
  const int depth = 4;
  for (int p : {2, 3}) {
    const auto sig = path_signature(random_path(rng, 6, p, 0.6), depth);
    for (const Word& u : all_words(p, depth))
      for (const Word& v : all_words(p, depth)) {
        if (u.size() + v.size() > static_cast<std::size_t>(depth)) continue;
        double rhs = 0.0;
        for (const Word& w : shuffle_product(u, v)) rhs += sig[w];
        CHECK(sig[u] * sig[v] == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
      }
  }
}
