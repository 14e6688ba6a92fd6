#include "nsplab/model.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace nsplab;

namespace {

ExactMatrix ex2() {
  return parse_matrix("4 5\n1 1/2 9/4 0 0\n1 -1/2 0 3/4 0\n0 1 0 0 4/3\n1 -1 0 0 0\n");
}

bool proportional(const ExactVec& a, const ExactVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i] * b[j] != a[j] * b[i]) return false;
  return true;
}

Matrix random_matrix(std::size_t m, std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  Matrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = nd(g);
  return a;
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-0.75") == Rational(-3, 4));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("2.5E+2") == Rational(250));
  CHECK(parse_rational("0.1") == Rational(1, 10));
  CHECK_THROWS_AS(parse_rational("nan"), InputError);
  CHECK_THROWS_AS(parse_rational("inf"), InputError);
  CHECK_THROWS_AS(parse_rational("1/0"), InputError);
  CHECK_THROWS_AS(parse_rational("abc"), InputError);
  CHECK(to_string(Rational(-1, 12)) == "-1/12");
  CHECK(to_string(Rational(7)) == "7");
}

TEST_CASE("example2 kernel, exact and float") {
  const auto k = nullspace_basis(ex2());
  REQUIRE(k.dim() == 1);
  CHECK(proportional(k.columns[0], parse_vector("-1,-1,2/3,2/3,3/4")));
  const auto a = ex2();
  for (const auto& c : k.columns)
    for (const auto& v : a.multiply(c)) CHECK(v == 0);

  const auto kf = nullspace_basis(to_double(ex2()));
  REQUIRE(kf.dim() == 1);
  const Vec& c = kf.columns[0];
  const double f = -1.0 / c[0];
  const Vec want{-1, -1, 2.0 / 3, 2.0 / 3, 0.75};
  for (std::size_t i = 0; i < 5; ++i) CHECK(c[i] * f == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("trivial kernels") {
  ExactMatrix id(3, 3);
  for (std::size_t i = 0; i < 3; ++i) id(i, i) = 1;
  CHECK(nullspace_basis(id).dim() == 0);
  CHECK(nullspace_basis(to_double(id)).dim() == 0);

  const auto k = nullspace_basis(parse_matrix("1 2\n1 1\n"));
  REQUIRE(k.dim() == 1);
  CHECK(proportional(k.columns[0], parse_vector("1,-1")));
}

TEST_CASE("non-finite entries are rejected") {
  Matrix a(1, 2);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nullspace_basis(a), InputError);
  a(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(nullspace_basis(a), InputError);
}

TEST_CASE("rank-nullity and residual on random matrices") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial % 8;
    const std::size_t m = 1 + trial % n;
    Matrix a = random_matrix(m, n, g);
    if (trial % 5 == 0 && m >= 2)  // duplicate a row to force rank deficiency
      for (std::size_t j = 0; j < n; ++j) a(m - 1, j) = a(0, j);
    const auto k = nullspace_basis(a);
    CHECK(rank(a) + k.dim() == n);
    double anorm = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) anorm = std::max(anorm, std::abs(a(i, j)));
    for (const auto& c : k.columns) {
      const double cn = norm_inf<double>(c);
      for (double r : a.multiply(c)) CHECK(std::abs(r) <= 1e-9 * anorm * cn);
    }
  }
}

TEST_CASE("exact rank-nullity on random integer matrices") {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> di(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 6, m = 1 + trial % 4;
    ExactMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = di(g);
    const auto k = nullspace_basis(a);
    CHECK(rank(a) + k.dim() == n);
    for (const auto& c : k.columns)
      for (const auto& v : a.multiply(c)) CHECK(v == 0);
  }
}

TEST_CASE("orthonormalized keeps the span") {
  const auto k = nullspace_basis(to_double(parse_matrix("2 5\n1 2 3 4 5\n0 1 0 1 0\n")));
  const auto q = orthonormalized(k);
  REQUIRE(q.dim() == 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < 5; ++i) dot += q.columns[a][i] * q.columns[b][i];
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("support_of") {
  CHECK(support_of(Vec{0, 1e-12, 3}).one_based() == std::vector<std::size_t>{3});
  const ExactVec v = parse_vector("-1,-1,2/3,2/3,3/4");
  CHECK(support_of(std::span<const Rational>(v)).to_string() == "{1,2,3,4,5}");
  CHECK(support_of(Vec(4, 0.0)).empty());
  std::mt19937_64 g(2);
  for (int t = 0; t < 100; ++t) {
    Vec z(6);
    for (auto& x : z) x = std::uniform_int_distribution<int>(0, 2)(g) == 0 ? 0.0 : std::normal_distribution<double>()(g);
    Vec neg(z), scaled(z);
    for (auto& x : neg) x = -x;
    for (auto& x : scaled) x *= 3.5;
    CHECK(support_of(z) == support_of(neg));
    CHECK(support_of(z) == support_of(scaled));
  }
}

TEST_CASE("equal height") {
  CHECK(is_equal_height(Vec{1, -1, 0}));
  CHECK_FALSE(is_equal_height(Vec{2, 1, 0}));
  CHECK(is_equal_height(Vec{1, 1, 0, 0}));
  const ExactVec e = parse_vector("1/3,0,-1/3");
  CHECK(is_equal_height(std::span<const Rational>(e)));
}

TEST_CASE("sorted magnitudes") {
  CHECK(sorted_magnitudes(Vec{-3, 1, 2}) == Vec{3, 2, 1});
  const ExactVec v = parse_vector("1,1,2/3,2/3,3/4");
  CHECK(sorted_magnitudes(std::span<const Rational>(v)) == parse_vector("1,1,3/4,2/3,2/3"));
  CHECK(sorted_magnitudes(Vec(3, 0.0)) == Vec(3, 0.0));
  CHECK(magnitude_order<double>(Vec{1, -2, 2, 1}) == std::vector<std::size_t>{1, 2, 0, 3});

  std::mt19937_64 g(9);
  for (int t = 0; t < 50; ++t) {
    Vec z(7);
    for (auto& x : z) x = std::normal_distribution<double>()(g);
    const Vec s = sorted_magnitudes(z);
    CHECK(sorted_magnitudes(s) == s);
    Vec p(z);
    std::shuffle(p.begin(), p.end(), g);
    CHECK(sorted_magnitudes(p) == s);
  }
}

TEST_CASE("support sets") {
  const auto s = SupportSet::from_one_based({3, 1}, 5);
  CHECK(s.to_string() == "{1,3}");
  CHECK(s.complement().one_based() == std::vector<std::size_t>{2, 4, 5});
  CHECK(s.contains(0));
  CHECK_FALSE(s.contains(1));
  CHECK_THROWS_AS(SupportSet::from_one_based({0}, 5), InputError);
  CHECK_THROWS_AS(SupportSet::from_one_based({6}, 5), InputError);
  CHECK_THROWS_AS(SupportSet::from_one_based({2, 2}, 5), InputError);
}

TEST_CASE("matrix text format") {
  const auto a = parse_matrix("# comment\n2 3\n1 0.5 3/4\n-1 0 2e-1\n");
  CHECK(a(0, 1) == Rational(1, 2));
  CHECK(a(1, 2) == Rational(1, 5));
  CHECK_THROWS_AS(parse_matrix("2 3\n1 2 3\n4 5\n"), InputError);
  CHECK_THROWS_AS(parse_matrix("1 2\n1 2 3\n"), InputError);
  CHECK_THROWS_AS(parse_matrix("1 2\n1 nan\n"), InputError);
  CHECK_THROWS_AS(read_matrix_file("/nonexistent/matrix.txt"), InputError);
  CHECK(parse_vector("1, 1,0 0") == parse_vector("1,1,0,0"));
}
