#include "nsplab/harness.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/random.hpp"
#include "nsplab/recovery.hpp"

#include <doctest.h>

#include <cmath>

using namespace nsplab;

namespace {

double dist_inf(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Uniform grid over [-T, T] followed by golden-section polishing around the
// best few grid points.
double line_oracle(const PenaltySpec& r, const Vec& v, const Vec& x, double t_max, std::size_t points) {
  auto phi = [&](double t) {
    Vec z(x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += t * v[i];
    return evaluate(r, z);
  };
  const double h = 2.0 * t_max / static_cast<double>(points - 1);
  std::vector<std::pair<double, double>> vals;
  vals.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = -t_max + h * static_cast<double>(i);
    vals.push_back({phi(t), t});
  }
  std::partial_sort(vals.begin(), vals.begin() + 8, vals.end());
  double best = vals.front().first;
  const double inv = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int q = 0; q < 8; ++q) {
    double a = std::max(-t_max, vals[q].second - h), b = std::min(t_max, vals[q].second + h);
    for (int it = 0; it < 100; ++it) {
      const double c = b - inv * (b - a), d = a + inv * (b - a);
      if (phi(c) < phi(d)) b = d;
      else a = c;
    }
    best = std::min({best, phi(a), phi(b)});
  }
  return std::min(best, phi(0.0));
}

}  // namespace

TEST_CASE("example2 weighted l1 picks the non-sparse point") {
  const auto rec = recover_trial(example2_weighted(), to_double(example2_matrix()), Vec{1, 1, 0, 0, 0});
  CHECK(dist_inf(rec.minimizer.z_star, Vec{0, 0, 2.0 / 3, 2.0 / 3, 0.75}) <= 1e-6);
  CHECK(rec.value == doctest::Approx(25.0 / 12.0).epsilon(1e-12));
  CHECK_FALSE(rec.success);
  CHECK(rec.minimizer.uniqueness == Uniqueness::unique);
}

TEST_CASE("example2 l1 recovers x") {
  const Vec x{1, 1, 0, 0, 0};
  const auto rec = recover_trial(PenaltySpec::l1(), to_double(example2_matrix()), x);
  CHECK(rec.success);
  CHECK(rec.minimizer.uniqueness == Uniqueness::unique);
  CHECK(dist_inf(rec.minimizer.z_star, x) <= 1e-12);
}

TEST_CASE("l1-l2 minimizer on the fixed-support counterexample") {
  const auto rec = recover_trial(PenaltySpec::l1_minus_l2(), to_double(fixed_support_matrix()), Vec{1, 1, 0, 0, 0});
  CHECK(dist_inf(rec.minimizer.z_star, Vec{0, 0, 1.5, 0.5, 0.1}) <= 1e-6);
  CHECK(rec.value == doctest::Approx(2.1 - std::sqrt(2.51)).epsilon(1e-12));
  CHECK(rec.value < 2.0 - std::sqrt(2.0));
  CHECK_FALSE(rec.success);
}

TEST_CASE("equal-height kernel") {
  const Matrix a = to_double(equal_height_matrix());
  const auto tied = recover_trial(PenaltySpec::l1_minus_l2(), a, Vec{1, 1, 0, 0});
  CHECK(tied.minimizer.uniqueness == Uniqueness::tied);
  REQUIRE(tied.minimizer.tied.size() == 1);
  CHECK(std::abs(tied.minimizer.value - (2.0 - std::sqrt(2.0))) <= 1e-9);
  CHECK_FALSE(tied.success);
  CHECK(tied.equal_height);
  const Vec other = dist_inf(tied.minimizer.z_star, Vec{1, 1, 0, 0}) < 1e-6 ? tied.minimizer.tied[0] : tied.minimizer.z_star;
  CHECK(dist_inf(other, Vec{0, 0, 1, 1}) <= 1e-6);

  const auto ok = recover_trial(PenaltySpec::l1_minus_l2(), a, Vec{2, 1, 0, 0});
  CHECK(ok.success);
  CHECK(ok.minimizer.uniqueness == Uniqueness::unique);

  const auto sorted = recover_trial(PenaltySpec::sorted_l1({0, 0, 1, 1}), a, Vec{1, 1, 0, 0});
  CHECK(sorted.minimizer.uniqueness == Uniqueness::tied);
}

TEST_CASE("trivial and unsupported dimensions") {
  Matrix id(3, 3);
  for (std::size_t i = 0; i < 3; ++i) id(i, i) = 1.0;
  const auto rec = recover_trial(PenaltySpec::l1(), id, Vec{1, 0, 2});
  CHECK(rec.success);
  CHECK(rec.minimizer.method == "trivial");
  Matrix wide(1, 5);
  wide(0, 0) = 1.0;
  CHECK_THROWS_AS(recover_trial(PenaltySpec::l1(), wide, Vec{1, 0, 0, 0, 0}), InputError);
  CHECK_THROWS_AS(recover_trial(PenaltySpec::l1(), id, Vec{1, 0}), InputError);
  MinimizerOptions bad;
  bad.t_max = -1.0;
  CHECK_THROWS_AS(recover_trial(PenaltySpec::l1(), to_double(example2_matrix()), Vec{1, 0, 0, 0, 0}, bad), InputError);
}

TEST_CASE("one-dimensional scan matches a dense grid") {
  const auto cat = default_catalog(6, 2);
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    auto g = rng_for(99, {trial});
    const Matrix a = gaussian_matrix(5, 6, g);
    const auto k = orthonormalized(nullspace_basis(a));
    REQUIRE(k.dim() == 1);
    const std::size_t s = 1 + trial % 2;
    const Vec x = random_sparse(6, s, g, 0.1, 10.0, trial % 7 == 0);
    const auto& r = cat[trial % cat.size()];
    CAPTURE(r.to_string());
    const auto rep = minimize_over_affine(r, k, x);
    const double oracle = line_oracle(r, k.columns[0], x, rep.t_max, 1000000);
    CHECK(rep.value <= oracle + 1e-8);
    CHECK(rep.value >= oracle - 1e-8);
  }
}

TEST_CASE("feasibility, anchoring and box bookkeeping") {
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    auto g = rng_for(7, {trial});
    const std::size_t d = 1 + trial % 3, n = 7;
    const Matrix a = gaussian_matrix(n - d, n, g);
    const Vec x = random_sparse(n, 2, g, 0.5, 2.0);
    const auto cat = default_catalog(n, 2);
    const auto& r = cat[trial % cat.size()];
    MinimizerOptions opts;
    if (d == 3) opts.grid = 21;
    const auto rec = recover_trial(r, a, x, opts);
    const Vec ax = a.multiply(x), az = a.multiply(rec.minimizer.z_star);
    CHECK(dist_inf(ax, az) <= 1e-9 * (1.0 + norm_inf<double>(x)));
    CHECK(rec.value <= evaluate(r, x) + 1e-12);
    CHECK(rec.minimizer.t_max == doctest::Approx(4.0 * (1.0 + norm1(x))));
    for (const auto& z : rec.minimizer.tied) {
      CHECK(dist_inf(z, rec.minimizer.z_star) > 1e-8);
      CHECK(std::abs(evaluate(r, z) - rec.value) <= 1e-9 * std::max(1.0, rec.value));
    }
  }
}

TEST_CASE("vertex enumeration is never beaten by the grid on two-dimensional kernels") {
  for (std::uint64_t trial = 0; trial < 15; ++trial) {
    auto g = rng_for(13, {trial});
    const Matrix a = gaussian_matrix(6, 8, g);
    const auto k = orthonormalized(nullspace_basis(a));
    const Vec x = random_sparse(8, 2 + trial % 2, g, 0.5, 2.0);
    for (const auto& r : {PenaltySpec::lp(Rational(1, 2)), PenaltySpec::l1_minus_l2(), PenaltySpec::capped_l1(1)}) {
      MinimizerOptions vertex_only, grid_only;
      vertex_only.grid = 0;
      const auto v = minimize_over_affine(r, k, x, vertex_only);
      const auto full = minimize_over_affine(r, k, x, grid_only);
      CHECK(v.value <= full.value + 1e-12);
      CHECK(full.method == "vertex-enumeration+grid");
      CHECK(full.grid_resolution == 401);
    }
  }
}

TEST_CASE("permutation equivariance") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    auto g = rng_for(17, {trial});
    const std::size_t n = 6;
    const Matrix a = gaussian_matrix(n - 1 - trial % 2, n, g);
    const Vec x = random_sparse(n, 2, g, 0.5, 2.0);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), g);
    Matrix ap(a.rows(), n);
    Vec xp(n);
    for (std::size_t j = 0; j < n; ++j) {
      xp[j] = x[perm[j]];
      for (std::size_t i = 0; i < a.rows(); ++i) ap(i, j) = a(i, perm[j]);
    }
    for (const auto& r : {PenaltySpec::lp(Rational(1, 2)), PenaltySpec::l1_minus_l2(), PenaltySpec::l1()}) {
      const auto m = recover_trial(r, a, x);
      const auto mp = recover_trial(r, ap, xp);
      CHECK(m.value == doctest::Approx(mp.value).epsilon(1e-9));
      if (m.minimizer.uniqueness == Uniqueness::unique && mp.minimizer.uniqueness == Uniqueness::unique)
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(mp.minimizer.z_star[j] - m.minimizer.z_star[perm[j]]) <= 1e-7);
    }
  }
}

TEST_CASE("exact gNSP certificate implies recovery") {
  const auto a = example2_matrix();
  const auto r = PenaltySpec::lp(Rational(1, 2));
  const auto cert = gnsp_certify(r, nullspace_basis(a), 2);
  REQUIRE(cert.holds());
  REQUIRE(cert.method != Method::sampled);
  const Matrix ad = to_double(a);
  for (std::uint64_t t = 0; t < 200; ++t) {
    auto g = rng_for(2024, {t});
    const Vec x = random_sparse(5, 1 + t % 2, g, 0.1, 10.0);
    CHECK(recover_trial(r, ad, x).success);
  }
}

TEST_CASE("iNSP kernel: l1-l2 and sorted l1 recover non-equal-height x") {
  const Matrix a = to_double(equal_height_matrix());
  for (const auto& r : {PenaltySpec::l1_minus_l2(), PenaltySpec::sorted_l1({0, 0, 1, 1})}) {
    std::size_t ok = 0, tried = 0;
    for (std::uint64_t t = 0; tried < 200; ++t) {
      auto g = rng_for(5, {t});
      const Vec x = random_sparse(4, 2, g, 0.5, 2.0);
      if (is_equal_height(x)) continue;
      ++tried;
      ok += recover_trial(r, a, x).success;
    }
    CHECK(ok == 200);
    for (double c : {0.5, 1.0, 3.0}) {
      const auto rec = recover_trial(r, a, Vec{c, c, 0, 0});
      CHECK(rec.minimizer.uniqueness == Uniqueness::tied);
    }
  }
}

TEST_CASE("report JSON") {
  const auto rec = recover_trial(PenaltySpec::l1(), to_double(example2_matrix()), Vec{1, 1, 0, 0, 0});
  const auto j = rec.to_json();
  CHECK(j["schema_version"] == 1);
  CHECK(j["success"] == true);
  CHECK(j["minimizer"]["uniqueness"] == "unique");
  CHECK(j["minimizer"]["method"] == "breakpoint-scan");
}
