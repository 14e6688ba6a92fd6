#include "nsplab/analysis.hpp"

#include <doctest.h>

#include <cmath>

using namespace nsplab;

namespace {

bool maj(const std::string& upper, const std::string& lower) {
  const auto u = parse_vector(upper), l = parse_vector(lower);
  return majorizes(std::span<const Rational>(u), std::span<const Rational>(l));
}

}  // namespace

TEST_CASE("majorization examples") {
  CHECK(maj("3/8,1/4,1/4,1/8,0,0", "1/4,1/4,1/4,1/4,0,0"));
  CHECK_FALSE(maj("1/2,1/2,0,0,0,0", "2/3,1/3,0,0,0,0"));
  CHECK(maj("2/3,1/3,0,0,0,0", "1/2,1/2,0,0,0,0"));
  CHECK(maj("1,2,3", "3,1,2"));
  CHECK(majorizes(Vec{0.3, 0.7}, Vec{0.5, 0.5}));
  CHECK_FALSE(majorizes(Vec{1, 0}, Vec{1, 1}));
  CHECK_THROWS_AS(majorizes(Vec{-1, 2}, Vec{0.5, 0.5}), InputError);
}

TEST_CASE("T-transform chains") {
  {
    const auto c = t_transform_chain(Vec{1, 0}, Vec{0.5, 0.5});
    REQUIRE(c.steps.size() == 1);
    CHECK(c.steps[0].lambda == doctest::Approx(0.5));
  }
  {
    const Vec from{1, 0, 0}, to{1.0 / 3, 1.0 / 3, 1.0 / 3};
    const auto c = t_transform_chain(from, to);
    CHECK(c.steps.size() <= 2);
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) CHECK(majorizes(c.points[i], c.points[i + 1]));
    CHECK(majorizes(c.points.back(), to));
    CHECK(majorizes(to, c.points.back()));
  }
  CHECK_THROWS_AS(t_transform_chain(Vec{1, 0}, Vec{1, 1}), InputError);
}

TEST_CASE("chains are monotone for every nonconvex catalog penalty") {
  const auto cat = nonconvex_catalog(6, 2);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto pair = random_majorization_pair(6, 5, seed);
    CHECK(majorizes(pair.upper, pair.lower));
    const auto c = t_transform_chain(pair.upper, pair.lower);
    CHECK(c.steps.size() <= 5);
    for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
      CHECK(majorizes(c.points[i], c.points[i + 1]));
      for (const auto& r : cat) CHECK(evaluate(r, c.points[i]) <= evaluate(r, c.points[i + 1]) + 1e-9);
    }
  }
}

TEST_CASE("random majorization pairs") {
  const auto a = random_majorization_pair(6, 4, 7), b = random_majorization_pair(6, 4, 7);
  CHECK(a.upper == b.upper);
  CHECK(a.lower == b.lower);
  const auto one = random_majorization_pair(1, 5, 3);
  CHECK(one.lower == one.upper);
  const auto none = random_majorization_pair(5, 0, 3);
  CHECK(none.lower == none.upper);
  CHECK_FALSE(none.strict);
}

TEST_CASE("l1-l2 is not subadditive") {
  const auto rep = check_structural(PenaltySpec::l1_minus_l2(), Property::subadditivity, 4, 2000, 1);
  REQUIRE_FALSE(rep.holds());
  const auto& w = rep.violations.front();
  CHECK(w.inputs[0] == Vec{1, 0, 0, 0});
  CHECK(w.inputs[1] == Vec{0, 1, 0, 0});
  CHECK(std::abs(w.margin - (2.0 - std::sqrt(2.0))) <= 1e-12);
}

TEST_CASE("weighted l1 fails symmetry with a swap(1,3) witness") {
  const auto r = PenaltySpec::weighted_l1({4, 3, 1, 1, 1});
  const auto rep = check_structural(r, Property::symmetry, 5, 1000, 2);
  REQUIRE_FALSE(rep.holds());
  bool found = false;
  for (const auto& w : rep.violations)
    if (w.params == std::vector<double>{2, 1, 0, 3, 4}) found = true;
  CHECK(found);
}

TEST_CASE("nonconvex families pass the structural probes") {
  for (const auto& r : nonconvex_catalog(6, 2)) {
    CAPTURE(r.to_string());
    for (auto p : {Property::symmetry, Property::concavity_on_u, Property::increasing, Property::schur_concavity})
      CHECK(check_structural(r, p, 6, 3000, 5).holds());
    if (r.traits().separable) CHECK(check_structural(r, Property::subadditivity, 6, 3000, 5).holds());
  }
  CHECK(check_structural(PenaltySpec::l1(), Property::subadditivity, 6, 1000, 5).holds());
}

TEST_CASE("identical seeds give identical reports; witnesses replay") {
  const auto r = PenaltySpec::weighted_l1({4, 3, 1, 1, 1});
  const auto a = check_structural(r, Property::symmetry, 5, 500, 9);
  const auto b = check_structural(r, Property::symmetry, 5, 500, 9);
  CHECK(a.to_json() == b.to_json());
  for (const auto& w : a.violations) {
    const auto [lhs, rhs] = replay(r, Property::symmetry, w);
    CHECK(lhs == w.lhs);
    CHECK(rhs == w.rhs);
    CHECK(std::abs(lhs - rhs) > kViolationSlack);
  }
}

TEST_CASE("sparsity conditions") {
  CHECK(check_sparsity_condition(PenaltySpec::l1_minus_l2(), Property::r2, 1, 4, 5000, 1).holds());
  CHECK(check_sparsity_condition(PenaltySpec::two_level_l1(Rational(1, 2), 2), Property::r1, 2, 6, 5000, 1).holds());
  CHECK(check_sparsity_condition(PenaltySpec::two_level_l1(0, 2), Property::r1, 2, 6, 5000, 1).holds());
  const auto sorted = PenaltySpec::sorted_l1({0, 0, 1, 1, 1});
  CHECK(check_sparsity_condition(sorted, Property::r1, 2, 5, 5000, 1).holds());
  CHECK(check_sparsity_condition(sorted, Property::r2, 2, 5, 5000, 1).holds());

  const auto tie = PenaltySpec::sorted_l1({1, 1, 1, 1});
  const auto rep = check_sparsity_condition(tie, Property::r2, 1, 4, 1000, 1);
  REQUIRE_FALSE(rep.holds());
  for (const auto& w : rep.violations) {
    const auto [lhs, rhs] = replay(tie, Property::r2, w);
    CHECK(lhs - rhs >= -kViolationSlack);
  }
  CHECK_THROWS_AS(check_sparsity_condition(tie, Property::r2, 2, 4, 10, 1), InputError);
  CHECK_THROWS_AS(check_sparsity_condition(tie, Property::r2, 0, 4, 10, 1), InputError);
  CHECK(check_sparsity_condition(PenaltySpec::l1(), Property::r1, 1, 4, 100, 1).holds());
  CHECK_FALSE(check_sparsity_condition(PenaltySpec::l1(), Property::r2, 1, 4, 100, 1).holds());
  CHECK(check_sparsity_condition(PenaltySpec::capped_l1(1), Property::r1, 1, 4, 100, 1).holds());
  CHECK_FALSE(check_sparsity_condition(PenaltySpec::capped_l1(1), Property::r2, 1, 4, 1000, 1).holds());
}

TEST_CASE("report JSON") {
  const auto rep = check_structural(PenaltySpec::l1_minus_l2(), Property::subadditivity, 3, 10, 1);
  const auto j = rep.to_json();
  CHECK(j["schema_version"] == 1);
  CHECK(j["verdict"] == "fails");
  CHECK(j["violations"].size() == rep.violations.size());
  CHECK(parse_property("schur_concavity") == Property::schur_concavity);
  CHECK_THROWS_AS(parse_property("convexity"), InputError);
}
