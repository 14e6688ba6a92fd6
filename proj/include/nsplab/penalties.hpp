#pragma once

#include "nsplab/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nsplab {

enum class Family {
  lp,
  scad,
  transformed_l1,
  capped_l1,
  l1_minus_l2,
  two_level_l1,
  sorted_l1,
  l1,
  weighted_l1,
};

std::string_view family_name(Family f);

/// Tri-state answer for "does this penalty satisfy condition X". Penalties
/// outside the recovery guarantees' hypotheses (non-symmetric, identically
/// zero) answer not_applicable.
enum class Applicability { yes, no, not_applicable };

std::string_view to_string(Applicability a);

struct PenaltyTraits {
  bool separable = false;
  bool symmetric = false;
  bool concave_on_u = false;
  bool identically_zero = false;
};

/// A penalty R(z) from the catalog together with its parameters. Immutable;
/// parameters are validated at construction and kept as exact rationals so
/// the piecewise-linear families can also be evaluated exactly.
class PenaltySpec {
 public:
  static PenaltySpec lp(Rational p);
  static PenaltySpec scad(Rational a1, Rational a2);
  static PenaltySpec transformed_l1(Rational a);
  static PenaltySpec capped_l1(Rational alpha);
  static PenaltySpec l1_minus_l2();
  static PenaltySpec two_level_l1(Rational rho, std::size_t level);
  static PenaltySpec sorted_l1(std::vector<Rational> beta);
  static PenaltySpec l1();
  static PenaltySpec weighted_l1(std::vector<Rational> weights);

  Family family() const { return family_; }

  /// Named scalar parameter ("p", "a1", "a2", "a", "alpha", "rho").
  const Rational& param(std::string_view key) const;
  double param_d(std::string_view key) const;
  std::size_t level() const { return level_; }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  const std::vector<double>& coefficients_d() const { return coeffs_d_; }

  /// Dimension fixed by the parameters (beta or weight length), if any.
  std::optional<std::size_t> dimension() const;

  PenaltyTraits traits() const;

  /// Degree q with R(c z) = |c|^q R(z), or nullopt for SCAD, capped and
  /// transformed l1.
  std::optional<double> homogeneity_degree() const;

  /// True when R is piecewise linear in |z| with pieces delimited by sign
  /// changes and magnitude ties only (l1, weighted, sorted, two-level).
  bool piecewise_linear_homogeneous() const;

  /// True when R depends on the magnitude ordering of z.
  bool order_dependent() const;

  /// True when R maps rationals to rationals (no roots or powers).
  bool rational_closed() const;

  /// Magnitudes at which a univariate term changes formula (SCAD a1/a2,
  /// capped alpha). Empty for the other families.
  std::vector<double> knots() const;

  /// Declared classification against the sparsity conditions R1/R2 for a
  /// given s (metadata; the analysis module probes them numerically).
  Applicability satisfies_r1(std::size_t s) const;
  Applicability satisfies_r2(std::size_t s) const;

  /// Canonical text form, e.g. "scad(a1=1,a2=37/10)".
  std::string to_string() const;

 private:
  PenaltySpec() = default;

  Family family_ = Family::l1;
  std::vector<std::pair<std::string, Rational>> params_;
  std::vector<double> params_d_;
  std::size_t level_ = 0;
  std::vector<Rational> coeffs_;
  std::vector<double> coeffs_d_;

  void add_param(std::string key, Rational value);
  void check_dimension(std::size_t n) const;

  friend double evaluate(const PenaltySpec&, std::span<const double>);
  friend Rational evaluate(const PenaltySpec&, std::span<const Rational>);
  friend double univariate_term(const PenaltySpec&, std::size_t, double);
};

/// R(z). Throws InputError on dimension mismatch.
double evaluate(const PenaltySpec& r, std::span<const double> z);

/// Exact R(z); throws ContractError for lp and l1-l2, which leave the
/// rationals.
Rational evaluate(const PenaltySpec& r, std::span<const Rational> z);

/// r_j(x) for separable families; ContractError otherwise.
double univariate_term(const PenaltySpec& r, std::size_t j, double x);

/// One spec per family with the default parameters for dimension N and
/// sparsity s (requires 1 <= s < N/2).
std::vector<PenaltySpec> default_catalog(std::size_t n, std::size_t s);

/// The seven nonconvex families of the catalog with default parameters.
std::vector<PenaltySpec> nonconvex_catalog(std::size_t n, std::size_t s);

/// Parses "family(key=value,...)"; case-insensitive, unknown keys rejected.
/// two_level_l1 accepts "level" (or "sj"); it defaults to `default_level`
/// when given and omitted.
PenaltySpec parse_penalty(std::string_view text, std::optional<std::size_t> default_level = {});

}  // namespace nsplab
