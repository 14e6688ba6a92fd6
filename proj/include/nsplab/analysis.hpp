#pragma once

#include "nsplab/penalties.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace nsplab {

/// True iff `lower` is majorized by `upper`: sorted partial sums of lower
/// never exceed those of upper and the totals agree (1e-12 relative in
/// float mode). Both vectors must be componentwise nonnegative.
bool majorizes(std::span<const double> upper, std::span<const double> lower);
bool majorizes(std::span<const Rational> upper, std::span<const Rational> lower);

/// One T-transform: coordinates j and k are replaced by
/// lambda*w_j + (1-lambda)*w_k and lambda*w_k + (1-lambda)*w_j.
struct TTransform {
  std::size_t j = 0;
  std::size_t k = 0;
  double lambda = 1.0;
};

Vec apply(const TTransform& t, std::span<const double> w);

struct TransformChain {
  std::vector<Vec> points;  // from, w1, ..., to (up to permutation)
  std::vector<TTransform> steps;
};

/// Chain of T-transforms taking `from` to a permutation of `to`
/// (requires to ≺ from). At most n-1 steps.
TransformChain t_transform_chain(std::span<const double> from, std::span<const double> to);

struct MajorizationPair {
  Vec lower;
  Vec upper;
  bool strict = false;  // lower is not a permutation of upper
};

/// Random upper in [0,10]^n, lower obtained by `steps` random T-transforms.
MajorizationPair random_majorization_pair(std::size_t n, std::size_t steps, std::uint64_t seed);

enum class Property { symmetry, concavity_on_u, increasing, subadditivity, schur_concavity, r1, r2 };

std::string_view to_string(Property p);
Property parse_property(std::string_view name);

/// A sampled instance of a property's defining inequality. `inputs` holds the
/// vectors involved, `params` the scalar data (lambda or a permutation).
/// margin > slack means the inequality is violated.
struct Witness {
  std::vector<Vec> inputs;
  std::vector<double> params;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

struct PropertyReport {
  std::string penalty;
  Property property = Property::symmetry;
  std::size_t dimension = 0;
  std::size_t sparsity = 0;  // R1/R2 only
  std::size_t trials = 0;
  std::size_t violation_count = 0;
  std::vector<Witness> violations;  // first kMaxStoredWitnesses, in trial order

  static constexpr std::size_t kMaxStoredWitnesses = 64;

  bool holds() const { return violation_count == 0; }
  std::string verdict() const { return holds() ? "holds-sampled" : "fails"; }
  nlohmann::json to_json() const;
};

inline constexpr double kViolationSlack = 1e-9;

/// Samples a structural property of R (symmetry, concavity on U, increasing,
/// subadditivity, Schur-concavity) on `trials` random instances in dimension
/// n, after a fixed batch of adversarial corner cases. R1/R2 delegate to
/// check_sparsity_condition with s = max(1, (n-1)/2).
PropertyReport check_structural(const PenaltySpec& r, Property property, std::size_t n,
                                std::size_t trials, std::uint64_t seed);

/// Probes (R1) or (R2) at sparsity s in dimension n (requires 1 <= s < n/2).
PropertyReport check_sparsity_condition(const PenaltySpec& r, Property cond, std::size_t s,
                                        std::size_t n, std::size_t trials, std::uint64_t seed);

/// Recomputes (lhs, rhs) of a stored witness from its inputs.
std::pair<double, double> replay(const PenaltySpec& r, Property property, const Witness& w);

}  // namespace nsplab
