#pragma once

#include "nsplab/penalties.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace nsplab {

enum class Uniqueness { unique, tied, unknown };

std::string_view to_string(Uniqueness u);

struct MinimizerOptions {
  std::optional<double> t_max;        // default 4 * (1 + ||x||_1)
  std::optional<std::size_t> grid;    // points per axis; default 401 (d = 2), 101 (d = 3); 0 disables
  std::optional<std::size_t> top_cells;  // default 32 (d = 2), 64 (d = 3)
  std::size_t levels = 3;
  double tol_zero = 1e-9;
  double tie_value_tol = 1e-9;
};

/// Global minimum of phi(t) = R(x + V t) over ||t||_inf <= t_max. On each
/// cell of the arrangement cut out by the hyperplanes (x + V t)_i = 0 (and
/// the magnitude ties |z_i| = |z_j| for order-dependent penalties) every
/// catalog penalty is concave, so the minimum sits at a vertex of that
/// arrangement intersected with the box. The vertices are enumerated; the
/// grid search only adds further candidates.
struct MinimizerReport {
  Vec t_star;
  Vec z_star;
  double value = 0.0;
  Uniqueness uniqueness = Uniqueness::unique;
  std::vector<Vec> tied;  // z of the other minimizing clusters
  double t_max = 0.0;
  std::size_t grid_resolution = 0;
  std::size_t refinement_steps = 0;
  std::size_t candidates = 0;
  std::string method;

  nlohmann::json to_json() const;
};

/// `k` should have orthonormal columns for t_max and the clustering radius
/// to mean what they say; recover_trial takes care of that.
MinimizerReport minimize_over_affine(const PenaltySpec& r, const KernelBasis& k, std::span<const double> x,
                                     const MinimizerOptions& opts = {});

struct TrialRecord {
  std::string penalty;
  Vec x;
  std::size_t s = 0;
  std::string matrix_id;
  bool success = false;
  double value = 0.0;
  double error = 0.0;  // ||z_star - x||_inf
  bool equal_height = false;
  MinimizerReport minimizer;

  nlohmann::json to_json() const;
};

/// success iff ||z_star - x||_inf <= 1e-6 (1 + ||x||_inf) and the minimizer
/// is not tied.
bool recovery_succeeded(std::span<const double> x, const MinimizerReport& m);

TrialRecord recover_trial(const PenaltySpec& r, const Matrix& a, std::span<const double> x,
                          const MinimizerOptions& opts = {}, std::string matrix_id = {});

/// Same, with a precomputed kernel basis (orthonormalized internally).
TrialRecord recover_trial(const PenaltySpec& r, const KernelBasis& k, std::span<const double> x,
                          const MinimizerOptions& opts = {}, std::string matrix_id = {});

}  // namespace nsplab
