#pragma once

#include "nsplab/recovery.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace nsplab {

// Reference matrices.
ExactMatrix example2_matrix();      // 4x5, kernel span{(-1,-1,2/3,2/3,3/4)}
ExactMatrix fixed_support_matrix();      // 4x5, kernel span{(-1,-1,3/2,1/2,1/10)}
ExactMatrix equal_height_matrix();  // 3x4, kernel span{(1,1,-1,-1)}

/// Weights (4,3,1,...,1).
PenaltySpec example2_weighted(std::size_t n = 5);

/// Random s-sparse vector: uniform support, random signs, magnitudes uniform
/// in [lo, hi] (a single shared magnitude when equal_height is set).
Vec random_sparse(std::size_t n, std::size_t s, std::mt19937_64& g, double lo, double hi,
                  bool equal_height = false);

/// Standard Gaussian entries scaled by 1/sqrt(m).
Matrix gaussian_matrix(std::size_t m, std::size_t n, std::mt19937_64& g);

enum class Ensemble { gaussian, paper_matrix };

struct ExperimentConfig {
  std::size_t n = 12;
  std::size_t m = 10;
  std::vector<std::size_t> s_values{1};
  Ensemble ensemble = Ensemble::gaussian;
  std::string matrix_file;
  std::size_t trials = 100;
  std::vector<PenaltySpec> penalties;
  std::uint64_t seed = 1;
  std::string csv_path;
  std::string json_path;
  std::string records_path;  // per-trial JSON lines, optional
  ScalarMode mode;
  std::optional<std::size_t> grid;  // recovery grid per axis (default as in recovery)
  double equal_height_fraction = 0.2;
  double cell_budget_seconds = 60.0;
  bool record_timing = false;
  std::size_t threads = 1;

  /// Throws InputError on any violated constraint.
  void validate() const;
};

/// Flat "key = value" text, '#' comments. Lists are comma separated; the
/// penalty list splits only on commas outside parentheses. s accepts
/// "1..5" or a list.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct PhaseRow {
  std::string penalty;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t s = 0;
  std::size_t trials = 0;  // completed trials
  std::size_t successes = 0;
  std::size_t equal_height_trials = 0;
  std::size_t equal_height_successes = 0;
  double mean_runtime_ms = 0.0;
  bool partial = false;
};

struct PhaseResult {
  ExperimentConfig config;
  std::vector<PhaseRow> rows;
  std::vector<TrialRecord> records;  // filled when config.records_path is set or keep_records

  std::string csv() const;
  nlohmann::json summary() const;
};

PhaseResult run_phase(const ExperimentConfig& config, bool keep_records = false);

/// Writes csv/json/records to the paths named in the config (if any).
void write_phase_outputs(const PhaseResult& result);

struct ReproductionResult {
  std::string id;
  std::string description;
  std::string expected;
  std::string provenance;  // "paper", "derived" or "trivial"
  std::string observed;
  bool pass = false;

  nlohmann::json to_json() const;
};

struct ReproduceOptions {
  /// Exact case id, or a dotted prefix ("example2" selects example2.*).
  std::string only;
  std::optional<ExactMatrix> example2_matrix;
  std::uint64_t seed = 0;
  std::size_t property_trials = 10000;
};

std::vector<ReproductionResult> run_reproduce(const ReproduceOptions& opts = {});
std::vector<std::string> reproduction_case_ids();

std::string format_table(const std::vector<ReproductionResult>& results);
nlohmann::json to_json(const std::vector<ReproductionResult>& results);

}  // namespace nsplab
