// nsplab command-line front end.
#include "nsplab/analysis.hpp"
#include "nsplab/harness.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/recovery.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace nsplab;

namespace {

struct Globals {
  bool exact = false;
  bool json = false;
  std::uint64_t seed = 0;
};

int cmd_certify(const Globals& g, const std::string& matrix, std::size_t s, const std::string& condition,
                const std::string& support, const std::string& penalty) {
  const ExactMatrix a = read_matrix_file(matrix);
  SearchConfig cfg;
  cfg.seed = g.seed;
  std::string cond = condition;
  std::transform(cond.begin(), cond.end(), cond.begin(), [](unsigned char c) { return std::tolower(c); });

  CertificateReport rep;
  if (cond == "nsp" || cond == "insp") {
    const auto both = g.exact ? l1_margin(nullspace_basis(a), s, cfg) : l1_margin(nullspace_basis(to_double(a)), s, cfg);
    rep = cond == "nsp" ? both.nsp : both.insp;
  } else if (cond == "nsp-fs" || cond == "nsp_fs") {
    if (support.empty()) throw InputError("--condition nsp-fs needs --support");
    std::vector<std::size_t> idx;
    for (const auto& v : parse_vector(support)) {
      if (v < 1 || denominator(v) != 1) throw InputError("support indices are positive integers (1-based)");
      idx.push_back(numerator(v).convert_to<std::size_t>());
    }
    const auto S = SupportSet::from_one_based(idx, a.cols());
    rep = g.exact ? fixed_support_margin(nullspace_basis(a), S, cfg)
                  : fixed_support_margin(nullspace_basis(to_double(a)), S, cfg);
  } else if (cond == "gnsp") {
    if (penalty.empty()) throw InputError("--condition gnsp needs --penalty");
    const auto r = parse_penalty(penalty, s);
    rep = g.exact ? gnsp_certify(r, nullspace_basis(a), s, cfg) : gnsp_certify(r, nullspace_basis(to_double(a)), s, cfg);
  } else {
    throw InputError("unknown condition '" + condition + "'");
  }
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.holds() ? 0 : 1;
}

int cmd_recover(const Globals& g, const std::string& matrix, const std::string& x_text, const std::string& penalty,
                std::optional<double> tmax, std::optional<std::size_t> grid) {
  const ExactMatrix a = read_matrix_file(matrix);
  const Vec x = to_double(parse_vector(x_text));
  if (x.size() != a.cols()) throw InputError("x has length " + std::to_string(x.size()) + ", matrix has " +
                                             std::to_string(a.cols()) + " columns");
  const auto r = parse_penalty(penalty, std::max<std::size_t>(1, support_of(x).size()));
  MinimizerOptions opts;
  opts.t_max = tmax;
  opts.grid = grid;
  const KernelBasis k = g.exact ? to_double(nullspace_basis(a)) : nullspace_basis(to_double(a));
  const auto rec = recover_trial(r, k, x, opts, matrix);
  auto j = rec.minimizer.to_json();
  j["penalty"] = rec.penalty;
  j["x"] = rec.x;
  j["success"] = rec.success;
  j["error_inf"] = rec.error;
  j["equal_height"] = rec.equal_height;
  std::cout << j.dump(2) << "\n";
  return rec.success ? 0 : 1;
}

int cmd_properties(const Globals& g, const std::string& penalty, std::size_t trials, std::size_t n,
                   std::optional<std::size_t> s, const std::vector<std::string>& names) {
  const auto r = parse_penalty(penalty, s.value_or(std::max<std::size_t>(1, (n - 1) / 2)));
  const std::size_t dim = r.dimension().value_or(n);
  std::vector<Property> props;
  if (names.empty()) {
    props = {Property::symmetry, Property::concavity_on_u, Property::increasing, Property::subadditivity,
             Property::schur_concavity, Property::r1, Property::r2};
  } else {
    for (const auto& nm : names) props.push_back(parse_property(nm));
  }
  nlohmann::json all = nlohmann::json::array();
  for (auto p : props) {
    const auto rep = (p == Property::r1 || p == Property::r2) && s
                         ? check_sparsity_condition(r, p, *s, dim, trials, g.seed)
                         : check_structural(r, p, dim, trials, g.seed);
    if (g.json) {
      all.push_back(rep.to_json());
    } else {
      std::cout << std::left << std::setw(16) << std::string(to_string(p)) << rep.verdict() << "  ("
                << rep.violation_count << "/" << rep.trials << " violations)\n";
    }
  }
  if (g.json) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["penalty"] = r.to_string();
    j["reports"] = all;
    std::cout << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_reproduce(const Globals& g, const std::string& only, const std::string& ex2, std::size_t trials) {
  ReproduceOptions opts;
  opts.only = only;
  opts.seed = g.seed;
  opts.property_trials = trials;
  if (!ex2.empty()) opts.example2_matrix = read_matrix_file(ex2);
  const auto results = run_reproduce(opts);
  if (g.json) {
    std::cout << to_json(results).dump(2) << "\n";
  } else {
    std::cout << format_table(results);
  }
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; }) ? 0 : 1;
}

int cmd_phase(const Globals& g, const std::string& config_path, const std::string& csv, const std::string& json_out,
              const std::string& records) {
  auto cfg = load_config(config_path);
  if (g.exact) cfg.mode = ScalarMode::exact_rational();
  if (!csv.empty()) cfg.csv_path = csv;
  if (!json_out.empty()) cfg.json_path = json_out;
  if (!records.empty()) cfg.records_path = records;
  const auto result = run_phase(cfg);
  write_phase_outputs(result);
  if (g.json) {
    std::cout << result.summary().dump(2) << "\n";
  } else if (cfg.csv_path.empty()) {
    std::cout << result.csv();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null-space conditions and nonconvex sparse recovery at desk scale"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--exact-rational", g.exact, "Exact rational arithmetic where available");
  app.add_flag("--json", g.json, "JSON output");
  app.add_option("--seed", g.seed, "RNG seed");

  std::string matrix, condition = "nsp", support, penalty, x_text, only, ex2, config_path, csv, json_out, records;
  std::size_t s = 0, trials = 10000, n = 6;
  std::optional<std::size_t> s_opt, grid;
  std::optional<double> tmax;
  std::vector<std::string> property_names;

  auto* certify = app.add_subcommand("certify", "Check NSP, iNSP, NSP-fs or gNSP for a matrix");
  certify->add_option("--matrix", matrix, "Matrix file")->required();
  certify->add_option("--s", s, "Sparsity")->required();
  certify->add_option("--condition", condition, "nsp | insp | nsp-fs | gnsp");
  certify->add_option("--support", support, "Support for nsp-fs, 1-based, e.g. 1,2");
  certify->add_option("--penalty", penalty, "Penalty for gnsp, e.g. lp(p=1/2)");

  auto* recover = app.add_subcommand("recover", "Globally minimize R(z) subject to Az = Ax");
  recover->add_option("--matrix", matrix, "Matrix file")->required();
  recover->add_option("--x", x_text, "Signal, e.g. 1,1,0,0,0")->required();
  recover->add_option("--penalty", penalty, "Penalty spec")->required();
  recover->add_option("--tmax", tmax, "Search box half-width in kernel coordinates");
  recover->add_option("--grid", grid, "Grid points per axis for d >= 2 (0 disables)");

  auto* properties = app.add_subcommand("properties", "Sample structural properties of a penalty");
  properties->add_option("--penalty", penalty, "Penalty spec")->required();
  properties->add_option("--trials", trials, "Random instances per property");
  properties->add_option("--n", n, "Dimension (ignored when the penalty fixes it)");
  properties->add_option("--s", s_opt, "Sparsity for R1/R2");
  properties->add_option("--property", property_names, "Subset of properties to check");

  auto* reproduce = app.add_subcommand("reproduce", "Run the reference reproduction suite");
  reproduce->add_option("--only", only, "Case id or dotted prefix");
  reproduce->add_option("--example2-matrix", ex2, "Replace the example2 matrix");
  reproduce->add_option("--trials", trials, "Trials per property probe");

  auto* phase = app.add_subcommand("phase", "Phase-transition sweep over random instances");
  phase->add_option("--config", config_path, "key = value config file")->required();
  phase->add_option("--csv", csv, "CSV output path (overrides config)");
  phase->add_option("--json-out", json_out, "JSON summary path (overrides config)");
  phase->add_option("--records", records, "Per-trial JSON lines path");

  for (auto* sub : {certify, recover, properties, reproduce, phase}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*certify) return cmd_certify(g, matrix, s, condition, support, penalty);
    if (*recover) return cmd_recover(g, matrix, x_text, penalty, tmax, grid);
    if (*properties) return cmd_properties(g, penalty, trials, n, s_opt, property_names);
    if (*reproduce) return cmd_reproduce(g, only, ex2, trials);
    if (*phase) return cmd_phase(g, config_path, csv, json_out, records);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
