#include "nsplab/harness.hpp"

#include "nsplab/analysis.hpp"
#include "nsplab/nsp.hpp"
#include "nsplab/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <thread>

namespace nsplab {

namespace {

ExactMatrix rational_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<ExactVec> out;
  for (const auto& row : rows) {
    ExactVec r;
    for (const auto& v : row) r.push_back(parse_rational(v));
    out.push_back(std::move(r));
  }
  return ExactMatrix::from_rows(out);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

ExactMatrix example2_matrix() {
  return rational_rows({{"1", "1/2", "9/4", "0", "0"},
                        {"1", "-1/2", "0", "3/4", "0"},
                        {"0", "1", "0", "0", "4/3"},
                        {"1", "-1", "0", "0", "0"}});
}

ExactMatrix fixed_support_matrix() {
  return rational_rows({{"1", "0.5", "1", "0", "0"},
                        {"1", "-0.5", "0", "1", "0"},
                        {"0", "0.1", "0", "0", "1"},
                        {"1", "-1", "0", "0", "0"}});
}

ExactMatrix equal_height_matrix() {
  return rational_rows({{"1", "-1", "0", "0"}, {"0", "0", "1", "-1"}, {"1", "0", "1", "0"}});
}

PenaltySpec example2_weighted(std::size_t n) {
  if (n < 2) throw InputError("example2 weights need N >= 2");
  std::vector<Rational> w(n, Rational(1));
  w[0] = 4;
  w[1] = 3;
  return PenaltySpec::weighted_l1(std::move(w));
}

Vec random_sparse(std::size_t n, std::size_t s, std::mt19937_64& g, double lo, double hi, bool equal_height) {
  if (s > n) throw InputError("sparsity exceeds dimension");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), g);
  Vec x(n, 0.0);
  const double common = uniform(g, lo, hi);
  for (std::size_t k = 0; k < s; ++k) {
    const double mag = equal_height ? common : uniform(g, lo, hi);
    x[idx[k]] = uniform(g, 0.0, 1.0) < 0.5 ? -mag : mag;
  }
  return x;
}

Matrix gaussian_matrix(std::size_t m, std::size_t n, std::mt19937_64& g) {
  Matrix a(m, n);
  std::normal_distribution<double> normal;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = normal(g) * scale;
  return a;
}

// ---------------------------------------------------------------------------
// Experiment configuration

void ExperimentConfig::validate() const {
  if (n == 0) throw InputError("N must be positive");
  if (m >= n) throw InputError("m must be below N");
  const std::size_t d = n - m;
  if (d < 1 || d > 3) throw InputError("kernel dimension N - m must be 1, 2 or 3");
  if (s_values.empty()) throw InputError("s range is empty");
  for (auto s : s_values)
    if (s < 1 || 2 * s >= n) throw InputError("every s must satisfy 1 <= s < N/2 (got " + std::to_string(s) + ")");
  if (trials < 1) throw InputError("trials must be at least 1");
  if (penalties.empty()) throw InputError("penalty list is empty");
  for (const auto& p : penalties)
    if (auto pd = p.dimension(); pd && *pd != n)
      throw InputError(p.to_string() + " has dimension " + std::to_string(*pd) + ", N is " + std::to_string(n));
  if (ensemble == Ensemble::paper_matrix && matrix_file.empty())
    throw InputError("ensemble paper-matrix needs a matrix file");
  if (!(equal_height_fraction >= 0.0 && equal_height_fraction <= 1.0))
    throw InputError("equal_height_fraction must lie in [0,1]");
  if (!(cell_budget_seconds > 0.0)) throw InputError("budget must be positive");
  if (threads < 1) throw InputError("threads must be at least 1");
}

namespace {

std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  if (pos != v.size() || x < 0) throw InputError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return to_double(parse_rational(v));
  } catch (const InputError&) {
    throw InputError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "true" || l == "1" || l == "yes") return true;
  if (l == "false" || l == "0" || l == "no") return false;
  throw InputError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::size_t> parse_s_range(const std::string& v) {
  std::vector<std::size_t> out;
  for (const std::string sep : {"..", "-"}) {
    const auto p = v.find(sep);
    if (p != std::string::npos && p > 0) {
      const auto a = parse_count("s", trim(v.substr(0, p)));
      const auto b = parse_count("s", trim(v.substr(p + sep.size())));
      if (b < a) throw InputError("s range is decreasing");
      for (auto s = a; s <= b; ++s) out.push_back(s);
      return out;
    }
  }
  for (const auto& item : split_top_level(v)) out.push_back(parse_count("s", item));
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::optional<std::size_t> d;
  bool m_given = false;
  std::vector<std::string> penalty_items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n") {
      cfg.n = parse_count(key, value);
    } else if (key == "m") {
      cfg.m = parse_count(key, value);
      m_given = true;
    } else if (key == "d") {
      d = parse_count(key, value);
    } else if (key == "s") {
      cfg.s_values = parse_s_range(value);
    } else if (key == "ensemble") {
      const auto l = lower(value);
      if (l == "gaussian") cfg.ensemble = Ensemble::gaussian;
      else if (l == "paper-matrix" || l == "paper_matrix" || l == "matrix") cfg.ensemble = Ensemble::paper_matrix;
      else throw InputError("unknown ensemble '" + value + "'");
    } else if (key == "matrix") {
      cfg.matrix_file = value;
    } else if (key == "trials") {
      cfg.trials = parse_count(key, value);
    } else if (key == "penalties" || key == "penalty") {
      penalty_items = split_top_level(value);
    } else if (key == "seed") {
      cfg.seed = parse_count(key, value);
    } else if (key == "csv") {
      cfg.csv_path = value;
    } else if (key == "json") {
      cfg.json_path = value;
    } else if (key == "records") {
      cfg.records_path = value;
    } else if (key == "scalar_mode" || key == "mode") {
      const auto l = lower(value);
      if (l == "float" || l == "floating") cfg.mode = ScalarMode::floating_point();
      else if (l == "exact" || l == "rational") cfg.mode = ScalarMode::exact_rational();
      else throw InputError("unknown scalar mode '" + value + "'");
    } else if (key == "grid") {
      cfg.grid = parse_count(key, value);
    } else if (key == "equal_height_fraction") {
      cfg.equal_height_fraction = parse_real(key, value);
    } else if (key == "budget_seconds") {
      cfg.cell_budget_seconds = parse_real(key, value);
    } else if (key == "record_timing") {
      cfg.record_timing = parse_bool(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_count(key, value);
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  if (d) {
    if (m_given && cfg.m + *d != cfg.n) throw InputError("config gives both m and d inconsistently");
    if (*d >= cfg.n) throw InputError("d must be below N");
    cfg.m = cfg.n - *d;
  }
  // two_level_l1 without an explicit level takes the smallest s
  if (!cfg.s_values.empty())
    for (const auto& item : penalty_items)
      cfg.penalties.push_back(parse_penalty(item, *std::min_element(cfg.s_values.begin(), cfg.s_values.end())));
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  return parse_config(in);
}

// ---------------------------------------------------------------------------
// Phase sweep

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct TrialInstance {
  KernelBasis kernel;
  Vec x;
  bool equal_height = false;
};

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

PhaseResult run_phase(const ExperimentConfig& config, bool keep_records) {
  config.validate();
  PhaseResult result;
  result.config = config;
  keep_records = keep_records || !config.records_path.empty();

  const double tol = config.mode.is_exact() ? 1e-9 : config.mode.tol_zero;
  std::optional<KernelBasis> fixed_kernel;
  if (config.ensemble == Ensemble::paper_matrix) {
    const ExactMatrix a = read_matrix_file(config.matrix_file);
    if (a.rows() != config.m || a.cols() != config.n)
      throw InputError("matrix file is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                       ", config says " + std::to_string(config.m) + "x" + std::to_string(config.n));
    fixed_kernel = config.mode.is_exact() ? to_double(nullspace_basis(a))
                                          : nullspace_basis(to_double(a), tol);
    *fixed_kernel = orthonormalized(*fixed_kernel);
  }

  MinimizerOptions opts;
  opts.grid = config.grid;
  opts.tol_zero = tol;

  for (std::size_t s : config.s_values) {
    std::vector<TrialInstance> instances(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
      auto g = rng_for(config.seed, {s, t});
      TrialInstance inst;
      if (fixed_kernel) {
        inst.kernel = *fixed_kernel;
      } else {
        const Matrix a = gaussian_matrix(config.m, config.n, g);
        inst.kernel = orthonormalized(nullspace_basis(a, tol));
      }
      inst.equal_height = uniform(g, 0.0, 1.0) < config.equal_height_fraction;
      inst.x = random_sparse(config.n, s, g, 0.5, 2.0, inst.equal_height);
      instances[t] = std::move(inst);
    });

    for (const auto& base : config.penalties) {
      const PenaltySpec& r = base;
      std::vector<std::optional<TrialRecord>> recs(config.trials);
      std::vector<double> ms(config.trials, 0.0);
      std::atomic<bool> over_budget{false};
      const auto start = std::chrono::steady_clock::now();
      parallel_for(config.trials, config.threads, [&](std::size_t t) {
        if (over_budget) return;
        const auto t0 = std::chrono::steady_clock::now();
        recs[t] = recover_trial(r, instances[t].kernel, instances[t].x, opts,
                                "s" + std::to_string(s) + ".t" + std::to_string(t));
        const auto t1 = std::chrono::steady_clock::now();
        ms[t] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (std::chrono::duration<double>(t1 - start).count() > config.cell_budget_seconds) over_budget = true;
      });
      PhaseRow row;
      row.penalty = r.to_string();
      row.n = config.n;
      row.m = config.m;
      row.s = s;
      double total_ms = 0.0;
      for (std::size_t t = 0; t < config.trials; ++t) {
        if (!recs[t]) {
          row.partial = true;
          continue;
        }
        ++row.trials;
        total_ms += ms[t];
        if (recs[t]->success) ++row.successes;
        if (instances[t].equal_height) {
          ++row.equal_height_trials;
          if (recs[t]->success) ++row.equal_height_successes;
        }
        if (keep_records) result.records.push_back(std::move(*recs[t]));
      }
      row.mean_runtime_ms = row.trials ? total_ms / static_cast<double>(row.trials) : 0.0;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string PhaseResult::csv() const {
  std::ostringstream out;
  out << "penalty,N,m,s,trials,successes,equal_height_successes,mean_runtime_ms\n";
  for (const auto& r : rows) {
    out << csv_field(r.penalty) << ',' << r.n << ',' << r.m << ',' << r.s << ',' << r.trials << ','
        << r.successes << ',' << r.equal_height_successes << ',';
    if (config.record_timing) {
      out << std::fixed << std::setprecision(3) << r.mean_runtime_ms << std::defaultfloat;
    } else {
      out << "NA";
    }
    out << '\n';
  }
  for (const auto& r : rows)
    if (r.partial)
      out << "# partial: penalty=" << r.penalty << " s=" << r.s << " completed=" << r.trials << "/"
          << config.trials << " (cell budget exceeded)\n";
  return out.str();
}

nlohmann::json PhaseResult::summary() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json cfg;
  cfg["N"] = config.n;
  cfg["m"] = config.m;
  cfg["s"] = config.s_values;
  cfg["ensemble"] = config.ensemble == Ensemble::gaussian ? "gaussian" : "paper-matrix";
  if (!config.matrix_file.empty()) cfg["matrix"] = config.matrix_file;
  cfg["trials"] = config.trials;
  std::vector<std::string> pens;
  for (const auto& p : config.penalties) pens.push_back(p.to_string());
  cfg["penalties"] = pens;
  cfg["seed"] = config.seed;
  cfg["scalar_mode"] = config.mode.is_exact() ? "exact" : "float";
  cfg["equal_height_fraction"] = config.equal_height_fraction;
  if (config.grid) cfg["grid"] = *config.grid;
  j["config"] = cfg;
  nlohmann::json rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row;
    row["penalty"] = r.penalty;
    row["N"] = r.n;
    row["m"] = r.m;
    row["s"] = r.s;
    row["trials"] = r.trials;
    row["successes"] = r.successes;
    row["success_rate"] = r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0.0;
    row["equal_height_trials"] = r.equal_height_trials;
    row["equal_height_successes"] = r.equal_height_successes;
    if (config.record_timing) row["mean_runtime_ms"] = r.mean_runtime_ms;
    row["partial"] = r.partial;
    rows_j.push_back(row);
  }
  j["cells"] = rows_j;
  return j;
}

void write_phase_outputs(const PhaseResult& result) {
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
  };
  if (!result.config.csv_path.empty()) write(result.config.csv_path, result.csv());
  if (!result.config.json_path.empty()) write(result.config.json_path, result.summary().dump(2) + "\n");
  if (!result.config.records_path.empty()) {
    std::string text;
    for (const auto& r : result.records) text += r.to_json().dump() + "\n";
    write(result.config.records_path, text);
  }
}

// ---------------------------------------------------------------------------
// Reproduction suite

nlohmann::json ReproductionResult::to_json() const {
  return {{"id", id},           {"description", description}, {"expected", expected},
          {"provenance", provenance}, {"observed", observed},   {"pass", pass}};
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

std::string fmt(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + ")";
}

std::string fmt(const ExactVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s + ")";
}

double dist_inf(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool proportional(const ExactVec& a, const ExactVec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i] * b[j] != a[j] * b[i]) return false;
  return std::any_of(a.begin(), a.end(), [](const Rational& r) { return r != 0; });
}

// Scales v so that its first nonzero entry equals `lead`.
ExactVec scaled_to(const ExactVec& v, const Rational& lead) {
  ExactVec out(v);
  for (const auto& x : v)
    if (x != 0) {
      const Rational f = lead / x;
      for (auto& y : out) y *= f;
      break;
    }
  return out;
}

struct Context {
  ExactMatrix ex2;
  ExactMatrix fixed;
  ExactMatrix eqh;
  std::uint64_t seed;
  std::size_t property_trials;
};

struct Case {
  std::string id;
  std::string description;
  std::string provenance;
  std::string expected;
  std::function<std::pair<bool, std::string>(const Context&)> run;
};

ExactVec expected_kernel_ex2() { return parse_vector("-1,-1,2/3,2/3,3/4"); }

std::vector<Case> build_cases() {
  std::vector<Case> cases;

  cases.push_back({"example2.kernel", "kernel of the 4x5 example2 matrix", "paper",
                   "dim 1, span{(-1,-1,2/3,2/3,3/4)}", [](const Context& c) {
                     const auto k = nullspace_basis(c.ex2);
                     if (k.dim() != 1) return std::pair{false, "dim " + std::to_string(k.dim())};
                     const auto v = scaled_to(k.columns[0], Rational(-1));
                     return std::pair{proportional(v, expected_kernel_ex2()), "dim 1, span{" + fmt(v) + "}"};
                   }});

  cases.push_back({"example2.kernel_support", "support of the example2 kernel vector", "paper", "{1,2,3,4,5}",
                   [](const Context& c) {
                     const auto k = nullspace_basis(c.ex2);
                     if (k.dim() != 1) return std::pair{false, std::string("kernel not one-dimensional")};
                     const auto sup = support_of(std::span<const Rational>(k.columns[0]));
                     return std::pair{sup == SupportSet::full(5), sup.to_string()};
                   }});

  cases.push_back({"example2.nsp_margin", "NSP margin at s=2 on the example2 kernel", "derived",
                   "margin -1/12 (exact), NSP holds-strict; float margin within 1e-9", [](const Context& c) {
                     const auto exact = l1_margin(nullspace_basis(c.ex2), 2);
                     const auto flt = l1_margin(nullspace_basis(to_double(c.ex2)), 2);
                     const Rational em = exact.nsp.exact_margin.value_or(Rational(999));
                     const bool ok = em == Rational(-1, 12) && exact.nsp.status == Status::holds_strict &&
                                     std::abs(flt.nsp.margin + 1.0 / 12.0) <= 1e-9;
                     return std::pair{ok, "margin " + to_string(em) + ", NSP " +
                                              std::string(to_string(exact.nsp.status)) + "; float margin " +
                                              fmt(flt.nsp.margin)};
                   }});

  cases.push_back({"example2.nsp_fs", "fixed-support margin for S={1,2} on the example2 kernel", "derived",
                   "margin -1/12, holds-strict", [](const Context& c) {
                     const auto rep = fixed_support_margin(nullspace_basis(c.ex2), SupportSet::from_one_based({1, 2}, 5));
                     const Rational em = rep.exact_margin.value_or(Rational(999));
                     return std::pair{em == Rational(-1, 12) && rep.status == Status::holds_strict,
                                      "margin " + to_string(em) + ", " + std::string(to_string(rep.status))};
                   }});

  cases.push_back({"example2.weighted_value", "weighted l1 (4,3,1,1,1) at (0,0,2/3,2/3,3/4)", "paper", "25/12",
                   [](const Context&) {
                     const ExactVec z = parse_vector("0,0,2/3,2/3,3/4");
                     const Rational v = evaluate(example2_weighted(5), std::span<const Rational>(z));
                     return std::pair{v == Rational(25, 12), to_string(v)};
                   }});

  cases.push_back({"example2.weighted_symmetry", "symmetry probe of the example2 weighted l1", "paper",
                   "fails; witness swapping coordinates 1 and 3", [](const Context& c) {
                     const auto rep = check_structural(example2_weighted(5), Property::symmetry, 5,
                                                       c.property_trials, c.seed);
                     bool found = false;
                     for (const auto& w : rep.violations) {
                       auto perm = w.params;
                       if (perm.size() == 5 && perm[0] == 2 && perm[2] == 0 && perm[1] == 1 && perm[3] == 3 &&
                           perm[4] == 4 && std::abs(replay(example2_weighted(5), Property::symmetry, w).first -
                                                    w.lhs) <= 1e-12)
                         found = true;
                     }
                     return std::pair{!rep.holds() && found, rep.verdict() + ", " + std::to_string(rep.violation_count) +
                                                                 " violations, swap(1,3) witness " +
                                                                 (found ? "present" : "absent")};
                   }});

  cases.push_back({"example2.weighted_gnsp", "gNSP for the example2 weighted l1 at s=2", "paper",
                   "fails; S={1,2}, R(v_S)=7 > R(v_Sc)=25/12", [](const Context& c) {
                     const auto r = example2_weighted(5);
                     const auto rep = gnsp_certify(r, nullspace_basis(c.ex2), 2);
                     if (!rep.witness || !rep.witness->v_exact) return std::pair{false, std::string("no exact witness")};
                     const auto& v = *rep.witness->v_exact;
                     const auto& S = rep.witness->support;
                     const auto vs = restrict_to<Rational>(v, S);
                     const auto vc = restrict_to<Rational>(v, S.complement());
                     const Rational lhs = evaluate(r, std::span<const Rational>(vs));
                     const Rational rhs = evaluate(r, std::span<const Rational>(vc));
                     const bool ok = rep.status == Status::fails && S == SupportSet::from_one_based({1, 2}, 5) &&
                                     lhs == 7 && rhs == Rational(25, 12);
                     return std::pair{ok, std::string(to_string(rep.status)) + "; S=" + S.to_string() +
                                              ", R(v_S)=" + to_string(lhs) + ", R(v_Sc)=" + to_string(rhs)};
                   }});

  cases.push_back({"example2.weighted_recovery", "weighted l1 recovery of x=(1,1,0,0,0) on the example2 matrix", "paper",
                   "z*=(0,0,2/3,2/3,3/4) within 1e-6, value 25/12, success=false", [](const Context& c) {
                     const Vec x{1, 1, 0, 0, 0};
                     const auto rec = recover_trial(example2_weighted(5), to_double(c.ex2), x, {}, "example2");
                     const Vec want{0, 0, 2.0 / 3, 2.0 / 3, 0.75};
                     const bool ok = dist_inf(rec.minimizer.z_star, want) <= 1e-6 &&
                                     std::abs(rec.value - 25.0 / 12) <= 1e-9 && !rec.success;
                     return std::pair{ok, "z*=" + fmt(rec.minimizer.z_star) + ", value " + fmt(rec.value) +
                                              ", success=" + (rec.success ? "true" : "false")};
                   }});

  cases.push_back({"example2.l1_recovery", "l1 recovery of x=(1,1,0,0,0) on the example2 matrix", "paper",
                   "z*=x, unique", [](const Context& c) {
                     const Vec x{1, 1, 0, 0, 0};
                     const auto rec = recover_trial(PenaltySpec::l1(), to_double(c.ex2), x, {}, "example2");
                     const bool ok = rec.success && rec.minimizer.uniqueness == Uniqueness::unique;
                     return std::pair{ok, "z*=" + fmt(rec.minimizer.z_star) + ", " +
                                              std::string(to_string(rec.minimizer.uniqueness))};
                   }});

  cases.push_back({"example2.l1_random", "l1 recovery of 100 random 2-sparse x on the example2 matrix", "derived",
                   "100/100 within 1e-6", [](const Context& c) {
                     const Matrix a = to_double(c.ex2);
                     std::size_t ok = 0;
                     for (std::size_t t = 0; t < 100; ++t) {
                       auto g = rng_for(c.seed, {0xe2ULL, t});
                       const Vec x = random_sparse(5, 2, g, 0.1, 10.0);
                       if (recover_trial(PenaltySpec::l1(), a, x).success) ++ok;
                     }
                     return std::pair{ok == 100, std::to_string(ok) + "/100"};
                   }});

  cases.push_back({"example2.lp_gnsp", "gNSP for lp (p=1/2) at s=2 on the example2 matrix", "derived",
                   "holds-strict (exact-dim1)", [](const Context& c) {
                     const auto rep = gnsp_certify(PenaltySpec::lp(Rational(1, 2)), nullspace_basis(c.ex2), 2);
                     return std::pair{rep.status == Status::holds_strict && rep.method == Method::exact_dim1,
                                      std::string(to_string(rep.status)) + " (" + std::string(to_string(rep.method)) +
                                          "), margin " + fmt(rep.margin)};
                   }});

  cases.push_back({"example2.capped_gnsp", "gNSP for capped l1 (alpha=1) at s=2 on the example2 matrix", "derived",
                   "holds-strict (sampled)", [](const Context& c) {
                     const auto rep = gnsp_certify(PenaltySpec::capped_l1(1), nullspace_basis(c.ex2), 2);
                     return std::pair{rep.status == Status::holds_strict && rep.method == Method::sampled,
                                      std::string(to_string(rep.status)) + " (" + std::string(to_string(rep.method)) +
                                          "), margin " + fmt(rep.margin)};
                   }});

  cases.push_back({"fixed_support.nsp_fs", "fixed-support margin for S={1,2} on the fixed-support counterexample matrix", "paper",
                   "margin -1/15, holds-strict", [](const Context& c) {
                     const auto rep =
                         fixed_support_margin(nullspace_basis(c.fixed), SupportSet::from_one_based({1, 2}, 5));
                     const Rational em = rep.exact_margin.value_or(Rational(999));
                     return std::pair{em == Rational(-1, 15) && rep.status == Status::holds_strict,
                                      "margin " + to_string(em) + ", " + std::string(to_string(rep.status))};
                   }});

  cases.push_back({"fixed_support.nsp_margin", "NSP margin at s=2 on the fixed-support counterexample matrix", "derived",
                   "margin 3/5, fails with S={1,3}", [](const Context& c) {
                     const auto rep = l1_margin(nullspace_basis(c.fixed), 2).nsp;
                     const Rational em = rep.exact_margin.value_or(Rational(999));
                     const std::string s = rep.witness ? rep.witness->support.to_string() : "none";
                     return std::pair{em == Rational(3, 5) && rep.status == Status::fails && s == "{1,3}",
                                      "margin " + to_string(em) + ", " + std::string(to_string(rep.status)) +
                                          " with S=" + s};
                   }});

  cases.push_back({"fixed_support.l1_minus_l2_recovery", "l1-l2 recovery of x=(1,1,0,0,0) on the fixed-support counterexample matrix",
                   "paper", "z*=(0,0,3/2,1/2,1/10), value 2.1-sqrt(2.51) < 2-sqrt(2)", [](const Context& c) {
                     const Vec x{1, 1, 0, 0, 0};
                     const auto rec = recover_trial(PenaltySpec::l1_minus_l2(), to_double(c.fixed), x, {}, "fixed_support");
                     const Vec want{0, 0, 1.5, 0.5, 0.1};
                     const double v = 2.1 - std::sqrt(2.51);
                     const bool ok = dist_inf(rec.minimizer.z_star, want) <= 1e-6 && std::abs(rec.value - v) <= 1e-9 &&
                                     rec.value < 2.0 - std::sqrt(2.0) &&
                                     rec.minimizer.uniqueness == Uniqueness::unique;
                     return std::pair{ok, "z*=" + fmt(rec.minimizer.z_star) + ", value " + fmt(rec.value) + ", " +
                                              std::string(to_string(rec.minimizer.uniqueness))};
                   }});

  cases.push_back({"l1_minus_l2.l1_minus_l2_value", "l1-l2 at (1,1)", "paper", "2-sqrt(2)", [](const Context&) {
                     const double v = evaluate(PenaltySpec::l1_minus_l2(), Vec{1, 1});
                     return std::pair{std::abs(v - (2.0 - std::sqrt(2.0))) <= 1e-12, fmt(v)};
                   }});

  cases.push_back({"l1_minus_l2.subadditivity", "subadditivity probe of l1-l2", "paper",
                   "fails; witness e1,e2 with R(e1+e2)=2-sqrt(2) > 0", [](const Context& c) {
                     const auto rep = check_structural(PenaltySpec::l1_minus_l2(), Property::subadditivity, 5,
                                                       c.property_trials, c.seed);
                     if (rep.violations.empty()) return std::pair{false, std::string("holds-sampled")};
                     const auto& w = rep.violations.front();
                     const bool e12 = w.inputs.size() == 2 && w.inputs[0] == Vec{1, 0, 0, 0, 0} &&
                                      w.inputs[1] == Vec{0, 1, 0, 0, 0};
                     const bool ok = e12 && std::abs(w.margin - (2.0 - std::sqrt(2.0))) <= 1e-12;
                     return std::pair{ok, rep.verdict() + "; first witness " + fmt(w.inputs[0]) + "," +
                                              fmt(w.inputs[1]) + " margin " + fmt(w.margin)};
                   }});

  cases.push_back({"majorization.example", "(1/4,1/4,1/4,1/4,0,0) is majorized by (3/8,1/4,1/4,1/8,0,0)", "paper",
                   "true", [](const Context&) {
                     const auto up = parse_vector("3/8,1/4,1/4,1/8,0,0");
                     const auto lo = parse_vector("1/4,1/4,1/4,1/4,0,0");
                     const bool v = majorizes(std::span<const Rational>(up), std::span<const Rational>(lo));
                     return std::pair{v, std::string(v ? "true" : "false")};
                   }});

  cases.push_back({"majorization.reversed", "(2/3,1/3,0,0,0,0) is not majorized by (1/2,1/2,0,0,0,0)", "paper",
                   "false", [](const Context&) {
                     const auto up = parse_vector("1/2,1/2,0,0,0,0");
                     const auto lo = parse_vector("2/3,1/3,0,0,0,0");
                     const bool v = majorizes(std::span<const Rational>(up), std::span<const Rational>(lo));
                     return std::pair{!v, std::string(v ? "true" : "false")};
                   }});

  auto structural = [](std::string id, Property p, bool separable_only, std::string desc) {
    return Case{std::move(id), std::move(desc), "paper", "holds-sampled for every family, 0 violations",
                [p, separable_only](const Context& c) {
                  std::size_t bad = 0, checked = 0;
                  std::string failing;
                  for (const auto& r : nonconvex_catalog(6, 2)) {
                    if (separable_only && !r.traits().separable) continue;
                    ++checked;
                    const auto rep = check_structural(r, p, 6, c.property_trials, c.seed);
                    if (!rep.holds()) {
                      ++bad;
                      failing += " " + r.to_string();
                    }
                  }
                  return std::pair{bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) +
                                                 " families hold" + (bad ? ";" + failing : "")};
                }};
  };
  cases.push_back(structural("structural.symmetry", Property::symmetry, false, "symmetry of the nonconvex catalog"));
  cases.push_back(structural("structural.concavity", Property::concavity_on_u, false, "concavity on U of the nonconvex catalog"));
  cases.push_back(structural("structural.increasing", Property::increasing, false, "monotonicity on U of the nonconvex catalog"));
  cases.push_back(structural("structural.schur_concavity", Property::schur_concavity, false,
                        "Schur-concavity of the nonconvex catalog"));
  cases.push_back(structural("structural.subadditivity", Property::subadditivity, true,
                        "subadditivity of the separable families"));

  auto condition_case = [](std::string id, std::string desc, std::string prov, PenaltySpec r, Property cond,
                           std::size_t s, std::size_t n, bool expect_hold) {
    return Case{std::move(id), std::move(desc), std::move(prov),
                expect_hold ? "holds-sampled" : "fails with a replayable witness",
                [r, cond, s, n, expect_hold](const Context& c) {
                  const auto rep = check_sparsity_condition(r, cond, s, n, c.property_trials, c.seed);
                  if (expect_hold) return std::pair{rep.holds(), rep.verdict()};
                  bool replays = !rep.violations.empty();
                  for (const auto& w : rep.violations) {
                    const auto [l, rr] = replay(r, cond, w);
                    replays = replays && std::abs(l - w.lhs) <= 1e-12 && std::abs(rr - w.rhs) <= 1e-12;
                  }
                  return std::pair{!rep.holds() && replays,
                                   rep.verdict() + ", " + std::to_string(rep.violation_count) +
                                       " violations, witnesses " + (replays ? "replay" : "do not replay")};
                }};
  };
  cases.push_back(condition_case("sparsity.l1_minus_l2_r2", "R2 for l1-l2 at s=1, N=4", "paper",
                                 PenaltySpec::l1_minus_l2(), Property::r2, 1, 4, true));
  cases.push_back({"sparsity.l1_minus_l2_spot", "l1-l2 at (1,1,0,0) against (2,0,0,0)", "derived",
                   "2-sqrt(2) > 0", [](const Context&) {
                     const auto r = PenaltySpec::l1_minus_l2();
                     const double a = evaluate(r, Vec{1, 1, 0, 0}), b = evaluate(r, Vec{2, 0, 0, 0});
                     return std::pair{std::abs(a - (2.0 - std::sqrt(2.0))) <= 1e-12 && b == 0.0 && a > b,
                                      fmt(a) + " > " + fmt(b)};
                   }});
  cases.push_back(condition_case("sparsity.two_level_r1", "R1 for two-level l1 (rho=1/2, level=s) at s=2, N=6",
                                 "paper", PenaltySpec::two_level_l1(Rational(1, 2), 2), Property::r1, 2, 6, true));
  cases.push_back(condition_case("sparsity.sorted_r1", "R1 for sorted l1 beta=(0,0,1,1,1,1) at s=2", "derived",
                                 PenaltySpec::sorted_l1(parse_vector("0,0,1,1,1,1")), Property::r1, 2, 6, true));
  cases.push_back(condition_case("sparsity.sorted_r2", "R2 for sorted l1 beta=(0,0,1,1,1,1) at s=2", "derived",
                                 PenaltySpec::sorted_l1(parse_vector("0,0,1,1,1,1")), Property::r2, 2, 6, true));
  cases.push_back(condition_case("sparsity.sorted_r2_tie", "R2 for sorted l1 beta=(1,1,1,1) at s=1", "derived",
                                 PenaltySpec::sorted_l1(parse_vector("1,1,1,1")), Property::r2, 1, 4, false));

  cases.push_back({"equal_height.flag", "(1,1,0,0) is equal-height", "paper", "true", [](const Context&) {
                     const bool v = is_equal_height(Vec{1, 1, 0, 0});
                     return std::pair{v, std::string(v ? "true" : "false")};
                   }});

  cases.push_back({"equal_height.certificates", "NSP and iNSP at s=2 for kernel span{(1,1,-1,-1)}", "trivial",
                   "margin 0; iNSP holds-nonstrict, NSP fails", [](const Context& c) {
                     const auto rep = l1_margin(nullspace_basis(c.eqh), 2);
                     const Rational em = rep.nsp.exact_margin.value_or(Rational(999));
                     const bool ok = em == 0 && rep.insp.status == Status::holds_nonstrict &&
                                     rep.nsp.status == Status::fails;
                     return std::pair{ok, "margin " + to_string(em) + "; iNSP " +
                                              std::string(to_string(rep.insp.status)) + ", NSP " +
                                              std::string(to_string(rep.nsp.status))};
                   }});

  cases.push_back({"equal_height.tied", "l1-l2 recovery of x=(1,1,0,0) on the equal-height matrix", "derived",
                   "tied: x and (0,0,1,1), value 2-sqrt(2), success=false", [](const Context& c) {
                     const Vec x{1, 1, 0, 0};
                     const auto rec = recover_trial(PenaltySpec::l1_minus_l2(), to_double(c.eqh), x);
                     const auto& m = rec.minimizer;
                     std::vector<Vec> pts{m.z_star};
                     pts.insert(pts.end(), m.tied.begin(), m.tied.end());
                     auto has = [&](const Vec& p) {
                       return std::any_of(pts.begin(), pts.end(), [&](const Vec& q) {
                         double d = 0.0;
                         for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(std::abs(q[i]) - p[i]));
                         return d <= 1e-6;
                       });
                     };
                     const bool ok = m.uniqueness == Uniqueness::tied && has(Vec{1, 1, 0, 0}) && has(Vec{0, 0, 1, 1}) &&
                                     std::abs(m.value - (2.0 - std::sqrt(2.0))) <= 1e-9 && !rec.success &&
                                     rec.equal_height;
                     return std::pair{ok, std::string(to_string(m.uniqueness)) + " with " +
                                              std::to_string(pts.size()) + " clusters, value " + fmt(m.value) +
                                              ", success=" + (rec.success ? "true" : "false")};
                   }});

  cases.push_back({"equal_height.success", "l1-l2 recovery of x=(2,1,0,0) on the equal-height matrix", "derived",
                   "success=true", [](const Context& c) {
                     const Vec x{2, 1, 0, 0};
                     const auto rec = recover_trial(PenaltySpec::l1_minus_l2(), to_double(c.eqh), x);
                     return std::pair{rec.success, "z*=" + fmt(rec.minimizer.z_star) + ", " +
                                                       std::string(to_string(rec.minimizer.uniqueness))};
                   }});

  return cases;
}

bool selected(const std::string& id, const std::string& only, const std::vector<Case>& all) {
  if (only.empty()) return true;
  const bool exact_exists = std::any_of(all.begin(), all.end(), [&](const Case& c) { return c.id == only; });
  if (exact_exists) return id == only;
  return id.size() > only.size() && id.compare(0, only.size(), only) == 0 && id[only.size()] == '.';
}

}  // namespace

std::vector<std::string> reproduction_case_ids() {
  std::vector<std::string> ids;
  for (const auto& c : build_cases()) ids.push_back(c.id);
  return ids;
}

std::vector<ReproductionResult> run_reproduce(const ReproduceOptions& opts) {
  const Context ctx{opts.example2_matrix.value_or(example2_matrix()), fixed_support_matrix(), equal_height_matrix(),
                    opts.seed, opts.property_trials};
  const auto cases = build_cases();
  if (!opts.only.empty() &&
      std::none_of(cases.begin(), cases.end(), [&](const Case& c) { return selected(c.id, opts.only, cases); }))
    throw InputError("no reproduction case matches '" + opts.only + "'");
  std::vector<ReproductionResult> out;
  for (const auto& c : cases) {
    if (!selected(c.id, opts.only, cases)) continue;
    ReproductionResult r{c.id, c.description, c.expected, c.provenance, {}, false};
    try {
      auto [pass, observed] = c.run(ctx);
      r.pass = pass;
      r.observed = std::move(observed);
    } catch (const std::exception& e) {
      r.pass = false;
      r.observed = std::string("error: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_table(const std::vector<ReproductionResult>& results) {
  std::size_t w = 4;
  for (const auto& r : results) w = std::max(w, r.id.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w)) << "case" << "  pass  expected | observed\n";
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.pass;
    out << std::left << std::setw(static_cast<int>(w)) << r.id << "  " << (r.pass ? "PASS" : "FAIL") << "  "
        << r.expected << " [" << r.provenance << "] | " << r.observed << "\n";
  }
  out << passed << "/" << results.size() << " cases pass\n";
  return out.str();
}

nlohmann::json to_json(const std::vector<ReproductionResult>& results) {
  nlohmann::json j;
  j["schema_version"] = 1;
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    arr.push_back(r.to_json());
    all = all && r.pass;
  }
  j["cases"] = arr;
  j["all_pass"] = all;
  return j;
}

}  // namespace nsplab
