#include "nsplab/analysis.hpp"

#include "nsplab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsplab {

namespace {

template <class T>
void require_nonnegative(std::span<const T> v) {
  for (const auto& x : v)
    if (x < 0) throw InputError("majorization is defined on the nonnegative orthant only");
}

template <class T>
std::vector<T> sorted_desc(std::span<const T> v) {
  std::vector<T> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), [](const T& a, const T& b) { return a > b; });
  return out;
}

}  // namespace

bool majorizes(std::span<const double> upper, std::span<const double> lower) {
  if (upper.size() != lower.size()) throw InputError("majorizes: length mismatch");
  require_nonnegative(upper);
  require_nonnegative(lower);
  const auto u = sorted_desc(upper);
  const auto l = sorted_desc(lower);
  const double total_u = std::accumulate(u.begin(), u.end(), 0.0);
  const double total_l = std::accumulate(l.begin(), l.end(), 0.0);
  const double tol = 1e-12 * std::max(total_u, total_l);
  double su = 0.0, sl = 0.0;
  for (std::size_t n = 0; n + 1 < u.size(); ++n) {
    su += u[n];
    sl += l[n];
    if (sl > su + tol) return false;
  }
  return std::abs(total_u - total_l) <= tol;
}

bool majorizes(std::span<const Rational> upper, std::span<const Rational> lower) {
  if (upper.size() != lower.size()) throw InputError("majorizes: length mismatch");
  require_nonnegative(upper);
  require_nonnegative(lower);
  const auto u = sorted_desc(upper);
  const auto l = sorted_desc(lower);
  Rational su = 0, sl = 0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    su += u[n];
    sl += l[n];
    if (n + 1 < u.size() && sl > su) return false;
  }
  return su == sl;
}

Vec apply(const TTransform& t, std::span<const double> w) {
  Vec out(w.begin(), w.end());
  const double wj = w[t.j], wk = w[t.k];
  out[t.j] = t.lambda * wj + (1.0 - t.lambda) * wk;
  out[t.k] = t.lambda * wk + (1.0 - t.lambda) * wj;
  return out;
}

TransformChain t_transform_chain(std::span<const double> from, std::span<const double> to) {
  if (!majorizes(from, to)) throw InputError("t_transform_chain: target is not majorized by source");
  const std::size_t n = from.size();
  // Work in the sorted frame of `from`; position p lives at coordinate order[p].
  const auto order = magnitude_order(from);
  const auto target = sorted_desc(to);
  Vec x(n);
  for (std::size_t p = 0; p < n; ++p) x[p] = from[order[p]];
  const double scale = std::max(1.0, *std::max_element(from.begin(), from.end()));
  const double eq_tol = 1e-12 * scale;

  TransformChain chain;
  Vec current(from.begin(), from.end());
  chain.points.push_back(current);
  for (std::size_t guard = 0; guard < n; ++guard) {
    for (std::size_t p = 0; p < n; ++p)
      if (std::abs(x[p] - target[p]) <= eq_tol) x[p] = target[p];
    std::size_t l = n;
    for (std::size_t p = 0; p < n; ++p)
      if (x[p] < target[p]) {
        l = p;
        break;
      }
    if (l == n) break;
    std::size_t j = l;
    while (j > 0 && !(x[j - 1] > target[j - 1])) --j;
    if (j == 0) throw ContractError("t_transform_chain: lost majorization");  // unreachable
    --j;
    const double delta = std::min(x[j] - target[j], target[l] - x[l]);
    TTransform t{order[j], order[l], 1.0 - delta / (x[j] - x[l])};
    x[j] -= delta;
    x[l] += delta;
    current = nsplab::apply(t, current);
    current[order[j]] = x[j];
    current[order[l]] = x[l];
    chain.steps.push_back(t);
    chain.points.push_back(current);
  }
  // Snap the final point onto the target values.
  for (std::size_t p = 0; p < n; ++p) chain.points.back()[order[p]] = target[p];
  return chain;
}

namespace {

void random_t_transforms(Vec& w, std::size_t steps, std::mt19937_64& g) {
  const std::size_t n = w.size();
  if (n < 2) return;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t a = pick(g);
    std::size_t b = pick(g);
    while (b == a) b = pick(g);
    w = nsplab::apply({a, b, uniform(g, 0.0, 1.0)}, w);
  }
}

bool same_multiset(const Vec& a, const Vec& b) {
  const auto sa = sorted_desc<double>(a);
  const auto sb = sorted_desc<double>(b);
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (std::abs(sa[i] - sb[i]) > 1e-12 * std::max(1.0, sa.front())) return false;
  return true;
}

}  // namespace

MajorizationPair random_majorization_pair(std::size_t n, std::size_t steps, std::uint64_t seed) {
  if (n < 1) throw InputError("random_majorization_pair: n must be at least 1");
  auto g = rng_for(seed, {n, steps});
  MajorizationPair pair;
  pair.upper.resize(n);
  for (auto& v : pair.upper) v = uniform(g, 0.0, 10.0);
  pair.lower = pair.upper;
  random_t_transforms(pair.lower, steps, g);
  pair.strict = !same_multiset(pair.lower, pair.upper);
  return pair;
}

std::string_view to_string(Property p) {
  switch (p) {
    case Property::symmetry: return "symmetry";
    case Property::concavity_on_u: return "concavity_on_U";
    case Property::increasing: return "increasing";
    case Property::subadditivity: return "subadditivity";
    case Property::schur_concavity: return "schur_concavity";
    case Property::r1: return "R1";
    case Property::r2: return "R2";
  }
  return "?";
}

Property parse_property(std::string_view name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "symmetry") return Property::symmetry;
  if (s == "concavity_on_u" || s == "concavity") return Property::concavity_on_u;
  if (s == "increasing") return Property::increasing;
  if (s == "subadditivity") return Property::subadditivity;
  if (s == "schur_concavity" || s == "schur") return Property::schur_concavity;
  if (s == "r1") return Property::r1;
  if (s == "r2") return Property::r2;
  throw InputError("unknown property '" + std::string(name) + "'");
}

nlohmann::json PropertyReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["penalty"] = penalty;
  j["property"] = std::string(to_string(property));
  j["dimension"] = dimension;
  if (property == Property::r1 || property == Property::r2) j["s"] = sparsity;
  j["trials"] = trials;
  j["verdict"] = verdict();
  j["violation_count"] = violation_count;
  auto& arr = j["violations"] = nlohmann::json::array();
  for (const auto& w : violations) {
    arr.push_back({{"input", {{"vectors", w.inputs}, {"params", w.params}}},
                   {"lhs", w.lhs},
                   {"rhs", w.rhs},
                   {"margin", w.margin}});
  }
  return j;
}

namespace {

bool strict_property(Property p) { return p == Property::r1 || p == Property::r2; }

Vec permuted(const Vec& z, const std::vector<double>& perm) {
  Vec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[static_cast<std::size_t>(perm[i])];
  return out;
}

// Evaluates the two sides of the property's inequality for a witness whose
// inputs/params are filled in, and sets lhs, rhs and margin.
void evaluate_witness(const PenaltySpec& r, Property p, Witness& w) {
  const auto& in = w.inputs;
  switch (p) {
    case Property::symmetry:
      w.lhs = evaluate(r, permuted(in[0], w.params));
      w.rhs = evaluate(r, in[0]);
      w.margin = std::abs(w.lhs - w.rhs);
      return;
    case Property::concavity_on_u: {
      const double lam = w.params[0];
      Vec mix(in[0].size());
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = lam * in[0][i] + (1.0 - lam) * in[1][i];
      w.lhs = lam * evaluate(r, in[0]) + (1.0 - lam) * evaluate(r, in[1]);
      w.rhs = evaluate(r, mix);
      break;
    }
    case Property::increasing:
      w.lhs = evaluate(r, in[0]);
      w.rhs = evaluate(r, in[1]);
      break;
    case Property::subadditivity: {
      Vec sum(in[0].size());
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = in[0][i] + in[1][i];
      w.lhs = evaluate(r, sum);
      w.rhs = evaluate(r, in[0]) + evaluate(r, in[1]);
      break;
    }
    case Property::schur_concavity:
      w.lhs = evaluate(r, in[0]);  // upper
      w.rhs = evaluate(r, in[1]);  // lower
      break;
    case Property::r1:
    case Property::r2:
      // R(reduced) must be strictly below R(full).
      w.lhs = evaluate(r, in[1]);
      w.rhs = evaluate(r, in[0]);
      break;
  }
  w.margin = w.lhs - w.rhs;
}

bool is_violation(Property p, const Witness& w) {
  return strict_property(p) ? w.margin >= -kViolationSlack : w.margin > kViolationSlack;
}

class Recorder {
 public:
  Recorder(const PenaltySpec& r, Property p, PropertyReport& report) : r_(r), p_(p), report_(report) {}

  void operator()(Witness w) {
    evaluate_witness(r_, p_, w);
    if (!is_violation(p_, w)) return;
    ++report_.violation_count;
    if (report_.violations.size() < PropertyReport::kMaxStoredWitnesses)
      report_.violations.push_back(std::move(w));
  }

 private:
  const PenaltySpec& r_;
  Property p_;
  PropertyReport& report_;
};

// Draw from [0,10]^n; 10% of draws are rescaled by 1e3 or 1e-3 and entries are
// zeroed with probability `zero_prob`.
Vec draw_box(std::mt19937_64& g, std::size_t n, double zero_prob = 0.1) {
  Vec z(n);
  const double u = uniform(g, 0.0, 1.0);
  const double scale = u < 0.05 ? 1e3 : (u < 0.1 ? 1e-3 : 1.0);
  for (auto& v : z) {
    v = uniform(g, 0.0, 10.0) * scale;
    if (uniform(g, 0.0, 1.0) < zero_prob) v = 0.0;
  }
  return z;
}

void randomize_signs(Vec& z, std::mt19937_64& g) {
  for (auto& v : z)
    if (uniform(g, 0.0, 1.0) < 0.5) v = -v;
}

Vec unit(std::size_t n, std::size_t i, double value = 1.0) {
  Vec e(n, 0.0);
  e[i] = value;
  return e;
}

std::vector<double> identity_perm(std::size_t n) {
  std::vector<double> p(n);
  std::iota(p.begin(), p.end(), 0.0);
  return p;
}

void corner_cases(Property p, std::size_t n, Recorder& rec) {
  const Vec zero(n, 0.0);
  const Vec ones(n, 1.0);
  const Vec tiny(n, 1e-9);
  Vec ramp(n);
  for (std::size_t i = 0; i < n; ++i) ramp[i] = static_cast<double>(i + 1);
  switch (p) {
    case Property::symmetry:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          auto perm = identity_perm(n);
          std::swap(perm[i], perm[j]);
          rec({{unit(n, i)}, perm});
        }
      {
        auto rev = identity_perm(n);
        std::reverse(rev.begin(), rev.end());
        rec({{ramp}, rev});
        rec({{ones}, rev});
        rec({{tiny}, rev});
      }
      return;
    case Property::concavity_on_u:
      for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        rec({{zero, ones}, {lam}});
        rec({{ones, ones}, {lam}});
        rec({{tiny, ramp}, {lam}});
        for (std::size_t i = 0; i < n; ++i) rec({{zero, unit(n, i)}, {lam}});
        if (n >= 2) rec({{unit(n, 0), unit(n, 1)}, {lam}});
      }
      return;
    case Property::increasing:
      rec({{zero, ones}, {}});
      rec({{zero, tiny}, {}});
      rec({{ones, ramp}, {}});
      for (std::size_t i = 0; i < n; ++i) {
        rec({{zero, unit(n, i)}, {}});
        Vec bumped = ones;
        bumped[i] += 1.0;
        rec({{ones, bumped}, {}});
      }
      return;
    case Property::subadditivity:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) rec({{unit(n, i), unit(n, j)}, {}});
      for (std::size_t i = 0; i < n; ++i) rec({{unit(n, i), unit(n, i, -1.0)}, {}});
      rec({{ones, ones}, {}});
      rec({{tiny, ramp}, {}});
      return;
    case Property::schur_concavity: {
      Vec spread(n, 1.0 / static_cast<double>(n));
      rec({{unit(n, 0), spread}, {}});
      rec({{ones, ones}, {}});
      if (n >= 2) {
        Vec half(n, 0.0);
        half[0] = half[1] = 0.5;
        rec({{unit(n, 0), half}, {}});
        rec({{half, spread}, {}});
      }
      return;
    }
    default: return;
  }
}

}  // namespace

PropertyReport check_structural(const PenaltySpec& r, Property property, std::size_t n,
                                std::size_t trials, std::uint64_t seed) {
  if (strict_property(property))
    return check_sparsity_condition(r, property, std::max<std::size_t>(1, (n - 1) / 2), n, trials, seed);
  if (trials < 1) throw InputError("trials must be at least 1");
  if (n < 1) throw InputError("dimension must be at least 1");
  if (auto d = r.dimension(); d && *d != n)
    throw InputError(r.to_string() + " has dimension " + std::to_string(*d));

  PropertyReport report;
  report.penalty = r.to_string();
  report.property = property;
  report.dimension = n;
  report.trials = trials;
  Recorder rec(r, property, report);
  corner_cases(property, n, rec);

  static constexpr double kLambdaGrid[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  for (std::size_t t = 0; t < trials; ++t) {
    auto g = rng_for(seed, {static_cast<std::uint64_t>(property), t});
    switch (property) {
      case Property::symmetry: {
        Vec z = draw_box(g, n);
        randomize_signs(z, g);
        auto perm = identity_perm(n);
        std::shuffle(perm.begin(), perm.end(), g);
        rec({{z}, perm});
        break;
      }
      case Property::concavity_on_u: {
        Vec a = draw_box(g, n), b = draw_box(g, n);
        const double lam = t % 2 == 0 ? kLambdaGrid[(t / 2) % 11] : uniform(g, 0.0, 1.0);
        rec({{a, b}, {lam}});
        break;
      }
      case Property::increasing: {
        Vec lo = draw_box(g, n);
        Vec hi = lo;
        for (auto& v : hi)
          if (uniform(g, 0.0, 1.0) < 0.7) v += uniform(g, 0.0, 10.0);
        rec({{lo, hi}, {}});
        break;
      }
      case Property::subadditivity: {
        Vec a = draw_box(g, n), b = draw_box(g, n);
        randomize_signs(a, g);
        randomize_signs(b, g);
        rec({{a, b}, {}});
        break;
      }
      case Property::schur_concavity: {
        Vec upper = draw_box(g, n);
        Vec lower = upper;
        random_t_transforms(lower, 1 + t % (2 * n), g);
        rec({{upper, lower}, {}});
        break;
      }
      default: break;
    }
  }
  return report;
}

PropertyReport check_sparsity_condition(const PenaltySpec& r, Property cond, std::size_t s,
                                        std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (!strict_property(cond)) throw InputError("check_sparsity_condition takes R1 or R2");
  if (s < 1 || 2 * s >= n) throw InputError("sparsity condition needs 1 <= s < N/2");
  if (trials < 1) throw InputError("trials must be at least 1");
  if (auto d = r.dimension(); d && *d != n)
    throw InputError(r.to_string() + " has dimension " + std::to_string(*d));

  PropertyReport report;
  report.penalty = r.to_string();
  report.property = cond;
  report.dimension = n;
  report.sparsity = s;
  report.trials = trials;
  Recorder rec(r, cond, report);

  auto instance = [&](const Vec& head) {
    // head holds z_1..z_{s+1} > 0
    Vec full(n, 0.0), reduced(n, 0.0);
    for (std::size_t i = 0; i <= s; ++i) full[i] = head[i];
    if (cond == Property::r1) {
      for (std::size_t i = 0; i < s; ++i) reduced[i] = head[i];
    } else {
      for (std::size_t i = 0; i + 1 < s; ++i) reduced[i] = head[i];
      reduced[s - 1] = head[s - 1] + head[s];
    }
    rec({{full, reduced}, {}});
  };

  instance(Vec(s + 1, 1.0));
  {
    Vec h(s + 1, 1.0);
    h[s] = 1e-3;
    instance(h);
    h[s] = 1e3;
    instance(h);
  }
  for (std::size_t t = 0; t < trials; ++t) {
    auto g = rng_for(seed, {static_cast<std::uint64_t>(cond), s, t});
    Vec head(s + 1);
    for (auto& v : head) {
      do v = uniform(g, 0.0, 10.0);
      while (v == 0.0);
    }
    instance(head);
  }
  return report;
}

std::pair<double, double> replay(const PenaltySpec& r, Property property, const Witness& w) {
  Witness copy{w.inputs, w.params, 0.0, 0.0, 0.0};
  evaluate_witness(r, property, copy);
  return {copy.lhs, copy.rhs};
}

}  // namespace nsplab
