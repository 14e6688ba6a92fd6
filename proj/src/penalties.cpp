#include "nsplab/penalties.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace nsplab {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::lp: return "lp";
    case Family::scad: return "scad";
    case Family::transformed_l1: return "transformed_l1";
    case Family::capped_l1: return "capped_l1";
    case Family::l1_minus_l2: return "l1_minus_l2";
    case Family::two_level_l1: return "two_level_l1";
    case Family::sorted_l1: return "sorted_l1";
    case Family::l1: return "l1";
    case Family::weighted_l1: return "weighted_l1";
  }
  return "?";
}

std::string_view to_string(Applicability a) {
  switch (a) {
    case Applicability::yes: return "yes";
    case Applicability::no: return "no";
    case Applicability::not_applicable: return "not-applicable";
  }
  return "?";
}

void PenaltySpec::add_param(std::string key, Rational value) {
  params_d_.push_back(to_double(value));
  params_.emplace_back(std::move(key), std::move(value));
}

const Rational& PenaltySpec::param(std::string_view key) const {
  for (const auto& [k, v] : params_)
    if (k == key) return v;
  throw ContractError("penalty " + std::string(family_name(family_)) + " has no parameter '" +
                      std::string(key) + "'");
}

double PenaltySpec::param_d(std::string_view key) const { return to_double(param(key)); }

PenaltySpec PenaltySpec::lp(Rational p) {
  if (!(p > 0 && p < 1)) throw InputError("lp: p must lie in (0,1)");
  PenaltySpec r;
  r.family_ = Family::lp;
  r.add_param("p", std::move(p));
  return r;
}

PenaltySpec PenaltySpec::scad(Rational a1, Rational a2) {
  if (!(a1 > 0 && a1 < a2)) throw InputError("scad: need 0 < a1 < a2");
  PenaltySpec r;
  r.family_ = Family::scad;
  r.add_param("a1", std::move(a1));
  r.add_param("a2", std::move(a2));
  return r;
}

PenaltySpec PenaltySpec::transformed_l1(Rational a) {
  if (!(a > 0)) throw InputError("transformed_l1: a must be positive");
  PenaltySpec r;
  r.family_ = Family::transformed_l1;
  r.add_param("a", std::move(a));
  return r;
}

PenaltySpec PenaltySpec::capped_l1(Rational alpha) {
  if (!(alpha > 0)) throw InputError("capped_l1: alpha must be positive");
  PenaltySpec r;
  r.family_ = Family::capped_l1;
  r.add_param("alpha", std::move(alpha));
  return r;
}

PenaltySpec PenaltySpec::l1_minus_l2() {
  PenaltySpec r;
  r.family_ = Family::l1_minus_l2;
  return r;
}

PenaltySpec PenaltySpec::two_level_l1(Rational rho, std::size_t level) {
  if (!(rho >= 0 && rho < 1)) throw InputError("two_level_l1: rho must lie in [0,1)");
  if (level < 1) throw InputError("two_level_l1: level must be at least 1");
  PenaltySpec r;
  r.family_ = Family::two_level_l1;
  r.add_param("rho", std::move(rho));
  r.level_ = level;
  return r;
}

PenaltySpec PenaltySpec::sorted_l1(std::vector<Rational> beta) {
  if (beta.empty()) throw InputError("sorted_l1: beta must be nonempty");
  if (beta.front() < 0) throw InputError("sorted_l1: beta must be nonnegative");
  for (std::size_t j = 1; j < beta.size(); ++j)
    if (beta[j] < beta[j - 1]) throw InputError("sorted_l1: beta must be nondecreasing");
  PenaltySpec r;
  r.family_ = Family::sorted_l1;
  r.coeffs_ = std::move(beta);
  r.coeffs_d_ = to_double(r.coeffs_);
  return r;
}

PenaltySpec PenaltySpec::l1() {
  PenaltySpec r;
  r.family_ = Family::l1;
  return r;
}

PenaltySpec PenaltySpec::weighted_l1(std::vector<Rational> weights) {
  if (weights.empty()) throw InputError("weighted_l1: weights must be nonempty");
  for (const auto& w : weights)
    if (!(w > 0)) throw InputError("weighted_l1: weights must be positive");
  PenaltySpec r;
  r.family_ = Family::weighted_l1;
  r.coeffs_ = std::move(weights);
  r.coeffs_d_ = to_double(r.coeffs_);
  return r;
}

std::optional<std::size_t> PenaltySpec::dimension() const {
  if (family_ == Family::sorted_l1 || family_ == Family::weighted_l1) return coeffs_.size();
  return std::nullopt;
}

PenaltyTraits PenaltySpec::traits() const {
  PenaltyTraits t;
  switch (family_) {
    case Family::lp:
    case Family::scad:
    case Family::transformed_l1:
    case Family::capped_l1:
    case Family::l1:
      t.separable = true;
      t.symmetric = true;
      break;
    case Family::weighted_l1:
      t.separable = true;
      t.symmetric = false;
      break;
    case Family::l1_minus_l2:
    case Family::two_level_l1:
    case Family::sorted_l1:
      t.symmetric = true;
      break;
  }
  t.concave_on_u = true;
  t.identically_zero = family_ == Family::sorted_l1 &&
                       std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& b) { return b == 0; });
  return t;
}

std::optional<double> PenaltySpec::homogeneity_degree() const {
  switch (family_) {
    case Family::lp: return params_d_[0];
    case Family::scad:
    case Family::transformed_l1:
    case Family::capped_l1: return std::nullopt;
    default: return 1.0;
  }
}

bool PenaltySpec::piecewise_linear_homogeneous() const {
  return family_ == Family::l1 || family_ == Family::weighted_l1 ||
         family_ == Family::sorted_l1 || family_ == Family::two_level_l1;
}

bool PenaltySpec::order_dependent() const {
  return family_ == Family::sorted_l1 || family_ == Family::two_level_l1;
}

bool PenaltySpec::rational_closed() const {
  return family_ != Family::lp && family_ != Family::l1_minus_l2;
}

std::vector<double> PenaltySpec::knots() const {
  if (family_ == Family::scad) return {params_d_[0], params_d_[1]};
  if (family_ == Family::capped_l1) return {params_d_[0]};
  return {};
}

namespace {

// Sorted-l1 coefficient at 0-based position j of the equivalent beta vector
// for the order-dependent families.
Rational order_weight(const PenaltySpec& r, std::size_t j) {
  if (r.family() == Family::two_level_l1) return j < r.level() ? r.param("rho") : Rational(1);
  const auto& beta = r.coefficients();
  return j < beta.size() ? beta[j] : beta.back();
}

}  // namespace

Applicability PenaltySpec::satisfies_r1(std::size_t s) const {
  if (!traits().symmetric || traits().identically_zero) return Applicability::not_applicable;
  if (order_dependent()) return order_weight(*this, s) > 0 ? Applicability::yes : Applicability::no;
  return Applicability::yes;
}

Applicability PenaltySpec::satisfies_r2(std::size_t s) const {
  if (!traits().symmetric || traits().identically_zero || s == 0) return Applicability::not_applicable;
  switch (family_) {
    case Family::lp:
    case Family::transformed_l1:
    case Family::l1_minus_l2: return Applicability::yes;
    case Family::two_level_l1:
    case Family::sorted_l1:
      return order_weight(*this, s) > order_weight(*this, s - 1) ? Applicability::yes : Applicability::no;
    default: return Applicability::no;
  }
}

std::string PenaltySpec::to_string() const {
  std::string out(family_name(family_));
  std::vector<std::string> parts;
  for (const auto& [k, v] : params_) parts.push_back(k + "=" + nsplab::to_string(v));
  if (family_ == Family::two_level_l1) parts.push_back("level=" + std::to_string(level_));
  if (!coeffs_.empty()) {
    std::string list = family_ == Family::sorted_l1 ? "beta=" : "w=";
    for (std::size_t j = 0; j < coeffs_.size(); ++j) {
      if (j) list += ',';
      list += nsplab::to_string(coeffs_[j]);
    }
    parts.push_back(list);
  }
  if (parts.empty()) return out;
  out += '(';
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ',';
    out += parts[k];
  }
  return out + ')';
}

void PenaltySpec::check_dimension(std::size_t n) const {
  if (n == 0) throw InputError("penalty evaluated on an empty vector");
  if (auto d = dimension(); d && *d != n)
    throw InputError(to_string() + " expects dimension " + std::to_string(*d) + ", got " +
                     std::to_string(n));
  if (family_ == Family::two_level_l1 && level_ >= n)
    throw InputError("two_level_l1: level must be smaller than the dimension");
}

namespace {

template <class T>
T scad_term(const T& x, const T& a1, const T& a2) {
  if (x < a1) return a1 * x;
  if (x <= a2) return -(a1 * x * x - 2 * a1 * a2 * x + a1 * a1 * a1) / (2 * (a2 - a1));
  return (a1 * a2 + a1 * a1) / 2;
}

template <class T>
T transformed_term(const T& x, const T& a) {
  return (a + 1) * x / (a + x);
}

// Families that stay inside the field of the scalar type.
template <class T>
T evaluate_closed(const PenaltySpec& r, std::span<const T> z, const auto& param, const auto& coeffs) {
  T sum(0);
  switch (r.family()) {
    case Family::scad: {
      const T a1 = param(0), a2 = param(1);
      for (const auto& v : z) sum += scad_term<T>(abs_value(v), a1, a2);
      return sum;
    }
    case Family::transformed_l1: {
      const T a = param(0);
      for (const auto& v : z) sum += transformed_term<T>(abs_value(v), a);
      return sum;
    }
    case Family::capped_l1: {
      const T alpha = param(0);
      for (const auto& v : z) sum += std::min<T>(abs_value(v), alpha);
      return sum;
    }
    case Family::l1:
      for (const auto& v : z) sum += abs_value(v);
      return sum;
    case Family::weighted_l1:
      for (std::size_t j = 0; j < z.size(); ++j) sum += coeffs[j] * abs_value(z[j]);
      return sum;
    case Family::sorted_l1: {
      const auto order = magnitude_order(z);
      for (std::size_t j = 0; j < order.size(); ++j) sum += coeffs[j] * abs_value(z[order[j]]);
      return sum;
    }
    case Family::two_level_l1: {
      const auto order = magnitude_order(z);
      const T rho = param(0);
      for (std::size_t j = 0; j < order.size(); ++j) {
        const T a = abs_value(z[order[j]]);
        sum += j < r.level() ? T(rho * a) : a;
      }
      return sum;
    }
    default: break;
  }
  throw ContractError("penalty family not closed over the scalar type");
}

}  // namespace

double evaluate(const PenaltySpec& r, std::span<const double> z) {
  r.check_dimension(z.size());
  switch (r.family_) {
    case Family::lp: {
      const double p = r.params_d_[0];
      double sum = 0.0;
      if (p == 0.5) {
        for (double v : z) sum += std::sqrt(std::abs(v));
        return sum;
      }
      for (double v : z)
        if (v != 0.0) sum += std::pow(std::abs(v), p);
      return sum;
    }
    case Family::l1_minus_l2: {
      double l1 = 0.0, sq = 0.0;
      for (double v : z) {
        l1 += std::abs(v);
        sq += v * v;
      }
      return std::max(0.0, l1 - std::sqrt(sq));
    }
    default:
      return evaluate_closed<double>(
          r, z, [&](std::size_t k) { return r.params_d_[k]; }, r.coeffs_d_);
  }
}

Rational evaluate(const PenaltySpec& r, std::span<const Rational> z) {
  r.check_dimension(z.size());
  if (!r.rational_closed())
    throw ContractError(r.to_string() + " cannot be evaluated in exact rational mode");
  return evaluate_closed<Rational>(
      r, z, [&](std::size_t k) { return r.params_[k].second; }, r.coeffs_);
}

double univariate_term(const PenaltySpec& r, std::size_t j, double x) {
  if (!r.traits().separable)
    throw ContractError(r.to_string() + " is not separable; no univariate term");
  const double a = std::abs(x);
  switch (r.family_) {
    case Family::lp: return a == 0.0 ? 0.0 : std::pow(a, r.params_d_[0]);
    case Family::scad: return scad_term(a, r.params_d_[0], r.params_d_[1]);
    case Family::transformed_l1: return transformed_term(a, r.params_d_[0]);
    case Family::capped_l1: return std::min(a, r.params_d_[0]);
    case Family::l1: return a;
    case Family::weighted_l1:
      if (j >= r.coeffs_d_.size()) throw InputError("weighted_l1: coordinate index out of range");
      return r.coeffs_d_[j] * a;
    default: break;
  }
  throw ContractError("unreachable");
}

std::vector<PenaltySpec> nonconvex_catalog(std::size_t n, std::size_t s) {
  if (s < 1 || 2 * s >= n) throw InputError("default catalog needs 1 <= s < N/2");
  std::vector<Rational> beta(n, Rational(1));
  for (std::size_t j = 0; j < s; ++j) beta[j] = 0;
  return {
      PenaltySpec::lp(Rational(1, 2)),
      PenaltySpec::scad(Rational(1), Rational(37, 10)),
      PenaltySpec::transformed_l1(Rational(1)),
      PenaltySpec::capped_l1(Rational(1)),
      PenaltySpec::l1_minus_l2(),
      PenaltySpec::two_level_l1(Rational(1, 2), s),
      PenaltySpec::sorted_l1(std::move(beta)),
  };
}

std::vector<PenaltySpec> default_catalog(std::size_t n, std::size_t s) {
  auto out = nonconvex_catalog(n, s);
  out.push_back(PenaltySpec::l1());
  std::vector<Rational> w(n, Rational(1));
  w[0] = 4;
  w[1] = 3;
  out.push_back(PenaltySpec::weighted_l1(std::move(w)));
  return out;
}

namespace {

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "lp") return Family::lp;
  if (name == "scad") return Family::scad;
  if (name == "transformed_l1" || name == "tl1" || name == "transformed-l1") return Family::transformed_l1;
  if (name == "capped_l1" || name == "cl1" || name == "capped-l1") return Family::capped_l1;
  if (name == "l1_minus_l2" || name == "l1-l2" || name == "l1ml2" || name == "l1_l2") return Family::l1_minus_l2;
  if (name == "two_level_l1" || name == "2l1" || name == "two-level-l1") return Family::two_level_l1;
  if (name == "sorted_l1" || name == "sl1" || name == "sorted-l1") return Family::sorted_l1;
  if (name == "l1") return Family::l1;
  if (name == "weighted_l1" || name == "wl1" || name == "weighted-l1") return Family::weighted_l1;
  return std::nullopt;
}

}  // namespace

PenaltySpec parse_penalty(std::string_view text, std::optional<std::size_t> default_level) {
  const std::string s = lower(text);
  const auto open = s.find('(');
  std::string name = s.substr(0, open);
  std::vector<std::pair<std::string, std::vector<std::string>>> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw InputError("penalty spec missing ')': " + std::string(text));
    const std::string body = s.substr(open + 1, s.size() - open - 2);
    std::size_t start = 0;
    while (start <= body.size() && !body.empty()) {
      auto comma = body.find(',', start);
      if (comma == std::string::npos) comma = body.size();
      const std::string tok = body.substr(start, comma - start);
      const auto eq = tok.find('=');
      if (eq != std::string::npos) {
        args.push_back({tok.substr(0, eq), {tok.substr(eq + 1)}});
      } else if (!args.empty()) {
        args.back().second.push_back(tok);  // continuation of a list value
      } else {
        throw InputError("penalty argument without key: '" + tok + "'");
      }
      start = comma + 1;
    }
  }
  const auto family = family_from_name(name);
  if (!family) throw InputError("unknown penalty family '" + name + "'");

  std::vector<bool> used(args.size(), false);
  auto find = [&](std::initializer_list<std::string_view> keys) -> const std::vector<std::string>* {
    for (std::size_t k = 0; k < args.size(); ++k)
      for (auto key : keys)
        if (args[k].first == key) {
          used[k] = true;
          return &args[k].second;
        }
    return nullptr;
  };
  auto scalar = [&](std::initializer_list<std::string_view> keys, std::optional<Rational> fallback) {
    const auto* v = find(keys);
    if (!v) {
      if (!fallback) throw InputError("penalty " + name + " requires parameter " + std::string(*keys.begin()));
      return *fallback;
    }
    if (v->size() != 1) throw InputError("parameter " + std::string(*keys.begin()) + " must be a scalar");
    return parse_rational(v->front());
  };
  auto list = [&](std::initializer_list<std::string_view> keys) {
    const auto* v = find(keys);
    if (!v) throw InputError("penalty " + name + " requires parameter " + std::string(*keys.begin()));
    std::vector<Rational> out;
    for (const auto& t : *v) out.push_back(parse_rational(t));
    return out;
  };

  std::optional<PenaltySpec> spec;
  switch (*family) {
    case Family::lp: spec = PenaltySpec::lp(scalar({"p"}, Rational(1, 2))); break;
    case Family::scad: {
      auto a1 = scalar({"a1"}, Rational(1));
      auto a2 = scalar({"a2"}, Rational(37, 10));
      spec = PenaltySpec::scad(a1, a2);
      break;
    }
    case Family::transformed_l1: spec = PenaltySpec::transformed_l1(scalar({"a"}, Rational(1))); break;
    case Family::capped_l1: spec = PenaltySpec::capped_l1(scalar({"alpha"}, Rational(1))); break;
    case Family::l1_minus_l2: spec = PenaltySpec::l1_minus_l2(); break;
    case Family::two_level_l1: {
      auto rho = scalar({"rho"}, Rational(1, 2));
      std::optional<Rational> lvl_default;
      if (default_level) lvl_default = Rational(static_cast<long>(*default_level));
      const Rational lvl = scalar({"level", "sj", "s_j"}, lvl_default);
      if (denominator(lvl) != 1 || lvl < 1) throw InputError("two_level_l1: level must be a positive integer");
      spec = PenaltySpec::two_level_l1(rho, numerator(lvl).convert_to<std::size_t>());
      break;
    }
    case Family::sorted_l1: spec = PenaltySpec::sorted_l1(list({"beta"})); break;
    case Family::l1: spec = PenaltySpec::l1(); break;
    case Family::weighted_l1: spec = PenaltySpec::weighted_l1(list({"w", "weights"})); break;
  }
  for (std::size_t k = 0; k < args.size(); ++k)
    if (!used[k]) throw InputError("unknown parameter '" + args[k].first + "' for penalty " + name);
  return *spec;
}

}  // namespace nsplab
