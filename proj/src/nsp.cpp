#include "nsplab/nsp.hpp"

#include "nsplab/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace nsplab {

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::nsp: return "NSP";
    case Condition::insp: return "iNSP";
    case Condition::nsp_fs: return "NSP-fs";
    case Condition::gnsp: return "gNSP";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::holds_strict: return "holds-strict";
    case Status::holds_nonstrict: return "holds-nonstrict";
    case Status::fails: return "fails";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::exact_trivial: return "exact-trivial";
    case Method::exact_dim1: return "exact-dim1";
    case Method::exact_dim2_sweep: return "exact-dim2-sweep";
    case Method::sampled: return "sampled";
  }
  return "?";
}

bool CertificateReport::holds() const {
  if (condition == Condition::insp) return status != Status::fails;
  return status == Status::holds_strict;
}

nlohmann::json CertificateReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["condition"] = std::string(to_string(condition));
  j["s"] = s;
  if (fixed_support) j["support"] = fixed_support->one_based();
  if (!penalty.empty()) j["penalty"] = penalty;
  if (std::isfinite(margin)) {
    j["margin"] = margin;
  } else {
    j["margin"] = margin < 0 ? "-inf" : "inf";
  }
  if (exact_margin) j["margin_exact"] = nsplab::to_string(*exact_margin);
  j["status"] = std::string(to_string(status));
  j["holds"] = holds();
  j["method"] = std::string(to_string(method));
  if (witness) {
    nlohmann::json w;
    w["v"] = witness->v;
    if (witness->v_exact) {
      std::vector<std::string> ve;
      for (const auto& x : *witness->v_exact) ve.push_back(nsplab::to_string(x));
      w["v_exact"] = ve;
    }
    w["S"] = witness->support.one_based();
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

std::vector<SupportSet> supports_up_to(std::size_t n, std::size_t s) {
  std::vector<SupportSet> out;
  std::vector<std::size_t> current;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!current.empty()) out.emplace_back(current, n);
    if (current.size() == s) return;
    for (std::size_t i = start; i < n; ++i) {
      current.push_back(i);
      rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Objectives. Each maps a kernel vector v (already normalized when the
// condition is homogeneous) to the worst lhs - rhs and the S realizing it.

template <class T>
using Objective = std::function<T(const std::vector<T>&, SupportSet&)>;

template <class T>
T l1_top_gap(const std::vector<T>& v, std::size_t s, SupportSet& arg) {
  const auto order = magnitude_order<T>(v);
  T top(0), rest(0);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < s) {
      top += abs_value(v[order[k]]);
      idx.push_back(order[k]);
    } else {
      rest += abs_value(v[order[k]]);
    }
  }
  std::sort(idx.begin(), idx.end());
  arg = SupportSet(std::move(idx), v.size());
  return top - rest;
}

template <class T>
T l1_fixed_gap(const std::vector<T>& v, const SupportSet& support) {
  T in(0), out(0);
  for (std::size_t i = 0; i < v.size(); ++i) (support.contains(i) ? in : out) += abs_value(v[i]);
  return in - out;
}

template <class T>
T penalty_gap(const PenaltySpec& r, const std::vector<T>& v, const std::vector<SupportSet>& supports,
              SupportSet& arg) {
  bool first = true;
  T best(0);
  std::vector<T> vs(v.size()), vc(v.size());
  for (const auto& sup : supports) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const bool in = sup.contains(i);
      vs[i] = in ? v[i] : T(0);
      vc[i] = in ? T(0) : v[i];
    }
    const T gap = evaluate(r, std::span<const T>(vs)) - evaluate(r, std::span<const T>(vc));
    if (first || gap > best) {
      best = gap;
      arg = sup;
      first = false;
    }
  }
  return best;
}

template <class T>
std::vector<T> normalized(const std::vector<T>& v) {
  const T m = norm_inf<T>(v);
  std::vector<T> out(v);
  for (auto& x : out) x /= m;
  return out;
}

template <class T>
struct Best {
  bool set = false;
  T value{};
  std::vector<T> v;
  SupportSet support;

  void offer(const std::vector<T>& cand, const Objective<T>& f) {
    SupportSet arg;
    const T val = f(cand, arg);
    if (!set || val > value) {
      set = true;
      value = val;
      v = cand;
      support = std::move(arg);
    }
  }
};

// Both signs of the raw vector, normalized to ||.||_inf = 1.
template <class T>
void offer_direction(Best<T>& best, const std::vector<T>& raw, const Objective<T>& f) {
  if (norm_inf<T>(raw) == T(0)) return;
  auto v = normalized(raw);
  best.offer(v, f);
  for (auto& x : v) x = -x;
  best.offer(v, f);
}

// Directions t in R^2 at which some coordinate of V t vanishes or two
// coordinates tie in magnitude. Between consecutive breakpoints every
// coordinate keeps its sign and the magnitude order is fixed.
template <class T>
std::vector<std::array<T, 2>> breakpoint_directions(const BasicKernelBasis<T>& k) {
  std::vector<std::array<T, 2>> normals;
  const std::size_t n = k.ambient;
  auto row = [&](std::size_t i) { return std::array<T, 2>{k.columns[0][i], k.columns[1][i]}; };
  for (std::size_t i = 0; i < n; ++i) {
    normals.push_back(row(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = row(i), b = row(j);
      normals.push_back({a[0] - b[0], a[1] - b[1]});
      normals.push_back({a[0] + b[0], a[1] + b[1]});
    }
  }
  std::vector<std::array<T, 2>> dirs;
  for (const auto& nv : normals) {
    if (nv[0] == T(0) && nv[1] == T(0)) continue;
    dirs.push_back({T(-nv[1]), nv[0]});
  }
  dirs.push_back({T(1), T(0)});
  dirs.push_back({T(0), T(1)});
  return dirs;
}

template <class T>
std::vector<T> combine2(const BasicKernelBasis<T>& k, const std::array<T, 2>& t) {
  return k.combine(std::span<const T>(t.data(), 2));
}

// Exact search for objectives that are positively homogeneous of degree 1
// and piecewise linear between breakpoints (d = 1 or 2).
template <class T>
Best<T> exact_search(const BasicKernelBasis<T>& k, const Objective<T>& f) {
  Best<T> best;
  if (k.dim() == 1) {
    offer_direction(best, k.columns[0], f);
  } else {
    for (const auto& t : breakpoint_directions(k)) offer_direction(best, combine2(k, t), f);
  }
  return best;
}

// Angle-parameterized objective for d = 2 float kernels.
Vec direction_at(const KernelBasis& k, double theta) {
  const std::array<double, 2> t{std::cos(theta), std::sin(theta)};
  return combine2(k, t);
}

// Golden-section maximization of a scalar function on [a, b].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b,
                                     int iters = 60) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

// d = 2 sweep for homogeneous objectives that are not piecewise linear:
// breakpoint directions plus sampled and golden-refined sector interiors.
Best<double> sector_search(const KernelBasis& k, const Objective<double>& f) {
  Best<double> best = exact_search(k, f);
  std::vector<double> angles;
  for (const auto& t : breakpoint_directions(k)) {
    const double th = std::atan2(t[1], t[0]);
    angles.push_back(th);
    angles.push_back(th + std::numbers::pi);
  }
  for (auto& a : angles) a = std::remainder(a, 2.0 * std::numbers::pi);
  std::sort(angles.begin(), angles.end());
  angles.push_back(angles.front() + 2.0 * std::numbers::pi);
  auto value_at = [&](double th) {
    SupportSet arg;
    return f(normalized(direction_at(k, th)), arg);
  };
  for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
    const double a = angles[i], b = angles[i + 1];
    if (b - a < 1e-14) continue;
    constexpr int kSamples = 8;
    double best_th = a, best_val = -std::numeric_limits<double>::infinity();
    for (int q = 1; q < kSamples; ++q) {
      const double th = a + (b - a) * q / kSamples;
      const double val = value_at(th);
      if (val > best_val) {
        best_val = val;
        best_th = th;
      }
    }
    const double h = (b - a) / kSamples;
    const auto [th, val] = golden_max(value_at, std::max(a, best_th - h), std::min(b, best_th + h));
    (void)val;
    best.offer(normalized(direction_at(k, th)), f);
    best.offer(normalized(direction_at(k, best_th)), f);
  }
  return best;
}

// Pattern-search ascent on the unit sphere of kernel coordinates (d >= 3).
Best<double> sphere_ascent(const KernelBasis& k, const Objective<double>& f, const SearchConfig& cfg) {
  const std::size_t d = k.dim();
  Best<double> best;
  auto value = [&](const Vec& t) {
    SupportSet arg;
    const Vec v = k.combine(t);
    if (norm_inf<double>(v) == 0.0) return -std::numeric_limits<double>::infinity();
    return f(normalized(v), arg);
  };
  auto unit = [](Vec t) {
    double nrm = 0.0;
    for (double x : t) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : t) x /= nrm;
    return t;
  };
  auto ascend = [&](Vec t, std::mt19937_64& g) {
    t = unit(t);
    double val = value(t);
    double step = 0.5;
    std::normal_distribution<double> normal;
    for (int iter = 0; iter < 4000 && step > 1e-12; ++iter) {
      bool improved = false;
      std::vector<Vec> dirs;
      for (std::size_t c = 0; c < d; ++c) {
        Vec e(d, 0.0);
        e[c] = 1.0;
        dirs.push_back(e);
        e[c] = -1.0;
        dirs.push_back(e);
      }
      for (int extra = 0; extra < 2; ++extra) {
        Vec r(d);
        for (double& x : r) x = normal(g);
        dirs.push_back(unit(r));
      }
      for (const auto& dir : dirs) {
        Vec cand(d);
        for (std::size_t c = 0; c < d; ++c) cand[c] = t[c] + step * dir[c];
        cand = unit(cand);
        const double cv = value(cand);
        if (cv > val) {
          t = cand;
          val = cv;
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
    return t;
  };
  for (std::size_t c = 0; c < k.dim(); ++c) {
    Vec e(d, 0.0);
    e[c] = 1.0;
    offer_direction(best, k.combine(e), f);
  }
  for (std::size_t st = 0; st < cfg.starts; ++st) {
    auto g = rng_for(cfg.seed, {0x5a5aULL, st});
    std::normal_distribution<double> normal;
    Vec t(d);
    for (double& x : t) x = normal(g);
    Vec local = ascend(t, g);
    offer_direction(best, k.combine(local), f);
    for (std::size_t rs = 0; rs < cfg.restarts; ++rs) {
      Vec jitter = local;
      for (double& x : jitter) x += 0.3 * normal(g);
      local = ascend(jitter, g);
      offer_direction(best, k.combine(local), f);
    }
  }
  return best;
}

template <class T>
Status classify(Condition c, const T& margin, double tol) {
  bool positive, zero;
  if constexpr (is_exact_v<T>) {
    positive = margin > 0;
    zero = margin == 0;
  } else {
    positive = margin > tol;
    zero = std::abs(margin) <= tol;
  }
  if (positive) return Status::fails;
  if (zero) return (c == Condition::nsp || c == Condition::nsp_fs) ? Status::fails : Status::holds_nonstrict;
  return Status::holds_strict;
}

template <class T>
CertificateReport make_report(Condition c, std::size_t s, const Best<T>& best, Method method, double tol) {
  CertificateReport rep;
  rep.condition = c;
  rep.s = s;
  rep.method = method;
  if constexpr (is_exact_v<T>) {
    rep.exact_margin = best.value;
    rep.margin = to_double(best.value);
    rep.witness = CertificateWitness{to_double(best.v), best.support, best.v};
  } else {
    rep.margin = best.value;
    rep.witness = CertificateWitness{best.v, best.support, std::nullopt};
  }
  rep.status = classify(c, best.value, tol);
  return rep;
}

CertificateReport vacuous(Condition c, std::size_t s) {
  CertificateReport rep;
  rep.condition = c;
  rep.s = s;
  rep.margin = -std::numeric_limits<double>::infinity();
  rep.status = Status::holds_strict;
  rep.method = Method::exact_trivial;
  return rep;
}

template <class T>
void check_kernel(const BasicKernelBasis<T>& k) {
  if (k.ambient == 0) throw InputError("kernel basis has zero ambient dimension");
  for (const auto& c : k.columns)
    if (c.size() != k.ambient) throw InputError("kernel basis column length mismatch");
}

template <class T>
L1Certificates l1_margin_impl(const BasicKernelBasis<T>& k, std::size_t s, const SearchConfig& cfg) {
  check_kernel(k);
  if (s < 1 || s >= k.ambient) throw InputError("l1_margin needs 1 <= s < N");
  if (k.dim() == 0) return {vacuous(Condition::nsp, s), vacuous(Condition::insp, s)};
  Objective<T> f = [s](const std::vector<T>& v, SupportSet& arg) { return l1_top_gap(v, s, arg); };
  Best<T> best;
  Method method;
  if (k.dim() <= 2) {
    best = exact_search(k, f);
    method = k.dim() == 1 ? Method::exact_dim1 : Method::exact_dim2_sweep;
  } else {
    if constexpr (is_exact_v<T>) {
      return l1_margin_impl(to_double(k), s, cfg);
    } else {
      best = sphere_ascent(k, f, cfg);
      method = Method::sampled;
    }
  }
  return {make_report(Condition::nsp, s, best, method, cfg.tol_zero),
          make_report(Condition::insp, s, best, method, cfg.tol_zero)};
}

template <class T>
CertificateReport fixed_support_impl(const BasicKernelBasis<T>& k, const SupportSet& support,
                                     const SearchConfig& cfg) {
  check_kernel(k);
  if (support.empty()) throw InputError("fixed support must be nonempty");
  if (support.ambient() != k.ambient) throw InputError("support ambient dimension mismatch");
  CertificateReport rep;
  if (k.dim() == 0) {
    rep = vacuous(Condition::nsp_fs, support.size());
  } else {
    Objective<T> f = [&support](const std::vector<T>& v, SupportSet& arg) {
      arg = support;
      return l1_fixed_gap(v, support);
    };
    if (k.dim() <= 2) {
      rep = make_report(Condition::nsp_fs, support.size(), exact_search(k, f),
                        k.dim() == 1 ? Method::exact_dim1 : Method::exact_dim2_sweep, cfg.tol_zero);
    } else if constexpr (is_exact_v<T>) {
      return fixed_support_impl(to_double(k), support, cfg);
    } else {
      rep = make_report(Condition::nsp_fs, support.size(), sphere_ascent(k, f, cfg), Method::sampled,
                        cfg.tol_zero);
    }
  }
  rep.fixed_support = support;
  return rep;
}

// Radial search for penalties without positive homogeneity: the margin is
// the largest R(r u_S) - R(r u_Sc) over unit directions u and radii r.
struct RadialSearch {
  const PenaltySpec& r;
  const std::vector<SupportSet>& supports;
  const SearchConfig& cfg;
  Best<double> best;

  Objective<double> objective() const {
    return [this](const Vec& v, SupportSet& arg) { return penalty_gap(r, v, supports, arg); };
  }

  std::vector<double> radii_for(const Vec& u) const {
    std::vector<double> out;
    const double lr0 = std::log(cfg.r_min), lr1 = std::log(cfg.r_max);
    const std::size_t m = std::max<std::size_t>(cfg.radii, 2);
    for (std::size_t i = 0; i < m; ++i)
      out.push_back(std::exp(lr0 + (lr1 - lr0) * static_cast<double>(i) / static_cast<double>(m - 1)));
    for (double knot : r.knots())
      for (double ui : u) {
        const double a = std::abs(ui);
        if (a == 0.0) continue;
        const double rad = knot / a;
        if (rad >= cfg.r_min && rad <= cfg.r_max) out.push_back(rad);
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void scan(const Vec& raw, bool refine) {
    if (norm_inf<double>(raw) == 0.0) return;
    Vec u = normalized(raw);
    for (int sign = 0; sign < 2; ++sign) {
      if (sign) for (double& x : u) x = -x;
      const auto f = objective();
      auto at = [&](double rad) {
        Vec v(u);
        for (double& x : v) x *= rad;
        return v;
      };
      const auto radii = radii_for(u);
      for (double rad : radii) best.offer(at(rad), f);
      if (!refine) continue;
      for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        auto g = [&](double lr) {
          SupportSet arg;
          return f(at(std::exp(lr)), arg);
        };
        const auto [lr, val] = golden_max(g, std::log(radii[i]), std::log(radii[i + 1]), 40);
        (void)val;
        best.offer(at(std::exp(lr)), f);
      }
    }
  }
};

}  // namespace

L1Certificates l1_margin(const KernelBasis& k, std::size_t s, const SearchConfig& cfg) {
  return l1_margin_impl(k, s, cfg);
}

L1Certificates l1_margin(const ExactKernelBasis& k, std::size_t s, const SearchConfig& cfg) {
  return l1_margin_impl(k, s, cfg);
}

CertificateReport fixed_support_margin(const KernelBasis& k, const SupportSet& support,
                                       const SearchConfig& cfg) {
  return fixed_support_impl(k, support, cfg);
}

CertificateReport fixed_support_margin(const ExactKernelBasis& k, const SupportSet& support,
                                       const SearchConfig& cfg) {
  return fixed_support_impl(k, support, cfg);
}

namespace {

void check_gnsp_inputs(const PenaltySpec& r, std::size_t n, std::size_t s, const SearchConfig& cfg) {
  if (s < 1 || 2 * s >= n) throw InputError("gNSP certification needs 1 <= s < N/2");
  if (n > cfg.max_ambient)
    throw InputError("gNSP support enumeration is limited to N <= " + std::to_string(cfg.max_ambient));
  if (auto d = r.dimension(); d && *d != n)
    throw InputError(r.to_string() + " has dimension " + std::to_string(*d) + ", kernel has " +
                     std::to_string(n));
  if (r.family() == Family::two_level_l1 && r.level() >= n)
    throw InputError("two_level_l1 level must be below the dimension");
}

CertificateReport finish_gnsp(CertificateReport rep, const PenaltySpec& r) {
  rep.penalty = r.to_string();
  return rep;
}

}  // namespace

CertificateReport gnsp_certify(const PenaltySpec& r, const KernelBasis& k, std::size_t s,
                               const SearchConfig& cfg) {
  check_kernel(k);
  check_gnsp_inputs(r, k.ambient, s, cfg);
  if (k.dim() == 0) return finish_gnsp(vacuous(Condition::gnsp, s), r);
  const auto supports = supports_up_to(k.ambient, s);

  if (r.homogeneity_degree()) {
    Objective<double> f = [&](const Vec& v, SupportSet& arg) { return penalty_gap(r, v, supports, arg); };
    if (k.dim() == 1)
      return finish_gnsp(make_report(Condition::gnsp, s, exact_search(k, f), Method::exact_dim1, cfg.tol_zero), r);
    if (k.dim() == 2) {
      if (r.piecewise_linear_homogeneous())
        return finish_gnsp(
            make_report(Condition::gnsp, s, exact_search(k, f), Method::exact_dim2_sweep, cfg.tol_zero), r);
      return finish_gnsp(make_report(Condition::gnsp, s, sector_search(k, f), Method::sampled, cfg.tol_zero), r);
    }
    return finish_gnsp(make_report(Condition::gnsp, s, sphere_ascent(k, f, cfg), Method::sampled, cfg.tol_zero), r);
  }

  RadialSearch search{r, supports, cfg, {}};
  if (k.dim() == 1) {
    search.scan(k.columns[0], true);
  } else if (k.dim() == 2) {
    for (const auto& t : breakpoint_directions(k)) search.scan(combine2(k, t), false);
    for (std::size_t i = 0; i < cfg.directions; ++i) {
      const double th = std::numbers::pi * static_cast<double>(i) / static_cast<double>(cfg.directions);
      search.scan(direction_at(k, th), false);
    }
  } else {
    for (std::size_t i = 0; i < 2 * cfg.directions; ++i) {
      auto g = rng_for(cfg.seed, {0x7261ULL, i});
      std::normal_distribution<double> normal;
      Vec t(k.dim());
      for (double& x : t) x = normal(g);
      search.scan(k.combine(t), false);
    }
  }
  return finish_gnsp(make_report(Condition::gnsp, s, search.best, Method::sampled, cfg.tol_zero), r);
}

CertificateReport gnsp_certify(const PenaltySpec& r, const ExactKernelBasis& k, std::size_t s,
                               const SearchConfig& cfg) {
  check_kernel(k);
  check_gnsp_inputs(r, k.ambient, s, cfg);
  if (!(r.rational_closed() && r.piecewise_linear_homogeneous()) || k.dim() > 2 || k.dim() == 0)
    return gnsp_certify(r, to_double(k), s, cfg);
  const auto supports = supports_up_to(k.ambient, s);
  Objective<Rational> f = [&](const ExactVec& v, SupportSet& arg) { return penalty_gap(r, v, supports, arg); };
  return finish_gnsp(make_report(Condition::gnsp, s, exact_search(k, f),
                                 k.dim() == 1 ? Method::exact_dim1 : Method::exact_dim2_sweep, cfg.tol_zero),
                     r);
}

double replay_margin(const CertificateReport& report, const PenaltySpec* r) {
  if (!report.witness) return report.margin;
  const Vec& v = report.witness->v;
  const SupportSet& sup = report.witness->support;
  switch (report.condition) {
    case Condition::nsp:
    case Condition::insp:
    case Condition::nsp_fs: return l1_fixed_gap(v, sup) / norm_inf<double>(v);
    case Condition::gnsp: {
      if (!r) throw ContractError("replaying a gNSP witness needs the penalty");
      const Vec vs = restrict_to<double>(v, sup);
      const Vec vc = restrict_to<double>(v, sup.complement());
      const double gap = evaluate(*r, vs) - evaluate(*r, vc);
      if (auto q = r->homogeneity_degree()) return gap / std::pow(norm_inf<double>(v), *q);
      return gap;
    }
  }
  return report.margin;
}

}  // namespace nsplab
