#include "nsplab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace nsplab {

std::string_view to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::unique: return "unique";
    case Uniqueness::tied: return "tied";
    case Uniqueness::unknown: return "unknown";
  }
  return "?";
}

nlohmann::json MinimizerReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["t_star"] = t_star;
  j["z_star"] = z_star;
  j["value"] = value;
  j["uniqueness"] = std::string(to_string(uniqueness));
  j["tied"] = tied;
  j["search_box"] = t_max;
  j["grid_resolution"] = grid_resolution;
  j["refinement_steps"] = refinement_steps;
  j["candidates"] = candidates;
  j["method"] = method;
  return j;
}

nlohmann::json TrialRecord::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["penalty"] = penalty;
  j["x"] = x;
  j["s"] = s;
  if (!matrix_id.empty()) j["matrix"] = matrix_id;
  j["success"] = success;
  j["value"] = value;
  j["error_inf"] = error;
  j["equal_height"] = equal_height;
  j["minimizer"] = minimizer.to_json();
  return j;
}

namespace {

struct Candidate {
  double value;
  Vec t;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.t < b.t;
}

// Hyperplane a . t = b in kernel coordinates; `zero` is the coordinate it
// forces to vanish, if any.
struct Plane {
  Vec a;
  double b;
  std::optional<std::size_t> zero;
};

class Objective {
 public:
  Objective(const PenaltySpec& r, const KernelBasis& k, std::span<const double> x)
      : r_(r), k_(k), x_(x.begin(), x.end()) {
    snap_ = 1e-15 * (1.0 + norm_inf<double>(x_));
  }

  Vec point(std::span<const double> t, std::span<const std::size_t> zeros = {}) const {
    Vec z(x_);
    for (std::size_t c = 0; c < t.size(); ++c)
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += k_.columns[c][i] * t[c];
    for (double& zi : z)
      if (std::abs(zi) <= snap_) zi = 0.0;
    for (std::size_t i : zeros) z[i] = 0.0;
    return z;
  }

  double operator()(std::span<const double> t) const {
    ++evaluations;
    buf_ = x_;
    for (std::size_t c = 0; c < t.size(); ++c) {
      const auto& col = k_.columns[c];
      const double tc = t[c];
      for (std::size_t i = 0; i < buf_.size(); ++i) buf_[i] += col[i] * tc;
    }
    return evaluate(r_, buf_);
  }

  double at_point(const Vec& z) const {
    ++evaluations;
    return evaluate(r_, z);
  }

  mutable std::size_t evaluations = 0;

 private:
  const PenaltySpec& r_;
  const KernelBasis& k_;
  Vec x_;
  double snap_;
  mutable Vec buf_;
};

// Solves the d x d system given by `rows` (d <= 3) with partial pivoting.
std::optional<Vec> solve(std::vector<Vec> m, Vec rhs) {
  const std::size_t d = rhs.size();
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    double scale = 0.0;
    for (double v : m[p]) scale = std::max(scale, std::abs(v));
    if (std::abs(m[p][c]) <= 1e-12 * std::max(scale, 1e-300)) return std::nullopt;
    std::swap(m[p], m[c]);
    std::swap(rhs[p], rhs[c]);
    for (std::size_t r = c + 1; r < d; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < d; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  Vec t(d);
  for (std::size_t c = d; c-- > 0;) {
    double acc = rhs[c];
    for (std::size_t k = c + 1; k < d; ++k) acc -= m[c][k] * t[k];
    t[c] = acc / m[c][c];
  }
  return t;
}

std::vector<Plane> arrangement(const PenaltySpec& r, const KernelBasis& k, std::span<const double> x,
                               double t_max) {
  const std::size_t d = k.dim(), n = k.ambient;
  auto row = [&](std::size_t i) {
    Vec a(d);
    for (std::size_t c = 0; c < d; ++c) a[c] = k.columns[c][i];
    return a;
  };
  auto negligible = [](const Vec& a) { return norm_inf<double>(a) <= 1e-12; };
  std::vector<Plane> planes;
  for (std::size_t i = 0; i < n; ++i) {
    Vec a = row(i);
    if (!negligible(a)) planes.push_back({a, -x[i], i});
  }
  if (r.order_dependent()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec ai = row(i), aj = row(j);
        Vec minus(d), plus(d);
        for (std::size_t c = 0; c < d; ++c) {
          minus[c] = ai[c] - aj[c];
          plus[c] = ai[c] + aj[c];
        }
        if (!negligible(minus)) planes.push_back({minus, x[j] - x[i], std::nullopt});
        if (!negligible(plus)) planes.push_back({plus, -x[i] - x[j], std::nullopt});
      }
  }
  if (d == 1) {
    for (double knot : r.knots())
      for (std::size_t i = 0; i < n; ++i) {
        Vec a = row(i);
        if (negligible(a)) continue;
        planes.push_back({a, knot - x[i], std::nullopt});
        planes.push_back({a, -knot - x[i], std::nullopt});
      }
  }
  for (std::size_t c = 0; c < d; ++c) {
    Vec e(d, 0.0);
    e[c] = 1.0;
    planes.push_back({e, t_max, std::nullopt});
    planes.push_back({e, -t_max, std::nullopt});
  }
  return planes;
}

void enumerate_vertices(const Objective& phi, const std::vector<Plane>& planes, std::size_t d, double t_max,
                        std::vector<Candidate>& pool) {
  std::vector<std::size_t> pick(d);
  const double limit = t_max * (1.0 + 1e-12);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
    if (depth == d) {
      std::vector<Vec> m;
      Vec rhs;
      for (std::size_t p : pick) {
        m.push_back(planes[p].a);
        rhs.push_back(planes[p].b);
      }
      auto t = solve(std::move(m), std::move(rhs));
      if (!t) return;
      for (double& tc : *t) {
        if (std::abs(tc) > limit) return;
        tc = std::clamp(tc, -t_max, t_max);
      }
      std::vector<std::size_t> zeros;
      for (std::size_t p : pick)
        if (planes[p].zero) zeros.push_back(*planes[p].zero);
      const Vec z = phi.point(*t, zeros);
      pool.push_back({phi.at_point(z), std::move(*t)});
      return;
    }
    for (std::size_t p = start; p < planes.size(); ++p) {
      pick[depth] = p;
      rec(depth + 1, p + 1);
    }
  };
  rec(0, 0);
}

double golden_min(const Objective& phi, double a, double b, std::size_t& steps, Vec& arg) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double t) { return phi(Vec{t}); };
  double c = b - inv_phi * (b - a), dd = a + inv_phi * (b - a);
  double fc = f(c), fd = f(dd);
  const double width = 1e-14 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  while (b - a > width && steps < 1000000) {
    ++steps;
    if (fc < fd) {
      b = dd;
      dd = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = dd;
      fc = fd;
      dd = a + inv_phi * (b - a);
      fd = f(dd);
    }
  }
  arg = Vec{fc < fd ? c : dd};
  return std::min(fc, fd);
}

// Coarse grid over the box, then `levels` rounds of refinement around the
// best `top` points, each round shrinking the spacing fivefold.
void grid_search(const Objective& phi, std::size_t d, double t_max, std::size_t n, std::size_t top,
                 std::size_t levels, std::vector<Candidate>& pool, std::size_t& steps) {
  if (n < 2) return;
  auto worse = [](const Candidate& a, const Candidate& b) { return candidate_less(a, b); };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> best(worse);
  auto offer = [&](const Vec& t) {
    const double v = phi(t);
    if (best.size() < top) {
      best.push({v, t});
    } else if (v < best.top().value) {
      best.pop();
      best.push({v, t});
    }
  };
  double h = 2.0 * t_max / static_cast<double>(n - 1);
  std::vector<std::size_t> idx(d, 0);
  Vec t(d);
  for (;;) {
    for (std::size_t c = 0; c < d; ++c) t[c] = -t_max + h * static_cast<double>(idx[c]);
    offer(t);
    std::size_t c = 0;
    while (c < d && ++idx[c] == n) idx[c++] = 0;
    if (c == d) break;
  }
  constexpr int kSub = 5;
  for (std::size_t level = 0; level < levels; ++level) {
    std::vector<Candidate> centers;
    while (!best.empty()) {
      centers.push_back(best.top());
      best.pop();
    }
    for (const auto& cen : centers) best.push(cen);
    const double hs = h / kSub;
    for (const auto& cen : centers) {
      std::vector<int> off(d, -kSub);
      for (;;) {
        Vec t(cen.t);
        bool moved = false;
        for (std::size_t c = 0; c < d; ++c) {
          t[c] = std::clamp(t[c] + hs * off[c], -t_max, t_max);
          moved = moved || off[c] != 0;
        }
        if (moved) offer(t);
        std::size_t c = 0;
        while (c < d && ++off[c] > kSub) off[c++] = -kSub;
        if (c == d) break;
      }
    }
    h = hs;
    ++steps;
  }
  while (!best.empty()) {
    pool.push_back(best.top());
    best.pop();
  }
}

}  // namespace

MinimizerReport minimize_over_affine(const PenaltySpec& r, const KernelBasis& k, std::span<const double> x,
                                     const MinimizerOptions& opts) {
  if (x.size() != k.ambient) throw InputError("x has length " + std::to_string(x.size()) +
                                              ", kernel ambient dimension is " + std::to_string(k.ambient));
  if (!all_finite(x)) throw InputError("x must be finite");
  const std::size_t d = k.dim();
  if (d > 3) throw InputError("kernel dimension " + std::to_string(d) + " is above the supported maximum of 3");
  MinimizerReport rep;
  rep.t_max = opts.t_max.value_or(4.0 * (1.0 + norm1(x)));
  if (!(rep.t_max > 0.0) || !std::isfinite(rep.t_max)) throw InputError("search box must be positive");
  Objective phi(r, k, x);
  if (d == 0) {
    rep.z_star.assign(x.begin(), x.end());
    rep.value = evaluate(r, x);
    rep.method = "trivial";
    rep.candidates = 1;
    return rep;
  }

  std::vector<Candidate> pool;
  pool.push_back({evaluate(r, x), Vec(d, 0.0)});
  const auto planes = arrangement(r, k, x, rep.t_max);
  enumerate_vertices(phi, planes, d, rep.t_max, pool);

  if (d == 1) {
    rep.method = "breakpoint-scan";
    Vec ts;
    for (const auto& c : pool) ts.push_back(c.t[0]);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      Vec arg;
      const double v = golden_min(phi, ts[i], ts[i + 1], rep.refinement_steps, arg);
      pool.push_back({v, std::move(arg)});
    }
  } else {
    rep.method = "vertex-enumeration";
    rep.grid_resolution = opts.grid.value_or(d == 2 ? 401 : 101);
    if (rep.grid_resolution > 0) {
      rep.method += "+grid";
      const std::size_t top = opts.top_cells.value_or(d == 2 ? 32 : 64);
      grid_search(phi, d, rep.t_max, rep.grid_resolution, top, opts.levels, pool, rep.refinement_steps);
    }
  }
  rep.candidates = pool.size();

  std::sort(pool.begin(), pool.end(), candidate_less);
  const Candidate& best = pool.front();
  rep.t_star = best.t;
  rep.value = best.value;
  const bool at_origin = std::all_of(best.t.begin(), best.t.end(), [](double v) { return v == 0.0; });
  rep.z_star = at_origin ? Vec(x.begin(), x.end()) : phi.point(best.t);

  const double value_tol = opts.tie_value_tol * std::max(1.0, std::abs(best.value));
  const double radius = 10.0 * opts.tol_zero;
  std::vector<const Vec*> reps{&best.t};
  for (const auto& c : pool) {
    if (c.value > best.value + value_tol) break;
    const bool near = std::any_of(reps.begin(), reps.end(), [&](const Vec* t) {
      double dist = 0.0;
      for (std::size_t i = 0; i < d; ++i) dist = std::max(dist, std::abs(c.t[i] - (*t)[i]));
      return dist <= radius;
    });
    if (!near) {
      reps.push_back(&c.t);
      rep.tied.push_back(phi.point(c.t));
    }
  }
  if (!rep.tied.empty()) {
    rep.uniqueness = Uniqueness::tied;
  } else if (std::any_of(best.t.begin(), best.t.end(),
                         [&](double v) { return std::abs(v) >= rep.t_max * (1.0 - 1e-9); })) {
    rep.uniqueness = Uniqueness::unknown;
  }
  return rep;
}

bool recovery_succeeded(std::span<const double> x, const MinimizerReport& m) {
  if (m.uniqueness == Uniqueness::tied) return false;
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(m.z_star[i] - x[i]));
  return err <= 1e-6 * (1.0 + norm_inf<double>(x));
}

TrialRecord recover_trial(const PenaltySpec& r, const KernelBasis& k, std::span<const double> x,
                          const MinimizerOptions& opts, std::string matrix_id) {
  TrialRecord rec;
  rec.penalty = r.to_string();
  rec.x.assign(x.begin(), x.end());
  rec.s = support_of(x, opts.tol_zero).size();
  rec.matrix_id = std::move(matrix_id);
  rec.equal_height = is_equal_height(x, opts.tol_zero);
  rec.minimizer = minimize_over_affine(r, orthonormalized(k), x, opts);
  rec.value = rec.minimizer.value;
  for (std::size_t i = 0; i < x.size(); ++i)
    rec.error = std::max(rec.error, std::abs(rec.minimizer.z_star[i] - x[i]));
  rec.success = recovery_succeeded(x, rec.minimizer);
  return rec;
}

TrialRecord recover_trial(const PenaltySpec& r, const Matrix& a, std::span<const double> x,
                          const MinimizerOptions& opts, std::string matrix_id) {
  if (a.cols() != x.size())
    throw InputError("matrix has " + std::to_string(a.cols()) + " columns, x has length " +
                     std::to_string(x.size()));
  return recover_trial(r, nullspace_basis(a, opts.tol_zero), x, opts, std::move(matrix_id));
}

}  // namespace nsplab
