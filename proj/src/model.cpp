#include "nsplab/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace nsplab {

template <class T>
BasicMatrix<T> BasicMatrix<T>::from_rows(const std::vector<std::vector<T>>& rows) {
  if (rows.empty() || rows.front().empty()) throw InputError("matrix must be at least 1x1");
  BasicMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InputError("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

template <class T>
std::vector<T> BasicMatrix<T>::multiply(std::span<const T> v) const {
  if (v.size() != cols_) throw InputError("matrix-vector dimension mismatch");
  std::vector<T> out(rows_, T(0));
  for (std::size_t i = 0; i < rows_; ++i) {
    T acc(0);
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

template class BasicMatrix<double>;
template class BasicMatrix<Rational>;

Matrix to_double(const ExactMatrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

template <class T>
std::vector<T> BasicKernelBasis<T>::combine(std::span<const T> coords) const {
  if (coords.size() != columns.size()) throw InputError("kernel coordinate dimension mismatch");
  std::vector<T> out(ambient, T(0));
  for (std::size_t k = 0; k < columns.size(); ++k)
    for (std::size_t i = 0; i < ambient; ++i) out[i] += columns[k][i] * coords[k];
  return out;
}

template struct BasicKernelBasis<double>;
template struct BasicKernelBasis<Rational>;

KernelBasis to_double(const ExactKernelBasis& k) {
  KernelBasis out;
  out.ambient = k.ambient;
  out.mode = ScalarMode::floating_point();
  for (const auto& c : k.columns) out.columns.push_back(to_double(c));
  return out;
}

KernelBasis orthonormalized(const KernelBasis& k) {
  KernelBasis out = k;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t a = 0; a < out.columns.size(); ++a) {
      auto& col = out.columns[a];
      for (std::size_t b = 0; b < a; ++b) {
        const auto& prev = out.columns[b];
        const double dot = std::inner_product(col.begin(), col.end(), prev.begin(), 0.0);
        for (std::size_t i = 0; i < col.size(); ++i) col[i] -= dot * prev[i];
      }
      const double nrm = std::sqrt(std::inner_product(col.begin(), col.end(), col.begin(), 0.0));
      if (nrm == 0.0) throw ContractError("kernel basis columns are linearly dependent");
      for (double& x : col) x /= nrm;
    }
  }
  return out;
}

namespace {

template <class T>
std::vector<std::vector<T>> rows_of(const BasicMatrix<T>& a) {
  std::vector<std::vector<T>> rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) rows[i].assign(a.row(i).begin(), a.row(i).end());
  return rows;
}

// Reduced row echelon form with partial pivoting. Returns pivot columns; the
// rows are reduced in place so row k has a unit pivot at pivot_cols[k].
template <class T>
std::vector<std::size_t> rref(std::vector<std::vector<T>>& m, double tol_zero) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m.front().size() : 0;
  std::vector<double> scale(rows, 0.0);
  if constexpr (!is_exact_v<T>) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (const T& v : m[i]) {
        if (!std::isfinite(v)) throw InputError("matrix has a non-finite entry");
        scale[i] = std::max(scale[i], std::abs(v));
      }
    }
  }
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    for (std::size_t i = r + 1; i < rows; ++i)
      if (abs_value(m[i][c]) > abs_value(m[best][c])) best = i;
    if constexpr (is_exact_v<T>) {
      if (m[best][c] == 0) continue;
    } else {
      if (std::abs(m[best][c]) <= tol_zero * std::max(scale[best], 1e-300)) continue;
    }
    std::swap(m[r], m[best]);
    std::swap(scale[r], scale[best]);
    const T pivot = m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const T factor = m[i][c];
      if (factor == 0) continue;
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
      m[i][c] = T(0);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
BasicKernelBasis<T> nullspace_impl(const BasicMatrix<T>& a, double tol_zero, ScalarMode mode) {
  auto m = rows_of(a);
  const auto pivots = rref(m, tol_zero);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  BasicKernelBasis<T> basis;
  basis.ambient = n;
  basis.mode = mode;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(n, T(0));
    v[f] = T(1);
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -m[k][f];
    basis.columns.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

KernelBasis nullspace_basis(const Matrix& a, double tol_zero) {
  return nullspace_impl(a, tol_zero, ScalarMode::floating_point(tol_zero));
}

ExactKernelBasis nullspace_basis(const ExactMatrix& a) {
  return nullspace_impl(a, 0.0, ScalarMode::exact_rational());
}

std::size_t rank(const Matrix& a, double tol_zero) {
  auto m = rows_of(a);
  return rref(m, tol_zero).size();
}

std::size_t rank(const ExactMatrix& a) {
  auto m = rows_of(a);
  return rref(m, 0.0).size();
}

SupportSet::SupportSet(std::vector<std::size_t> indices, std::size_t ambient)
    : indices_(std::move(indices)), ambient_(ambient) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] >= ambient_) throw InputError("support index out of range");
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw InputError("support indices must be strictly increasing");
  }
}

SupportSet SupportSet::from_one_based(const std::vector<std::size_t>& indices, std::size_t ambient) {
  std::vector<std::size_t> zero_based;
  for (auto i : indices) {
    if (i == 0 || i > ambient) throw InputError("support index out of range");
    zero_based.push_back(i - 1);
  }
  std::sort(zero_based.begin(), zero_based.end());
  if (std::adjacent_find(zero_based.begin(), zero_based.end()) != zero_based.end())
    throw InputError("duplicate support index");
  return SupportSet(std::move(zero_based), ambient);
}

SupportSet SupportSet::full(std::size_t ambient) {
  std::vector<std::size_t> all(ambient);
  std::iota(all.begin(), all.end(), 0);
  return SupportSet(std::move(all), ambient);
}

bool SupportSet::contains(std::size_t i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

SupportSet SupportSet::complement() const {
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < ambient_; ++i)
    if (!contains(i)) rest.push_back(i);
  return SupportSet(std::move(rest), ambient_);
}

std::vector<std::size_t> SupportSet::one_based() const {
  std::vector<std::size_t> out;
  for (auto i : indices_) out.push_back(i + 1);
  return out;
}

std::string SupportSet::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(indices_[k] + 1);
  }
  return out + "}";
}

SupportSet support_of(std::span<const double> z, double tol_zero) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (std::abs(z[i]) > tol_zero) idx.push_back(i);
  return SupportSet(std::move(idx), z.size());
}

SupportSet support_of(std::span<const Rational> z) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] != 0) idx.push_back(i);
  return SupportSet(std::move(idx), z.size());
}

bool is_equal_height(std::span<const double> z, double tol_zero) {
  double lo = INFINITY;
  double hi = 0.0;
  for (double v : z) {
    const double a = std::abs(v);
    if (a <= tol_zero) continue;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (hi == 0.0) return true;
  return hi - lo <= tol_zero * hi;
}

bool is_equal_height(std::span<const Rational> z) {
  const Rational* first = nullptr;
  Rational ref;
  for (const auto& v : z) {
    if (v == 0) continue;
    const Rational a = abs_value(v);
    if (!first) {
      ref = a;
      first = &v;
    } else if (a != ref) {
      return false;
    }
  }
  return true;
}

template <class T>
std::vector<std::size_t> magnitude_order(std::span<const T> z) {
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return abs_value(z[a]) > abs_value(z[b]);
  });
  return order;
}

template std::vector<std::size_t> magnitude_order<double>(std::span<const double>);
template std::vector<std::size_t> magnitude_order<Rational>(std::span<const Rational>);

Vec sorted_magnitudes(std::span<const double> z) {
  Vec out;
  for (auto i : magnitude_order(z)) out.push_back(std::abs(z[i]));
  return out;
}

ExactVec sorted_magnitudes(std::span<const Rational> z) {
  ExactVec out;
  for (auto i : magnitude_order(z)) out.push_back(abs_value(z[i]));
  return out;
}

template <class T>
std::vector<T> restrict_to(std::span<const T> z, const SupportSet& s) {
  if (s.ambient() != z.size()) throw InputError("support ambient dimension mismatch");
  std::vector<T> out(z.size(), T(0));
  for (auto i : s.indices()) out[i] = z[i];
  return out;
}

template std::vector<double> restrict_to<double>(std::span<const double>, const SupportSet&);
template std::vector<Rational> restrict_to<Rational>(std::span<const Rational>, const SupportSet&);

template <class T>
T norm_inf(std::span<const T> z) {
  T m(0);
  for (const auto& v : z) m = std::max<T>(m, abs_value(v));
  return m;
}

template double norm_inf<double>(std::span<const double>);
template Rational norm_inf<Rational>(std::span<const Rational>);

double norm1(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += std::abs(v);
  return s;
}

bool all_finite(std::span<const double> z) {
  return std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); });
}

ExactMatrix read_matrix(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.size() < 2) throw InputError("matrix file: missing 'm N' header");
  auto parse_dim = [](const std::string& t) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(t, &pos);
    } catch (const std::exception&) {
      throw InputError("matrix file: bad dimension '" + t + "'");
    }
    if (pos != t.size() || v < 1) throw InputError("matrix file: bad dimension '" + t + "'");
    return static_cast<std::size_t>(v);
  };
  const std::size_t m = parse_dim(tokens[0]);
  const std::size_t n = parse_dim(tokens[1]);
  if (tokens.size() != 2 + m * n)
    throw InputError("matrix file: expected " + std::to_string(m * n) + " entries, found " +
                     std::to_string(tokens.size() - 2));
  ExactMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = parse_rational(tokens[2 + i * n + j]);
  return a;
}

ExactMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

ExactMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return read_matrix(in);
}

ExactVec parse_vector(std::string_view text) {
  ExactVec out;
  std::string tok;
  auto flush = [&] {
    if (!tok.empty()) out.push_back(parse_rational(tok));
    tok.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      tok += c;
    }
  }
  flush();
  if (out.empty()) throw InputError("empty vector");
  return out;
}

Vec to_double(const ExactVec& v) {
  Vec out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace nsplab
