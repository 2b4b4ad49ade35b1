#include "framecheck/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace framecheck {

namespace {

double entry_magnitude(double x) { return std::abs(x); }
double entry_magnitude(const Rational& x) { return std::abs(to_double(x)); }

// Pivot threshold for float elimination; exact mode pivots on any nonzero.
template <typename T>
double pivot_threshold(const Mat<T>& m, const Tolerance& tol) {
  if constexpr (std::is_same_v<T, Rational>) {
    (void)m;
    (void)tol;
    return 0.0;
  } else {
    double mx = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) mx = std::max(mx, std::abs(m(i, j)));
    return tol.rank_rel * mx * static_cast<double>(std::max(m.rows(), m.cols()));
  }
}

template <typename T>
bool below_threshold(const T& x, double thr) {
  if constexpr (std::is_same_v<T, Rational>) {
    (void)thr;
    return x == 0;
  } else {
    return std::abs(x) <= thr;
  }
}

// Row echelon reduction in place. Deterministic pivoting: largest
// magnitude in the column, lowest row index on ties. Returns pivot
// (row, col) pairs.
template <typename T>
std::vector<std::pair<std::size_t, std::size_t>> eliminate(Mat<T>& m, double thr) {
  std::vector<std::pair<std::size_t, std::size_t>> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t best = r;
    double best_mag = entry_magnitude(m(r, c));
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      const double mag = entry_magnitude(m(i, c));
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (below_threshold(m(best, c), thr)) {
      for (std::size_t i = r; i < m.rows(); ++i) m(i, c) = T(0);
      continue;
    }
    if (best != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(best, j));
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == T(0)) continue;
      const T f = m(i, c) / m(r, c);
      m(i, c) = T(0);
      for (std::size_t j = c + 1; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.emplace_back(r, c);
    ++r;
  }
  return pivots;
}

// Fraction-free rank over the rationals: clear denominators per row, then
// Bareiss elimination over big integers.
std::size_t rank_exact_bareiss(const Mat<Rational>& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  if (rows == 0 || cols == 0) return 0;
  std::vector<std::vector<BigInt>> a(rows, std::vector<BigInt>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    BigInt lcm = 1;
    for (std::size_t j = 0; j < cols; ++j) {
      const BigInt d = denominator(m(i, j));
      lcm = lcm / gcd(lcm, d) * d;
    }
    for (std::size_t j = 0; j < cols; ++j)
      a[i][j] = numerator(m(i, j)) * (lcm / denominator(m(i, j)));
  }
  BigInt prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    BigInt best_mag = abs(a[r][c]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      BigInt mag = abs(a[i][c]);
      if (mag > best_mag) {
        best_mag = mag;
        best = i;
      }
    }
    if (best_mag == 0) continue;
    if (best != r) std::swap(a[r], a[best]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j)
        a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) / prev;
      a[i][c] = 0;
    }
    prev = a[r][c];
    ++r;
  }
  return r;
}

}  // namespace

template <typename T>
std::size_t rank(const Mat<T>& m, const Tolerance& tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  if constexpr (std::is_same_v<T, Rational>) {
    (void)tol;
    return rank_exact_bareiss(m);
  } else {
    Mat<T> work = m;
    return eliminate(work, pivot_threshold(m, tol)).size();
  }
}

template <typename T>
Mat<T> rref(Mat<T> m, const Tolerance& tol, std::vector<std::size_t>* pivot_cols) {
  const double thr = pivot_threshold(m, tol);
  const auto pivots = eliminate(m, thr);
  // Back-substitute to reduced form with unit pivots.
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    const auto [pr, pc] = *it;
    const T p = m(pr, pc);
    for (std::size_t j = pc; j < m.cols(); ++j) m(pr, j) /= p;
    for (std::size_t i = 0; i < pr; ++i) {
      const T f = m(i, pc);
      if (f == T(0)) continue;
      m(i, pc) = T(0);
      for (std::size_t j = pc + 1; j < m.cols(); ++j) m(i, j) -= f * m(pr, j);
    }
  }
  if (pivot_cols) {
    pivot_cols->clear();
    for (const auto& [pr, pc] : pivots) pivot_cols->push_back(pc);
  }
  return m;
}

template <typename T>
Mat<T> nullspace(const Mat<T>& m, const Tolerance& tol) {
  const std::size_t n = m.cols();
  if (m.rows() == 0) {
    // Kernel of the empty map is the whole space.
    return Mat<T>::identity(n);
  }
  std::vector<std::size_t> pivot_cols;
  const Mat<T> r = rref(m, tol, &pivot_cols);
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<T>> kernel_cols;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(n, T(0));
    v[f] = T(1);
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -r(k, f);
    if constexpr (std::is_same_v<T, Rational>) v = primitive_integer_vector(v);
    kernel_cols.push_back(std::move(v));
  }
  if (kernel_cols.empty()) return Mat<T>(n, 0);
  return Mat<T>::from_columns(kernel_cols);
}

template <typename T>
OrthoBasis<T> orthonormalize(const Mat<T>& columns, const Tolerance& tol) {
  OrthoBasis<T> out;
  out.unit = !std::is_same_v<T, Rational>;
  std::vector<std::vector<T>> basis;
  for (std::size_t j = 0; j < columns.cols(); ++j) {
    std::vector<T> v = columns.col(j);
    if constexpr (std::is_same_v<T, Rational>) {
      for (const auto& q : basis) v = axpy(-(dot(v, q) / dot(q, q)), q, v);
      if (!is_zero_vec(v)) basis.push_back(primitive_integer_vector(v));
    } else {
      const double orig = norm(v);
      if (orig == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) v = axpy(-dot(v, q), q, v);
      const double rnorm = norm(v);
      if (rnorm <= tol.orth_rel * orig * static_cast<double>(std::max<std::size_t>(columns.rows(), 1)))
        continue;
      basis.push_back(scaled_vec(v, 1.0 / rnorm));
    }
  }
  out.basis = basis.empty() ? Mat<T>(columns.rows(), 0) : Mat<T>::from_columns(basis);
  return out;
}

template <typename T>
LinearSolution<T> solve_linear(const Mat<T>& a, const std::vector<T>& b, const Tolerance& tol) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve_linear shape mismatch");
  LinearSolution<T> sol;
  const std::size_t n = a.cols();
  if constexpr (std::is_same_v<T, Rational>) {
    Mat<T> aug(a.rows(), n + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
      aug(i, n) = b[i];
    }
    std::vector<std::size_t> pivot_cols;
    const Mat<T> r = rref(aug, tol, &pivot_cols);
    for (auto c : pivot_cols)
      if (c == n) {
        sol.kind = SolveKind::Infeasible;
        // Report how badly the float least-squares fails, for diagnostics.
        const auto ls = solve_linear(to_double(a), to_double(b), tol);
        sol.residual = ls.residual;
        return sol;
      }
    sol.x0.assign(n, T(0));
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) sol.x0[pivot_cols[k]] = r(k, n);
    sol.kernel = nullspace(a, tol);
    sol.kind = sol.kernel.cols() == 0 ? SolveKind::Unique : SolveKind::Affine;
    sol.residual = 0.0;
    return sol;
  } else {
    // Least squares through the normal equations; small dense systems only.
    const Mat<T> at = a.transposed();
    const Mat<T> ata = at * a;
    const std::vector<T> atb = mat_vec(at, b);
    // Solve ata x = atb by elimination with the float threshold; the
    // system is consistent by construction, free variables get zero.
    Mat<T> aug(n, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) aug(i, j) = ata(i, j);
      aug(i, n) = atb[i];
    }
    std::vector<std::size_t> pivot_cols;
    const Mat<T> r = rref(aug, tol, &pivot_cols);
    sol.x0.assign(n, T(0));
    for (std::size_t k = 0; k < pivot_cols.size(); ++k)
      if (pivot_cols[k] < n) sol.x0[pivot_cols[k]] = r(k, n);
    const std::vector<T> res = vec_sub(mat_vec(a, sol.x0), b);
    sol.residual = norm(res);
    double scale = norm(b);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    const double thr = tol.rank_rel * std::max(1.0, scale) * static_cast<double>(std::max(a.rows(), n));
    if (sol.residual > thr) {
      sol.kind = SolveKind::Infeasible;
      return sol;
    }
    sol.kernel = nullspace(a, tol);
    sol.kind = sol.kernel.cols() == 0 ? SolveKind::Unique : SolveKind::Affine;
    return sol;
  }
}

template <typename T>
Mat<T> inverse(const Mat<T>& m, const Tolerance& tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = m.rows();
  Mat<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  std::vector<std::size_t> pivot_cols;
  const Mat<T> r = rref(aug, tol, &pivot_cols);
  std::size_t rank_left = 0;
  for (auto c : pivot_cols)
    if (c < n) ++rank_left;
  if (rank_left < n) throw std::domain_error("singular matrix");
  Mat<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
  return inv;
}

std::vector<Rational> primitive_integer_vector(const std::vector<Rational>& v) {
  BigInt lcm = 1;
  for (const auto& x : v) {
    const BigInt d = denominator(x);
    lcm = lcm / gcd(lcm, d) * d;
  }
  std::vector<BigInt> ints(v.size());
  BigInt g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    ints[i] = numerator(v[i]) * (lcm / denominator(v[i]));
    g = gcd(g, ints[i]);
  }
  if (g == 0) return std::vector<Rational>(v.size(), Rational(0));
  int sign = 0;
  for (const auto& x : ints)
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  std::vector<Rational> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rational(ints[i] / g * sign);
  return out;
}

template std::size_t rank<double>(const Mat<double>&, const Tolerance&);
template std::size_t rank<Rational>(const Mat<Rational>&, const Tolerance&);
template Mat<double> rref<double>(Mat<double>, const Tolerance&, std::vector<std::size_t>*);
template Mat<Rational> rref<Rational>(Mat<Rational>, const Tolerance&, std::vector<std::size_t>*);
template Mat<double> nullspace<double>(const Mat<double>&, const Tolerance&);
template Mat<Rational> nullspace<Rational>(const Mat<Rational>&, const Tolerance&);
template OrthoBasis<double> orthonormalize<double>(const Mat<double>&, const Tolerance&);
template OrthoBasis<Rational> orthonormalize<Rational>(const Mat<Rational>&, const Tolerance&);
template LinearSolution<double> solve_linear<double>(const Mat<double>&, const std::vector<double>&, const Tolerance&);
template LinearSolution<Rational> solve_linear<Rational>(const Mat<Rational>&, const std::vector<Rational>&, const Tolerance&);
template Mat<double> inverse<double>(const Mat<double>&, const Tolerance&);
template Mat<Rational> inverse<Rational>(const Mat<Rational>&, const Tolerance&);

}  // namespace framecheck
