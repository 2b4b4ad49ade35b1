#include "framecheck/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "framecheck/linalg.hpp"

namespace framecheck {

namespace {

// Least squares restricted to the passive columns; zeros elsewhere.
std::vector<double> restricted_ls(const Mat<double>& a, const std::vector<double>& b,
                                  const std::vector<std::size_t>& passive, const Tolerance& tol) {
  Mat<double> ap(a.rows(), passive.size());
  for (std::size_t k = 0; k < passive.size(); ++k)
    for (std::size_t i = 0; i < a.rows(); ++i) ap(i, k) = a(i, passive[k]);
  const auto sol = solve_linear(ap, b, tol);
  std::vector<double> z(a.cols(), 0.0);
  for (std::size_t k = 0; k < passive.size(); ++k) z[passive[k]] = sol.x0[k];
  return z;
}

}  // namespace

NnlsResult nonnegative_feasibility(const Mat<double>& a, const std::vector<double>& b,
                                   const Tolerance& tol) {
  if (a.rows() != b.size()) throw std::invalid_argument("nonnegative_feasibility shape mismatch");
  const std::size_t n = a.cols();
  const double bnorm = norm(b);
  const double wtol = 1e-12 * std::max(1.0, max_abs(a) * std::max(bnorm, 1.0));

  std::vector<double> c(n, 0.0);
  std::vector<bool> in_passive(n, false);
  std::vector<std::size_t> passive;

  for (std::size_t outer = 0; outer < 4 * n + 16; ++outer) {
    const std::vector<double> resid = vec_sub(b, mat_vec(a, c));
    const std::vector<double> w = mat_vec(a.transposed(), resid);
    std::size_t best = n;
    double best_w = wtol;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_passive[j]) continue;
      if (w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best == n) break;
    in_passive[best] = true;
    passive.push_back(best);

    std::vector<double> z = restricted_ls(a, b, passive, tol);
    for (std::size_t inner = 0; inner < 4 * n + 16; ++inner) {
      double alpha = 1.0;
      bool all_pos = true;
      for (auto j : passive) {
        if (z[j] <= 0.0) {
          all_pos = false;
          const double denom = c[j] - z[j];
          if (denom > 0.0) alpha = std::min(alpha, c[j] / denom);
        }
      }
      if (all_pos) break;
      for (std::size_t j = 0; j < n; ++j) c[j] += alpha * (z[j] - c[j]);
      std::vector<std::size_t> kept;
      for (auto j : passive) {
        if (c[j] <= 1e-14 * std::max(1.0, bnorm)) {
          in_passive[j] = false;
          c[j] = 0.0;
        } else {
          kept.push_back(j);
        }
      }
      passive = kept;
      if (passive.empty()) {
        z.assign(n, 0.0);
        break;
      }
      z = restricted_ls(a, b, passive, tol);
    }
    c = z;
    for (std::size_t j = 0; j < n; ++j)
      if (c[j] < 0.0) c[j] = 0.0;
  }

  NnlsResult out;
  out.coefficients = c;
  out.residual = norm(vec_sub(mat_vec(a, c), b));
  if (out.residual <= 1e-8 * std::max(bnorm, 1e-300)) {
    out.feasible = true;
    return out;
  }
  if (bnorm == 0.0) {
    // b = 0 is always reachable by c = 0.
    out.feasible = true;
    out.coefficients.assign(n, 0.0);
    out.residual = 0.0;
    return out;
  }

  // Farkas separator: at the NNLS optimum y = b - Ac has A'y <= 0 and
  // y'b = |y|^2 + c'A'y = |y|^2 > 0.
  std::vector<double> y = vec_sub(b, mat_vec(a, c));
  const std::vector<double> aty = mat_vec(a.transposed(), y);
  const double slack = 1e-7 * std::max(1.0, max_abs(a)) * norm(y);
  for (double g : aty)
    if (g > slack) throw std::runtime_error("nonnegative_feasibility: certificate verification failed");
  if (dot(y, b) <= 0.0)
    throw std::runtime_error("nonnegative_feasibility: certificate verification failed");
  out.feasible = false;
  out.farkas = y;
  return out;
}

}  // namespace framecheck
