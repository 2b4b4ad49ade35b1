#include "framecheck/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "framecheck/constructions.hpp"
#include "framecheck/eigen.hpp"

namespace framecheck {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Box-Muller, spelled out so seeded runs are reproducible across standard
// library implementations.
std::vector<double> gaussian_unit(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; i += 2) {
    double u1 = uniform01(rng);
    while (u1 <= 1e-300) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i] = r * std::cos(2.0 * M_PI * u2);
    if (i + 1 < n) v[i + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  const double s = norm(v);
  if (s < 1e-12) return gaussian_unit(rng, n);
  return scaled_vec(v, 1.0 / s);
}

// Scales v by a power of two until its squared norm is within a factor of
// sixteen of the target; keeps exact witnesses from degenerating in the
// float view.
std::vector<Rational> balance_to(const Rational& target_nsq, std::vector<Rational> v) {
  Rational nsq = dot(v, v);
  if (nsq == 0 || target_nsq == 0) return v;
  while (nsq * 16 < target_nsq) {
    for (auto& c : v) c *= 2;
    nsq *= 4;
  }
  while (nsq > target_nsq * 16) {
    for (auto& c : v) c /= 2;
    nsq /= 4;
  }
  return v;
}

template <typename T>
WitnessPair make_pair_witness(const std::vector<T>& u, const std::vector<T>& v) {
  WitnessPair w;
  if constexpr (std::is_same_v<T, Rational>) {
    ScaledVec ex, ey;
    ex.coords = vec_add(u, v);
    ey.coords = vec_sub(u, v);
    w.exact_x = ex;
    w.exact_y = ey;
    w.x = ex.to_double_vec();
    w.y = ey.to_double_vec();
  } else {
    w.x = vec_add(u, v);
    w.y = vec_sub(u, v);
  }
  return w;
}

template <typename T>
WitnessPair make_xy_witness(const std::vector<T>& x, const std::vector<T>& y) {
  WitnessPair w;
  if constexpr (std::is_same_v<T, Rational>) {
    ScaledVec ex, ey;
    ex.coords = x;
    ey.coords = y;
    w.exact_x = ex;
    w.exact_y = ey;
    w.x = ex.to_double_vec();
    w.y = ey.to_double_vec();
  } else {
    w.x = x;
    w.y = y;
  }
  return w;
}

template <typename T>
Mat<T> stacked_rows(const std::vector<std::vector<T>>& rows, std::size_t n) {
  Mat<T> m(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

// All stored basis vectors of all members, as rows.
template <typename T>
Mat<T> stacked_bases(const SubspaceFamily<T>& fam) {
  std::vector<std::vector<T>> rows;
  for (const auto& w : fam.members)
    for (std::size_t j = 0; j < w.dim(); ++j) rows.push_back(w.basis.col(j));
  return stacked_rows(rows, fam.dim_ambient);
}


std::string format_objective(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

template <typename T>
void must_replay(const SubspaceFamily<T>& fam, const WitnessPair& w, bool phase, const char* rule,
                 const Tolerance& tol) {
  const auto rep = replay_projection_witness(fam, w, phase, ReplayThresholds{}, tol);
  if (!rep.ok)
    throw std::logic_error(std::string("internal witness verification failed in rule ") + rule);
}

}  // namespace

template <typename T>
std::vector<Mat<T>> projections_of(const SubspaceFamily<T>& fam, const Tolerance& tol) {
  std::vector<Mat<T>> out;
  out.reserve(fam.count());
  for (const auto& w : fam.members) out.push_back(projection_of(w, tol));
  return out;
}

template <typename T>
void fill_projection_measurements(const SubspaceFamily<T>& fam, WitnessPair& w, const Tolerance& tol) {
  const auto projs = projections_of(fam, tol);
  w.measurements.clear();
  w.exact_measurements_sq.clear();
  for (const auto& p : projs) {
    // |P x| through the projected vector: the quadratic form x'Px loses
    // half the significand near zero.
    const Mat<double> pd = to_double(p);
    const double mx = norm(mat_vec(pd, w.x));
    const double my = norm(mat_vec(pd, w.y));
    w.measurements.push_back({mx, my});
  }
  if constexpr (std::is_same_v<T, Rational>) {
    if (w.exact()) {
      for (const auto& p : projs) {
        const Rational mx = w.exact_x->scale_sq * dot(w.exact_x->coords, mat_vec(p, w.exact_x->coords));
        const Rational my = w.exact_y->scale_sq * dot(w.exact_y->coords, mat_vec(p, w.exact_y->coords));
        w.exact_measurements_sq.push_back({mx, my});
      }
    }
  }
}

template <typename T>
ReplayReport replay_projection_witness(const SubspaceFamily<T>& fam, const WitnessPair& w, bool phase,
                                       const ReplayThresholds& thr, const Tolerance& tol) {
  ReplayReport rep;
  const auto projs = projections_of(fam, tol);
  const double scale = std::max({norm(w.x), norm(w.y), 1e-300});
  for (const auto& p : projs) {
    const Mat<double> pd = to_double(p);
    const double mx = norm(mat_vec(pd, w.x));
    const double my = norm(mat_vec(pd, w.y));
    rep.max_measurement_diff = std::max(rep.max_measurement_diff, std::abs(mx - my) / scale);
  }
  rep.measurements_equal = rep.max_measurement_diff <= thr.measurement_rel;
  if (phase) {
    rep.gap = std::min(norm(vec_sub(w.x, w.y)), norm(vec_add(w.x, w.y))) / scale;
  } else {
    rep.gap = std::abs(norm(w.x) - norm(w.y)) / scale;
  }
  rep.conclusion_violated = rep.gap >= thr.gap_rel;

  if constexpr (std::is_same_v<T, Rational>) {
    if (w.exact()) {
      rep.exact_checked = true;
      bool all_equal = true;
      for (const auto& p : projs) {
        const Rational mx = w.exact_x->scale_sq * dot(w.exact_x->coords, mat_vec(p, w.exact_x->coords));
        const Rational my = w.exact_y->scale_sq * dot(w.exact_y->coords, mat_vec(p, w.exact_y->coords));
        if (mx != my) all_equal = false;
      }
      rep.measurements_equal = all_equal;
      if (phase) {
        if (w.exact_x->scale_sq == w.exact_y->scale_sq) {
          const auto diff = vec_sub(w.exact_x->coords, w.exact_y->coords);
          const auto sum = vec_add(w.exact_x->coords, w.exact_y->coords);
          rep.conclusion_violated = !is_zero_vec(diff) && !is_zero_vec(sum);
        }
        // Different scales keep the float distance check.
      } else {
        rep.conclusion_violated = w.exact_x->norm_sq() != w.exact_y->norm_sq();
      }
    }
  }
  rep.ok = rep.measurements_equal && rep.conclusion_violated;
  return rep;
}

template <typename T>
DimensionSumOutcome<T> nr_dimension_sum_test(const SubspaceFamily<T>& fam, const Tolerance& tol) {
  DimensionSumOutcome<T> out;
  std::size_t total = 0;
  for (const auto& w : fam.members) total += w.dim();
  if (total >= fam.dim_ambient) {
    out.pass = true;
    return out;
  }
  const Mat<T> kernel = nullspace(stacked_bases(fam), tol);
  if (kernel.cols() == 0) throw std::logic_error("dimension-sum failure without a kernel vector");
  out.pass = false;
  out.witness = kernel.col(0);
  if constexpr (std::is_same_v<T, double>) {
    out.witness = scaled_vec(out.witness, 1.0 / norm(out.witness));
  }
  return out;
}

template <typename T>
CertificateSearch<T> identity_certificate(const SubspaceFamily<T>& fam, const Tolerance& tol) {
  const std::size_t n = fam.dim_ambient;
  const std::size_t m = fam.count();
  const auto projs = projections_of(fam, tol);
  const std::size_t eqs = n * (n + 1) / 2;
  Mat<T> a(eqs, m);
  std::vector<T> b(eqs, T(0));
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j, ++row) {
      for (std::size_t k = 0; k < m; ++k) a(row, k) = projs[k](i, j);
      b[row] = i == j ? T(1) : T(0);
    }
  const auto sol = solve_linear(a, b, tol);
  CertificateSearch<T> out;
  out.residual = sol.residual;
  if (sol.kind == SolveKind::Infeasible) return out;

  // Verify by reconstruction before reporting a certificate.
  Mat<T> rebuilt(n, n);
  for (std::size_t k = 0; k < m; ++k) rebuilt = rebuilt + scaled(projs[k], sol.x0[k]);
  if constexpr (std::is_same_v<T, Rational>) {
    if (!(rebuilt == Mat<Rational>::identity(n))) return out;
  } else {
    if (frobenius(rebuilt - Mat<double>::identity(n)) > 1e-9 * std::sqrt(static_cast<double>(n)))
      return out;
  }
  out.found = true;
  out.coefficients = sol.x0;
  return out;
}

template <typename T>
ComplementCertificate<T> complement_identity_certificate(const SubspaceFamily<T>& fam,
                                                         const std::vector<T>& a, const Tolerance& tol) {
  const std::size_t n = fam.dim_ambient;
  if (a.size() != fam.count())
    throw std::invalid_argument("complement_identity_certificate: coefficient count mismatch");
  const auto projs = projections_of(fam, tol);
  Mat<T> rebuilt(n, n);
  for (std::size_t k = 0; k < fam.count(); ++k) rebuilt = rebuilt + scaled(projs[k], a[k]);
  T suma(0);
  for (const auto& x : a) suma += x;
  if constexpr (std::is_same_v<T, Rational>) {
    if (!(rebuilt == Mat<Rational>::identity(n)))
      throw std::invalid_argument("complement_identity_certificate: coefficients do not rebuild I");
    if (suma == 1) return {};
  } else {
    if (frobenius(rebuilt - Mat<double>::identity(n)) > 1e-9 * std::sqrt(static_cast<double>(n)))
      throw std::invalid_argument("complement_identity_certificate: coefficients do not rebuild I");
    if (std::abs(suma - 1.0) <= 1e-10) return {};
  }

  ComplementCertificate<T> out;
  out.applicable = true;
  const T alpha = suma - T(1);
  out.coefficients.reserve(a.size());
  for (const auto& x : a) out.coefficients.push_back(x / alpha);

  Mat<T> comp(n, n);
  const Mat<T> eye = Mat<T>::identity(n);
  for (std::size_t k = 0; k < fam.count(); ++k)
    comp = comp + scaled(eye - projs[k], out.coefficients[k]);
  if constexpr (std::is_same_v<T, Rational>) {
    if (!(comp == eye)) throw std::logic_error("complement certificate failed verification");
  } else {
    if (frobenius(comp - eye) > 1e-8 * std::sqrt(static_cast<double>(n)))
      throw std::logic_error("complement certificate failed verification");
  }
  return out;
}

template <typename T>
PooledNrResult<T> pooled_necessary_nr_test(const SubspaceFamily<T>& fam, const Tolerance& tol,
                                           std::size_t max_enum) {
  const auto pooled = pooled_basis(fam);
  if (pooled.count() > max_enum)
    throw EnumerationGuard("pooled basis of " + std::to_string(pooled.count()) +
                           " vectors exceeds the enumeration cap of " + std::to_string(max_enum));
  const auto verdict = norm_retrieval_vectors(pooled, tol, max_enum);
  PooledNrResult<T> out;
  if (verdict.status == Status::YesExact) {
    out.outcome = PooledOutcome::Pass;
    return out;
  }
  if (verdict.status == Status::NoWithWitness && verdict.witness) {
    WitnessPair w = *verdict.witness;
    fill_projection_measurements(fam, w, tol);
    const auto rep = replay_projection_witness(fam, w, /*phase=*/false, ReplayThresholds{}, tol);
    if (rep.ok) {
      out.outcome = PooledOutcome::Fail;
      out.witness = w;
      return out;
    }
  }
  out.outcome = PooledOutcome::Inconclusive;
  return out;
}

template <typename T>
bool nr_spanning_check(const SubspaceFamily<T>& fam, const std::vector<T>& x, const Tolerance& tol) {
  if (is_zero_vec(x)) throw std::invalid_argument("nr_spanning_check: x must be nonzero");
  const auto projs = projections_of(fam, tol);
  std::vector<std::vector<T>> cols;
  for (const auto& p : projs) cols.push_back(mat_vec(p, x));
  const Mat<T> span_m = Mat<T>::from_columns(cols);
  const std::size_t r0 = rank(span_m, tol);
  cols.push_back(x);
  return rank(Mat<T>::from_columns(cols), tol) == r0;
}

template <typename T>
bool pr_spanning_check(const SubspaceFamily<T>& fam, const std::vector<T>& x, const Tolerance& tol) {
  if (is_zero_vec(x)) throw std::invalid_argument("pr_spanning_check: x must be nonzero");
  const auto projs = projections_of(fam, tol);
  std::vector<std::vector<T>> cols;
  for (const auto& p : projs) cols.push_back(mat_vec(p, x));
  return rank(Mat<T>::from_columns(cols), tol) == fam.dim_ambient;
}

namespace {

std::vector<std::vector<double>> deterministic_starts(const SubspaceFamily<double>& fam,
                                                      const Tolerance& tol) {
  const std::size_t n = fam.dim_ambient;
  std::vector<std::vector<double>> starts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    starts.push_back(e);
  }
  for (const auto& w : fam.members)
    for (std::size_t j = 0; j < w.dim(); ++j) starts.push_back(w.basis.col(j));
  // Complement directions too: the constructive failure witnesses live in perps.
  for (const auto& w : fam.members) {
    const auto c = complement(w, tol);
    for (std::size_t j = 0; j < c.dim(); ++j) starts.push_back(c.basis.col(j));
  }
  return starts;
}

}  // namespace

SearchOutcome nr_counterexample_search(const SubspaceFamily<double>& fam, const SearchParams& params,
                                       const Tolerance& tol) {
  params.validate();
  SearchOutcome out;
  const std::size_t n = fam.dim_ambient;
  const auto projs = projections_of(fam, tol);
  std::mt19937_64 rng(params.seed);
  const double candidate_threshold = 3.0 * params.witness_margin;

  auto objective = [&](const std::vector<double>& u, std::vector<double>& residual,
                       std::size_t& span_rank) {
    std::vector<std::vector<double>> cols;
    for (const auto& p : projs) cols.push_back(mat_vec(p, u));
    const auto q = orthonormalize(Mat<double>::from_columns(cols), tol).basis;
    span_rank = q.cols();
    residual = u;
    for (std::size_t j = 0; j < q.cols(); ++j)
      residual = axpy(-dot(residual, q.col(j)), q.col(j), residual);
    return norm(residual);
  };

  auto try_candidate = [&](const std::vector<double>& u, const std::vector<double>& residual) {
    const std::vector<double> v = scaled_vec(residual, 1.0 / norm(residual));
    WitnessPair w = make_pair_witness(u, v);
    fill_projection_measurements(fam, w, tol);
    const auto rep = replay_projection_witness(fam, w, /*phase=*/false, ReplayThresholds{}, tol);
    if (rep.ok) out.witness = w;
  };

  const auto starts = deterministic_starts(fam, tol);
  for (std::size_t s = 0; s < starts.size() + params.starts && !out.witness; ++s) {
    std::vector<double> u = s < starts.size() ? starts[s] : gaussian_unit(rng, n);
    const double nu = norm(u);
    if (nu < 1e-12) continue;
    u = scaled_vec(u, 1.0 / nu);
    ++out.starts_used;

    std::vector<double> residual;
    std::size_t base_rank = 0;
    double obj = objective(u, residual, base_rank);
    out.best_objective = std::max(out.best_objective, obj);
    if (obj >= candidate_threshold) {
      try_candidate(u, residual);
      if (out.witness) break;
    }
    // Ascent on |(I - Pi_U) u|^2 with U frozen per step; a rank change of
    // span{P_i u} invalidates the local model, so fall back to the next
    // start when it happens.
    for (std::size_t it = 1; it < params.max_iter; ++it) {
      if (norm(residual) < 1e-14) break;
      std::vector<double> next = vec_add(u, residual);
      const double nn = norm(next);
      if (nn < 1e-12) break;
      next = scaled_vec(next, 1.0 / nn);
      std::vector<double> next_residual;
      std::size_t next_rank = 0;
      const double next_obj = objective(next, next_residual, next_rank);
      if (next_rank != base_rank) break;
      if (next_obj <= obj + 1e-15) break;
      u = next;
      residual = next_residual;
      obj = next_obj;
      out.best_objective = std::max(out.best_objective, obj);
      if (obj >= candidate_threshold) {
        try_candidate(u, residual);
        if (out.witness) break;
      }
    }
  }
  return out;
}

SearchOutcome pr_counterexample_search(const SubspaceFamily<double>& fam, const SearchParams& params,
                                       const Tolerance& tol) {
  params.validate();
  SearchOutcome out;
  out.best_objective = std::numeric_limits<double>::infinity();
  const std::size_t n = fam.dim_ambient;
  const auto projs = projections_of(fam, tol);
  std::mt19937_64 rng(params.seed);

  auto min_pair = [&](const std::vector<double>& u) {
    // Smallest eigenpair of A^T A, A having rows (P_i u)^T; its value is
    // min over unit v of sum <P_i u, v>^2.
    Mat<double> ata(n, n);
    for (const auto& p : projs) {
      const auto pu = mat_vec(p, u);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) ata(i, j) += pu[i] * pu[j];
    }
    const auto eig = symmetric_eigen(ata);
    return std::make_pair(std::max(eig.values.back(), 0.0), eig.vectors.col(n - 1));
  };

  auto try_candidate = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double f = 0.0;
    for (const auto& p : projs) {
      const double ip = dot(mat_vec(p, u), v);
      f += ip * ip;
    }
    if (f > params.objective_floor) return;
    WitnessPair w = make_pair_witness(u, v);
    fill_projection_measurements(fam, w, tol);
    const auto rep = replay_projection_witness(fam, w, /*phase=*/true, ReplayThresholds{}, tol);
    if (rep.ok) out.witness = w;
  };

  const auto starts = deterministic_starts(fam, tol);
  for (std::size_t s = 0; s < starts.size() + params.starts && !out.witness; ++s) {
    std::vector<double> u = s < starts.size() ? starts[s] : gaussian_unit(rng, n);
    const double nu = norm(u);
    if (nu < 1e-12) continue;
    u = scaled_vec(u, 1.0 / nu);
    ++out.starts_used;

    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < params.max_iter; ++it) {
      const auto [f, v] = min_pair(u);
      out.best_objective = std::min(out.best_objective, f);
      if (f <= params.objective_floor) {
        try_candidate(u, v);
        break;
      }
      if (f >= prev - 1e-18) break;
      prev = f;
      u = v;  // alternate roles: the objective is symmetric in (u, v)
    }
  }
  if (!std::isfinite(out.best_objective)) out.best_objective = 0.0;
  return out;
}

namespace {

// Exact witness for hyperplanes of part of an orthogonal equal-norm set,
// with squared norms N and (N-1)^2 / (N-2).
std::optional<WitnessPair> onb_hyperplane_witness(const SubspaceFamily<Rational>& fam,
                                                  const Tolerance& tol) {
  const std::size_t n = fam.dim_ambient;
  const std::size_t m = fam.count();
  if (n < 3 || m < 2 || m > n - 1) return std::nullopt;
  std::vector<std::vector<Rational>> normals;
  for (const auto& w : fam.members) {
    if (w.dim() != n - 1) return std::nullopt;
    normals.push_back(complement(w, tol).basis.col(0));
  }
  const Rational h = dot(normals[0], normals[0]);
  for (std::size_t i = 0; i < m; ++i) {
    if (dot(normals[i], normals[i]) != h) return std::nullopt;
    for (std::size_t j = i + 1; j < m; ++j)
      if (dot(normals[i], normals[j]) != 0) return std::nullopt;
  }
  const Mat<Rational> kernel = nullspace(stacked_rows(normals, n), tol);
  const auto completion = orthonormalize(kernel, tol).basis;
  std::vector<std::vector<Rational>> units = normals;
  for (std::size_t j = 0; j < completion.cols(); ++j) {
    std::vector<Rational> w = completion.col(j);
    const auto rho = exact_sqrt(h / dot(w, w));
    if (!rho) return std::nullopt;  // no equal-norm rational completion
    units.push_back(scaled_vec(w, *rho));
  }
  std::vector<Rational> sum_all(n, Rational(0)), sum_head(n, Rational(0));
  for (std::size_t k = 0; k < units.size(); ++k) {
    sum_all = vec_add(sum_all, units[k]);
    if (k + 1 < units.size()) sum_head = vec_add(sum_head, units[k]);
  }
  WitnessPair w;
  ScaledVec ex, ey;
  ex.scale_sq = Rational(1) / h;
  ex.coords = sum_all;
  ey.scale_sq = Rational(static_cast<long>(n - 1)) / (Rational(static_cast<long>(n - 2)) * h);
  ey.coords = sum_head;
  w.exact_x = ex;
  w.exact_y = ey;
  w.x = ex.to_double_vec();
  w.y = ey.to_double_vec();
  fill_projection_measurements(fam, w, tol);
  return w;
}

// Exact witness for hyperplanes with independent equal-norm normals, built
// from the equimodular vector of the normals.
std::optional<WitnessPair> independent_hyperplane_witness(const SubspaceFamily<Rational>& fam,
                                                          const Tolerance& tol) {
  const std::size_t n = fam.dim_ambient;
  const std::size_t m = fam.count();
  if (m < 2 || m > n - 1) return std::nullopt;
  std::vector<std::vector<Rational>> normals;
  for (const auto& w : fam.members) {
    if (w.dim() != n - 1) return std::nullopt;
    normals.push_back(complement(w, tol).basis.col(0));
  }
  const Rational h = dot(normals[0], normals[0]);
  for (const auto& nv : normals)
    if (dot(nv, nv) != h) return std::nullopt;
  const Mat<Rational> cols = Mat<Rational>::from_columns(normals);
  if (rank(cols, tol) != m) return std::nullopt;
  const auto eq = equimodular_in_span(cols, tol);
  if (!eq) return std::nullopt;
  const Rational t = eq->modulus;
  const Mat<Rational> kernel = nullspace(stacked_rows(normals, n), tol);
  if (kernel.cols() == 0) return std::nullopt;
  const std::vector<Rational> x0 = balance_to(dot(eq->phi, eq->phi), kernel.col(0));
  const Rational g = dot(x0, x0);
  const Rational f = dot(eq->phi, eq->phi);
  const Rational gap = t * t / h;  // |y|^2 - |x|^2
  const Rational s_sq = Rational(1) + (f - gap) / g;
  if (s_sq <= 0 || s_sq == 1) return std::nullopt;

  WitnessPair w;
  ScaledVec ex, ey;
  ex.scale_sq = s_sq;
  ex.coords = x0;
  ey.scale_sq = 1;
  ey.coords = vec_add(x0, eq->phi);
  w.exact_x = ex;
  w.exact_y = ey;
  w.x = ex.to_double_vec();
  w.y = ey.to_double_vec();
  fill_projection_measurements(fam, w, tol);
  return w;
}

template <typename T>
bool all_rank_one(const SubspaceFamily<T>& fam) {
  for (const auto& w : fam.members)
    if (w.dim() != 1) return false;
  return true;
}

template <typename T>
FrameSpec<T> generating_vectors(const SubspaceFamily<T>& fam) {
  std::vector<std::vector<T>> cols;
  for (const auto& w : fam.members) cols.push_back(w.basis.col(0));
  return FrameSpec<T>::from_vectors(fam.dim_ambient, cols);
}

Certificate make_certificate(const std::vector<double>& coeffs, const std::string& description) {
  Certificate c;
  c.coefficients = coeffs;
  c.description = description;
  return c;
}

Certificate make_certificate(const std::vector<Rational>& coeffs, const std::string& description) {
  Certificate c;
  c.coefficients = to_double(coeffs);
  c.exact_coefficients = coeffs;
  c.description = description;
  return c;
}

}  // namespace

template <typename T>
Verdict decide_norm_retrieval_projections(const SubspaceFamily<T>& fam, const SearchParams& params,
                                          const Tolerance& tol) {
  params.validate();
  fam.validate(tol);
  Verdict vd;
  vd.diagnostics["seed"] = std::to_string(params.seed);

  const auto ds = nr_dimension_sum_test(fam, tol);
  if (!ds.pass) {
    const std::vector<T> zero(fam.dim_ambient, T(0));
    WitnessPair w = make_xy_witness(ds.witness, zero);
    fill_projection_measurements(fam, w, tol);
    must_replay(fam, w, false, "dimension-sum", tol);
    vd.status = Status::NoWithWitness;
    vd.rule = "dimension-sum";
    vd.witness = w;
    vd.diagnostics["dimension-sum"] = "fail";
    return vd;
  }
  vd.diagnostics["dimension-sum"] = "pass";

  if (all_rank_one(fam)) {
    const auto vectors = generating_vectors(fam);
    const auto vv = norm_retrieval_vectors(vectors, tol, params.max_enum);
    if (vv.status == Status::YesExact) {
      vd.status = Status::YesExact;
      vd.rule = "rank-one-partition-orthogonality";
      Certificate c;
      c.description = "complement spans of every split of the generating vectors are orthogonal";
      vd.certificate = c;
      return vd;
    }
    if (vv.status == Status::NoWithWitness && vv.witness) {
      WitnessPair w = *vv.witness;
      fill_projection_measurements(fam, w, tol);
      must_replay(fam, w, false, "rank-one-partition-orthogonality", tol);
      vd.status = Status::NoWithWitness;
      vd.rule = "rank-one-partition-orthogonality";
      vd.witness = w;
      return vd;
    }
    vd.diagnostics["rank-one"] = "inconclusive at tolerance boundary";
  }

  const auto cert = identity_certificate(fam, tol);
  if (cert.found) {
    vd.status = Status::YesExact;
    vd.rule = "identity-certificate";
    vd.certificate = make_certificate(cert.coefficients, "coefficients with sum a_i P_i = I");
    return vd;
  }
  vd.diagnostics["identity-certificate"] = "not-in-span";

  if constexpr (std::is_same_v<T, Rational>) {
    if (auto w = onb_hyperplane_witness(fam, tol)) {
      must_replay(fam, *w, false, "orthonormal-hyperplane-witness", tol);
      vd.status = Status::NoWithWitness;
      vd.rule = "orthonormal-hyperplane-witness";
      vd.witness = *w;
      return vd;
    }
    if (auto w = independent_hyperplane_witness(fam, tol)) {
      must_replay(fam, *w, false, "independent-hyperplane-witness", tol);
      vd.status = Status::NoWithWitness;
      vd.rule = "independent-hyperplane-witness";
      vd.witness = *w;
      return vd;
    }
  }

  const auto pooled = pooled_necessary_nr_test(fam, tol, params.max_enum);
  if (pooled.outcome == PooledOutcome::Fail) {
    vd.status = Status::NoWithWitness;
    vd.rule = "pooled-basis-failure";
    vd.witness = pooled.witness;
    return vd;
  }
  vd.diagnostics["pooled-necessary"] =
      pooled.outcome == PooledOutcome::Pass ? "pass (necessary-only)" : "inconclusive";

  const auto so = nr_counterexample_search(to_double(fam), params, tol);
  vd.diagnostics["search-starts"] = std::to_string(so.starts_used);
  vd.diagnostics["search-max-iter"] = std::to_string(params.max_iter);
  vd.diagnostics["search-best-objective"] = format_objective(so.best_objective);
  vd.diagnostics["witness-margin"] = format_objective(params.witness_margin);
  if (so.witness) {
    vd.status = Status::NoWithWitness;
    vd.rule = "counterexample-search";
    vd.witness = so.witness;
    return vd;
  }
  vd.status = Status::ProbablyYes;
  vd.rule = "search-exhausted";
  return vd;
}

template <typename T>
Verdict decide_phase_retrieval_projections(const SubspaceFamily<T>& fam, const SearchParams& params,
                                           const Tolerance& tol) {
  params.validate();
  fam.validate(tol);
  const std::size_t n = fam.dim_ambient;
  const std::size_t m = fam.count();
  Verdict vd;
  vd.diagnostics["seed"] = std::to_string(params.seed);

  if (all_rank_one(fam)) {
    const auto vectors = generating_vectors(fam);
    const auto cp = complement_property(vectors, tol, params.max_enum);
    if (cp.status == Status::YesExact) {
      vd.status = Status::YesExact;
      vd.rule = "rank-one-complement-property";
      Certificate c;
      c.description = "every split of the generating vectors leaves one side spanning";
      vd.certificate = c;
      return vd;
    }
    WitnessPair w = *cp.witness;
    fill_projection_measurements(fam, w, tol);
    must_replay(fam, w, true, "rank-one-complement-property", tol);
    vd.status = Status::NoWithWitness;
    vd.rule = "rank-one-complement-property";
    vd.witness = w;
    return vd;
  }

  // Necessary spanning conditions: for every |I| <= N-2 the complements of
  // the remaining members must span the space.
  if (m > params.max_enum)
    throw EnumerationGuard("phase retrieval subset checks exceed the enumeration cap of " +
                           std::to_string(params.max_enum));
  std::vector<Subspace<T>> complements;
  for (const auto& w : fam.members) complements.push_back(complement(w, tol));
  const auto projs = projections_of(fam, tol);

  auto spanning_failure = [&](const std::vector<std::size_t>& inside) -> std::optional<WitnessPair> {
    std::vector<bool> in(m, false);
    for (auto i : inside) in[i] = true;
    std::vector<std::vector<T>> rows;
    for (std::size_t i = 0; i < m; ++i)
      if (!in[i])
        for (std::size_t j = 0; j < complements[i].dim(); ++j)
          rows.push_back(complements[i].basis.col(j));
    const Mat<T> stacked = stacked_rows(rows, n);
    if (rank(stacked, tol) == n) return std::nullopt;
    const Mat<T> kernel = nullspace(stacked, tol);
    std::vector<T> x = kernel.col(0);
    std::vector<std::vector<T>> prows;
    for (const auto& p : projs) prows.push_back(mat_vec(p, x));
    const Mat<T> pk = nullspace(stacked_rows(prows, n), tol);
    if (pk.cols() == 0) throw std::logic_error("spanning failure without an orthogonal direction");
    std::vector<T> v = pk.col(0);
    if constexpr (std::is_same_v<T, Rational>) {
      v = balance_to(dot(x, x), v);
    } else {
      x = scaled_vec(x, 1.0 / norm(x));
      v = scaled_vec(v, 1.0 / norm(v));
    }
    WitnessPair w = make_pair_witness(x, v);
    fill_projection_measurements(fam, w, tol);
    return w;
  };

  const std::size_t max_size = std::min(m, n >= 2 ? n - 2 : std::size_t{0});
  for (std::size_t size = 0; size <= max_size; ++size) {
    std::vector<std::size_t> subset(size);
    for (std::size_t i = 0; i < size; ++i) subset[i] = i;
    bool more = true;
    while (more) {
      if (auto w = spanning_failure(subset)) {
        must_replay(fam, *w, true, "complement-span-gap", tol);
        vd.status = Status::NoWithWitness;
        vd.rule = "complement-span-gap";
        vd.witness = *w;
        vd.diagnostics["failing-subset-size"] = std::to_string(size);
        return vd;
      }
      if (size == 0) break;
      std::size_t i = size;
      more = false;
      while (i-- > 0) {
        if (subset[i] < m - size + i) {
          ++subset[i];
          for (std::size_t j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
          more = true;
          break;
        }
      }
    }
  }
  vd.diagnostics["complement-span-checks"] = "pass";

  const auto so = pr_counterexample_search(to_double(fam), params, tol);
  vd.diagnostics["search-starts"] = std::to_string(so.starts_used);
  vd.diagnostics["search-max-iter"] = std::to_string(params.max_iter);
  vd.diagnostics["search-best-objective"] = format_objective(so.best_objective);
  if (so.witness) {
    vd.status = Status::NoWithWitness;
    vd.rule = "counterexample-search";
    vd.witness = so.witness;
    return vd;
  }
  vd.status = Status::ProbablyYes;
  vd.rule = "search-exhausted";
  return vd;
}

template <typename T>
SubspaceFamily<T> perp_family(const SubspaceFamily<T>& fam, const Tolerance& tol) {
  SubspaceFamily<T> out;
  out.dim_ambient = fam.dim_ambient;
  for (const auto& w : fam.members) out.members.push_back(complement(w, tol));
  return out;
}

template std::vector<Mat<double>> projections_of<double>(const SubspaceFamily<double>&, const Tolerance&);
template std::vector<Mat<Rational>> projections_of<Rational>(const SubspaceFamily<Rational>&, const Tolerance&);
template void fill_projection_measurements<double>(const SubspaceFamily<double>&, WitnessPair&, const Tolerance&);
template void fill_projection_measurements<Rational>(const SubspaceFamily<Rational>&, WitnessPair&, const Tolerance&);
template ReplayReport replay_projection_witness<double>(const SubspaceFamily<double>&, const WitnessPair&, bool, const ReplayThresholds&, const Tolerance&);
template ReplayReport replay_projection_witness<Rational>(const SubspaceFamily<Rational>&, const WitnessPair&, bool, const ReplayThresholds&, const Tolerance&);
template DimensionSumOutcome<double> nr_dimension_sum_test<double>(const SubspaceFamily<double>&, const Tolerance&);
template DimensionSumOutcome<Rational> nr_dimension_sum_test<Rational>(const SubspaceFamily<Rational>&, const Tolerance&);
template CertificateSearch<double> identity_certificate<double>(const SubspaceFamily<double>&, const Tolerance&);
template CertificateSearch<Rational> identity_certificate<Rational>(const SubspaceFamily<Rational>&, const Tolerance&);
template ComplementCertificate<double> complement_identity_certificate<double>(const SubspaceFamily<double>&, const std::vector<double>&, const Tolerance&);
template ComplementCertificate<Rational> complement_identity_certificate<Rational>(const SubspaceFamily<Rational>&, const std::vector<Rational>&, const Tolerance&);
template PooledNrResult<double> pooled_necessary_nr_test<double>(const SubspaceFamily<double>&, const Tolerance&, std::size_t);
template PooledNrResult<Rational> pooled_necessary_nr_test<Rational>(const SubspaceFamily<Rational>&, const Tolerance&, std::size_t);
template bool nr_spanning_check<double>(const SubspaceFamily<double>&, const std::vector<double>&, const Tolerance&);
template bool nr_spanning_check<Rational>(const SubspaceFamily<Rational>&, const std::vector<Rational>&, const Tolerance&);
template bool pr_spanning_check<double>(const SubspaceFamily<double>&, const std::vector<double>&, const Tolerance&);
template bool pr_spanning_check<Rational>(const SubspaceFamily<Rational>&, const std::vector<Rational>&, const Tolerance&);
template Verdict decide_norm_retrieval_projections<double>(const SubspaceFamily<double>&, const SearchParams&, const Tolerance&);
template Verdict decide_norm_retrieval_projections<Rational>(const SubspaceFamily<Rational>&, const SearchParams&, const Tolerance&);
template Verdict decide_phase_retrieval_projections<double>(const SubspaceFamily<double>&, const SearchParams&, const Tolerance&);
template Verdict decide_phase_retrieval_projections<Rational>(const SubspaceFamily<Rational>&, const SearchParams&, const Tolerance&);
template SubspaceFamily<double> perp_family<double>(const SubspaceFamily<double>&, const Tolerance&);
template SubspaceFamily<Rational> perp_family<Rational>(const SubspaceFamily<Rational>&, const Tolerance&);

}  // namespace framecheck
