#include "framecheck/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "framecheck/eigen.hpp"
#include "framecheck/retrieval.hpp"

namespace framecheck {

namespace {

Mat<double> analysis_matrix(const FrameSpec<double>& f) {
  Mat<double> t(f.count(), f.dim);
  for (std::size_t i = 0; i < f.count(); ++i)
    for (std::size_t j = 0; j < f.dim; ++j) t(i, j) = f.vectors(j, i);
  return t;
}

std::vector<Rational> unit_axis(std::size_t n, std::size_t i) {
  std::vector<Rational> e(n, Rational(0));
  e[i] = 1;
  return e;
}

Subspace<Rational> hyperplane(std::size_t n, const std::vector<Rational>& normal, const Tolerance& tol) {
  Mat<Rational> row(1, n);
  for (std::size_t j = 0; j < n; ++j) row(0, j) = normal[j];
  return Subspace<Rational>::from_spanning(n, nullspace(row, tol), tol);
}

Mat<double> rotation_about(std::size_t n, std::size_t a, std::size_t b, double angle) {
  Mat<double> r = Mat<double>::identity(n);
  r(a, a) = std::cos(angle);
  r(b, b) = std::cos(angle);
  r(a, b) = -std::sin(angle);
  r(b, a) = std::sin(angle);
  return r;
}

}  // namespace

NaimarkEmbedding naimark_embed(const FrameSpec<double>& parseval, const Tolerance& tol) {
  const std::size_t n = parseval.dim;
  const std::size_t m = parseval.count();
  const Mat<double> s = frame_operator(parseval);
  const double deviation = frobenius(s - Mat<double>::identity(n));
  if (deviation > 1e-9 * std::sqrt(static_cast<double>(n)))
    throw std::invalid_argument("naimark_embed requires a Parseval frame; |S - I| = " +
                                std::to_string(deviation));

  const Mat<double> t = analysis_matrix(parseval);  // M x N, orthonormal columns
  Mat<double> extended(m, n + m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) extended(i, j) = t(i, j);
    extended(i, n + i) = 1.0;
  }
  NaimarkEmbedding out;
  out.ambient = m;
  out.basis = orthonormalize(extended, tol).basis;
  if (out.basis.cols() != m) throw std::logic_error("naimark basis extension failed");
  out.projection = t * t.transposed();
  out.image_frame = parseval;

  const Mat<double>& p = out.projection;
  if (frobenius(p * p - p) > 1e-9 * std::max(1.0, frobenius(p)))
    throw std::logic_error("naimark projection is not idempotent");
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) trace += p(i, i);
  if (std::abs(trace - static_cast<double>(n)) > 1e-8)
    throw std::logic_error("naimark projection has the wrong rank");
  for (std::size_t i = 0; i < m; ++i) {
    // P e_i must be the embedded copy T phi_i of the i-th frame vector.
    const std::vector<double> pei = p.col(i);
    const std::vector<double> tphi = mat_vec(t, parseval.vec(i));
    if (norm(vec_sub(pei, tphi)) > 1e-9 * std::max(1.0, norm(tphi)))
      throw std::logic_error("naimark embedding does not reproduce the frame");
  }
  return out;
}

NaimarkEmbedding naimark_embed(const FrameSpec<Rational>& parseval, const Tolerance& tol) {
  const Mat<Rational> s = frame_operator(parseval);
  if (!(s == Mat<Rational>::identity(parseval.dim)))
    throw std::invalid_argument("naimark_embed requires a Parseval frame (S != I exactly)");
  return naimark_embed(to_double(parseval), tol);
}

template <typename T>
CompletionResult bessel_to_parseval_completion(const FrameSpec<T>& f, const Tolerance& tol) {
  const std::size_t n = f.dim;
  const std::size_t m = f.count();
  if (m < n)
    throw std::invalid_argument("completion needs at least dim vectors (cannot fit the tail)");
  const Mat<double> s = to_double(frame_operator(f));
  const auto eig = symmetric_eigen(s);
  const double lmax = eig.values.front();
  if (lmax <= 0.0) throw std::invalid_argument("completion requires a nonzero family");
  const double scale = 1.0 / std::sqrt(lmax);

  std::vector<std::vector<double>> vectors;
  for (std::size_t i = 0; i < m; ++i) vectors.push_back(scaled_vec(to_double(f.vec(i)), scale));
  for (std::size_t j = 1; j < n; ++j) {
    const double lam = eig.values[j] / lmax;
    const double coeff = std::sqrt(std::max(0.0, 1.0 - lam));
    vectors.push_back(scaled_vec(eig.vectors.col(j), coeff));
  }
  while (vectors.size() < 2 * m - 1) vectors.push_back(std::vector<double>(n, 0.0));

  CompletionResult out;
  out.scale = scale;
  out.frame = FrameSpec<double>::from_vectors(n, vectors);
  const Mat<double> check = frame_operator(out.frame);
  if (frobenius(check - Mat<double>::identity(n)) > 1e-9 * std::sqrt(static_cast<double>(n)))
    throw std::logic_error("completion did not produce a Parseval frame");
  (void)tol;
  return out;
}

template <typename T>
bool naimark_nr_tail_check(const FrameSpec<T>& f, const std::vector<double>& x,
                           const std::vector<double>& y, const Tolerance& tol) {
  const auto completed = bessel_to_parseval_completion(f, tol);
  const std::size_t m = f.count();
  const auto& frame = completed.frame;
  const double scale = std::max({norm(x), norm(y), 1e-300});

  std::vector<double> cx(frame.count()), cy(frame.count());
  for (std::size_t i = 0; i < frame.count(); ++i) {
    cx[i] = dot(x, frame.vec(i));
    cy[i] = dot(y, frame.vec(i));
  }
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(std::abs(cx[i]) - std::abs(cy[i])) > 1e-9 * scale) return true;  // vacuous

  double tail_x = 0.0, tail_y = 0.0;
  for (std::size_t i = m; i < frame.count(); ++i) {
    tail_x += cx[i] * cx[i];
    tail_y += cy[i] * cy[i];
  }
  return std::abs(std::sqrt(tail_x) - std::sqrt(tail_y)) <= 1e-9 * scale;
}

template <typename T>
std::optional<Equimodular<T>> equimodular_in_span(const Mat<T>& columns, const Tolerance& tol) {
  const std::size_t m = columns.cols();
  if (m == 0) return std::nullopt;
  if (rank(columns, tol) != m) return std::nullopt;

  std::vector<T> phi = columns.col(0);
  T t = dot(phi, phi);
  std::vector<std::vector<T>> processed = {columns.col(0)};
  for (std::size_t k = 1; k < m; ++k) {
    const std::vector<T> nk = columns.col(k);
    // psi: component of n_k orthogonal to the previous columns.
    std::vector<T> psi = nk;
    const auto gs = orthonormalize(Mat<T>::from_columns(processed), tol).basis;
    for (std::size_t j = 0; j < gs.cols(); ++j) {
      const auto q = gs.col(j);
      psi = axpy(-(dot(psi, q) / dot(q, q)), q, psi);
    }
    const T d = dot(psi, nk);  // = |psi|^2 > 0 by independence
    if constexpr (std::is_same_v<T, double>) {
      if (std::abs(d) < 1e-13) return std::nullopt;
    }
    const T a = dot(phi, nk);
    const T lam_plus = (t - a) / d;
    const T lam_minus = (-t - a) / d;
    T lam = lam_plus;
    const T ap = lam_plus < T(0) ? T(-lam_plus) : lam_plus;
    const T am = lam_minus < T(0) ? T(-lam_minus) : lam_minus;
    if (am < ap) {
      lam = lam_minus;
    } else if (am == ap) {
      lam = lam_plus > T(0) ? lam_plus : lam_minus;  // tie: positive root
    }
    phi = axpy(lam, psi, phi);
    processed.push_back(nk);
  }
  Equimodular<T> out;
  out.phi = phi;
  out.modulus = t;
  return out;
}

template <typename T>
Equimodular<T> equimodular_vector(const FrameSpec<T>& f, const Tolerance& tol) {
  if (f.count() != f.dim)
    throw std::invalid_argument("equimodular_vector expects exactly dim vectors");
  auto eq = equimodular_in_span(f.vectors, tol);
  if (!eq) throw std::invalid_argument("equimodular_vector requires independent vectors");
  if constexpr (std::is_same_v<T, double>) {
    for (std::size_t i = 0; i < f.count(); ++i) {
      const double err = std::abs(std::abs(dot(eq->phi, f.vec(i))) - eq->modulus);
      if (err > 1e-9 * std::max(1.0, eq->modulus))
        throw std::logic_error("equimodular construction drifted");
    }
  }
  return *eq;
}

WitnessPair independent_hyperplane_failure_witness(const FrameSpec<double>& unit_vectors,
                                                   const Tolerance& tol) {
  const std::size_t n = unit_vectors.dim;
  const std::size_t m = unit_vectors.count();
  if (m + 1 != n)
    throw std::invalid_argument("hyperplane failure witness expects dim-1 vectors");
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(norm(unit_vectors.vec(i)) - 1.0) > 1e-9)
      throw std::invalid_argument("hyperplane failure witness expects unit vectors");
  if (rank(unit_vectors.vectors, tol) != m)
    throw std::invalid_argument("hyperplane failure witness expects independent vectors");

  Mat<double> rows(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) rows(i, j) = unit_vectors.vectors(j, i);
  const auto kernel = orthonormalize(nullspace(rows, tol), tol).basis;
  const std::vector<double> x = kernel.col(0);

  const auto eq = equimodular_in_span(unit_vectors.vectors, tol);
  if (!eq) throw std::invalid_argument("hyperplane failure witness expects independent vectors");
  const double phinorm = norm(eq->phi);
  const std::vector<double> phi_hat = scaled_vec(eq->phi, 1.0 / phinorm);
  const double c = eq->modulus / phinorm;  // common |<phi_hat, v_i>|

  // y = c x + phi_hat satisfies lambda^2 + (1 - c^2) mu^2 = 1 with mu = 1.
  const std::vector<double> y = axpy(1.0, phi_hat, scaled_vec(x, c));

  WitnessPair w;
  w.x = x;
  w.y = y;
  SubspaceFamily<double> fam;
  fam.dim_ambient = n;
  for (std::size_t i = 0; i < m; ++i) {
    Mat<double> row(1, n);
    for (std::size_t j = 0; j < n; ++j) row(0, j) = unit_vectors.vectors(j, i);
    fam.members.push_back(Subspace<double>::from_spanning(n, nullspace(row, tol), tol));
  }
  fill_projection_measurements(fam, w, tol);
  const auto rep = replay_projection_witness(fam, w, /*phase=*/false, ReplayThresholds{}, tol);
  if (!rep.ok) throw std::logic_error("hyperplane failure witness did not replay");
  return w;
}

ConstructionOutput construct_three_codim_one(std::size_t n) {
  if (n < 2) throw std::invalid_argument("three-codim-one needs dimension at least 2");
  Tolerance tol;
  SubspaceFamily<Rational> fam;
  fam.dim_ambient = n;
  std::vector<Rational> diff = unit_axis(n, 0);
  diff[1] = -1;
  fam.members = {hyperplane(n, unit_axis(n, 0), tol), hyperplane(n, unit_axis(n, 1), tol),
                 hyperplane(n, diff, tol)};
  ConstructionOutput out;
  out.name = "three-codim-one";
  out.exact_family = fam;
  if (n >= 3) out.expected["decide_nr"] = "ProbablyYes";
  return out;
}

ConstructionOutput construct_partition_ln(std::size_t n, const std::vector<std::size_t>& sizes) {
  if (n == 0) throw std::invalid_argument("partition-ln needs a positive dimension");
  std::size_t total = 0;
  for (auto k : sizes) {
    if (k == 0 || k > n)
      throw std::invalid_argument("partition-ln block sizes must be between 1 and dim");
    total += k;
  }
  if (total == 0 || total % n != 0)
    throw std::invalid_argument("partition-ln block sizes must sum to a multiple of dim");
  const std::size_t copies = total / n;

  Tolerance tol;
  SubspaceFamily<Rational> fam;
  fam.dim_ambient = n;
  std::size_t cursor = 0;
  for (auto k : sizes) {
    std::vector<std::vector<Rational>> cols;
    for (std::size_t j = 0; j < k; ++j) cols.push_back(unit_axis(n, (cursor + j) % n));
    cursor += k;
    fam.members.push_back(Subspace<Rational>::from_spanning(n, Mat<Rational>::from_columns(cols), tol));
  }
  ConstructionOutput out;
  out.name = "partition-ln";
  out.exact_family = fam;
  out.certificate = std::vector<Rational>(sizes.size(), Rational(1, static_cast<long>(copies)));
  out.expected["decide_nr"] = "YesExact";
  return out;
}

ConstructionOutput construct_k_plus_one(std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw std::invalid_argument("k-plus-one needs 1 <= k <= dim");
  Tolerance tol;
  SubspaceFamily<Rational> fam;
  fam.dim_ambient = n;
  std::vector<std::vector<Rational>> base_cols;
  for (std::size_t j = 0; j < n - k; ++j) base_cols.push_back(unit_axis(n, j));
  fam.members.push_back(base_cols.empty()
                            ? Subspace<Rational>::trivial(n)
                            : Subspace<Rational>::from_spanning(n, Mat<Rational>::from_columns(base_cols), tol));
  for (std::size_t i = 0; i < k; ++i) {
    auto cols = base_cols;
    cols.push_back(unit_axis(n, n - k + i));
    fam.members.push_back(Subspace<Rational>::from_spanning(n, Mat<Rational>::from_columns(cols), tol));
  }
  ConstructionOutput out;
  out.name = "k-plus-one";
  out.exact_family = fam;
  std::vector<Rational> cert(k + 1, Rational(1));
  cert[0] = Rational(1) - Rational(static_cast<long>(k));
  out.certificate = cert;
  out.expected["decide_nr"] = "YesExact";
  return out;
}

ConstructionOutput construct_hyperplane_family(const FrameSpec<Rational>& normals) {
  Tolerance tol;
  SubspaceFamily<Rational> fam;
  fam.dim_ambient = normals.dim;
  for (std::size_t i = 0; i < normals.count(); ++i) {
    if (is_zero_vec(normals.vec(i)))
      throw std::invalid_argument("hyperplane-family normals must be nonzero");
    fam.members.push_back(hyperplane(normals.dim, normals.vec(i), tol));
  }
  ConstructionOutput out;
  out.name = "hyperplane-family";
  out.exact_family = fam;
  return out;
}

ConstructionOutput construct_two_basis_pr() {
  Tolerance tol;
  for (int attempt = 0; attempt < 10; ++attempt) {
    // Two axis rotations are not enough: one rotated column would stay in a
    // coordinate plane of the first basis and break full spark, so a third
    // rotation joins the composition.
    const double bump = 0.01 * attempt;
    const Mat<double> rot = rotation_about(3, 0, 1, 1.0 + bump) *
                            rotation_about(3, 1, 2, std::sqrt(2.0) + bump) *
                            rotation_about(3, 0, 2, std::sqrt(3.0) + bump);
    std::vector<std::vector<double>> phis = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    std::vector<std::vector<double>> psis;
    for (int j = 0; j < 3; ++j) psis.push_back(rot.col(j));

    std::vector<std::vector<double>> all = phis;
    for (const auto& v : psis) all.push_back(v);
    const auto unionf = FrameSpec<double>::from_vectors(3, all);
    if (spark(unionf, tol) != 4) continue;  // need the union full spark

    SubspaceFamily<double> fam;
    fam.dim_ambient = 3;
    fam.members = {
        Subspace<double>::from_spanning(3, Mat<double>::from_columns({phis[0], phis[2]}), tol),
        Subspace<double>::from_spanning(3, Mat<double>::from_columns({phis[1], phis[2]}), tol),
        Subspace<double>::from_spanning(3, Mat<double>::from_columns({phis[2]}), tol),
        Subspace<double>::from_spanning(3, Mat<double>::from_columns({psis[0]}), tol),
        Subspace<double>::from_spanning(3, Mat<double>::from_columns({psis[1]}), tol)};
    ConstructionOutput out;
    out.name = "two-basis-pr";
    out.float_family = fam;
    out.expected["decide_pr"] = "ProbablyYes";
    out.expected["perp_decide_nr"] = "NoWithWitness";
    out.expected["perp_decide_pr"] = "NoWithWitness";
    return out;
  }
  throw std::logic_error("two-basis-pr: no full-spark rotation found");
}

ConstructionOutput construct_cone_example() {
  // Unit rational vectors with third coordinate at least 0.9; full spark is
  // verified at construction.
  const std::vector<std::vector<Rational>> vecs = {
      {Rational(4, 13), Rational(3, 13), Rational(12, 13)},
      {Rational(-3, 13), Rational(4, 13), Rational(12, 13)},
      {Rational(2, 15), Rational(-5, 15), Rational(14, 15)},
      {Rational(-5, 15), Rational(-2, 15), Rational(14, 15)},
      {Rational(1, 19), Rational(6, 19), Rational(18, 19)}};
  auto frame = FrameSpec<Rational>::from_vectors(3, vecs);
  Tolerance tol;
  if (spark(frame, tol) != 4) throw std::logic_error("cone example lost full spark");
  ConstructionOutput out;
  out.name = "cone-example";
  out.exact_frame = frame;
  out.expected["pr_vectors"] = "YesExact";
  out.expected["identity_certificate"] = "not-found";
  out.expected["scalability"] = "infeasible";
  return out;
}

ConstructionOutput construct_coordinate_multiplicity(std::size_t n,
                                                     const std::vector<std::vector<std::size_t>>& sets) {
  if (n == 0 || sets.empty())
    throw std::invalid_argument("coordinate-multiplicity needs a dimension and index sets");
  std::vector<std::size_t> counts(n, 0);
  Tolerance tol;
  SubspaceFamily<Rational> fam;
  fam.dim_ambient = n;
  for (const auto& set : sets) {
    if (set.empty()) throw std::invalid_argument("coordinate-multiplicity sets must be nonempty");
    std::vector<bool> seen(n, false);
    std::vector<std::vector<Rational>> cols;
    for (auto i : set) {
      if (i >= n) throw std::invalid_argument("coordinate-multiplicity index out of range");
      if (seen[i]) throw std::invalid_argument("coordinate-multiplicity sets must not repeat indices");
      seen[i] = true;
      ++counts[i];
      cols.push_back(unit_axis(n, i));
    }
    fam.members.push_back(Subspace<Rational>::from_spanning(n, Mat<Rational>::from_columns(cols), tol));
  }
  for (auto c : counts)
    if (c != counts[0])
      throw std::invalid_argument("coordinate-multiplicity requires uniform membership counts");
  ConstructionOutput out;
  out.name = "coordinate-multiplicity";
  out.exact_family = fam;
  out.certificate = std::vector<Rational>(sets.size(), Rational(1, static_cast<long>(counts[0])));
  out.expected["decide_nr"] = "YesExact";
  return out;
}

template CompletionResult bessel_to_parseval_completion<double>(const FrameSpec<double>&, const Tolerance&);
template CompletionResult bessel_to_parseval_completion<Rational>(const FrameSpec<Rational>&, const Tolerance&);
template bool naimark_nr_tail_check<double>(const FrameSpec<double>&, const std::vector<double>&,
                                            const std::vector<double>&, const Tolerance&);
template bool naimark_nr_tail_check<Rational>(const FrameSpec<Rational>&, const std::vector<double>&,
                                              const std::vector<double>&, const Tolerance&);
template std::optional<Equimodular<double>> equimodular_in_span<double>(const Mat<double>&, const Tolerance&);
template std::optional<Equimodular<Rational>> equimodular_in_span<Rational>(const Mat<Rational>&, const Tolerance&);
template Equimodular<double> equimodular_vector<double>(const FrameSpec<double>&, const Tolerance&);
template Equimodular<Rational> equimodular_vector<Rational>(const FrameSpec<Rational>&, const Tolerance&);

}  // namespace framecheck
