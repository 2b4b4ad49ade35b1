#include "framecheck/frames.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "framecheck/eigen.hpp"

namespace framecheck {

namespace {

constexpr double kStrongCorrelation = 1e-5;  // float witness must clear the replay margins

void check_enum_guard(std::size_t m, std::size_t max_enum, const char* what) {
  if (m > max_enum)
    throw EnumerationGuard(std::string(what) + ": family of " + std::to_string(m) +
                           " vectors exceeds the enumeration cap of " + std::to_string(max_enum) +
                           "; only exhaustive enumeration is supported, raise the cap to force it");
}

// Unordered splits (I, I^c): the last index always stays in I^c, so masks
// range over the first m-1 elements and every split is visited once.
std::vector<std::size_t> mask_to_indices(std::uint32_t mask, std::size_t m) {
  std::vector<std::size_t> idx;
  if (m == 0) return idx;
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (mask & (1u << i)) idx.push_back(i);
  return idx;
}

bool next_combination(std::vector<std::size_t>& comb, std::size_t m) {
  const std::size_t s = comb.size();
  std::size_t i = s;
  while (i-- > 0) {
    if (comb[i] < m - s + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> complement_indices(const std::vector<std::size_t>& idx, std::size_t m) {
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (k < idx.size() && idx[k] == i) {
      ++k;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

// Measurement pair table for |<., phi_i>|; exact squares when available.
template <typename T>
void fill_vector_measurements(const FrameSpec<T>& f, WitnessPair& w) {
  w.measurements.clear();
  w.exact_measurements_sq.clear();
  for (std::size_t i = 0; i < f.count(); ++i) {
    const std::vector<double> phi = to_double(f.vec(i));
    w.measurements.push_back({std::abs(dot(w.x, phi)), std::abs(dot(w.y, phi))});
  }
  if constexpr (std::is_same_v<T, Rational>) {
    if (w.exact()) {
      for (std::size_t i = 0; i < f.count(); ++i) {
        const std::vector<Rational> phi = f.vec(i);
        const Rational mx = w.exact_x->scale_sq * dot(w.exact_x->coords, phi) * dot(w.exact_x->coords, phi);
        const Rational my = w.exact_y->scale_sq * dot(w.exact_y->coords, phi) * dot(w.exact_y->coords, phi);
        w.exact_measurements_sq.push_back({mx, my});
      }
    }
  }
}

// Witness pair (u+v, u-v) from two exact vectors with <u,v> != 0.
WitnessPair pair_from_exact(const std::vector<Rational>& u, const std::vector<Rational>& v) {
  WitnessPair w;
  ScaledVec ex, ey;
  ex.coords = vec_add(u, v);
  ey.coords = vec_sub(u, v);
  w.exact_x = ex;
  w.exact_y = ey;
  w.x = ex.to_double_vec();
  w.y = ey.to_double_vec();
  return w;
}

WitnessPair pair_from_float(const std::vector<double>& u, const std::vector<double>& v) {
  WitnessPair w;
  w.x = vec_add(u, v);
  w.y = vec_sub(u, v);
  return w;
}

}  // namespace

template <typename T>
FrameSpec<T> FrameSpec<T>::from_vectors(std::size_t dim, const std::vector<std::vector<T>>& vs) {
  FrameSpec<T> f;
  f.dim = dim;
  for (const auto& v : vs)
    if (v.size() != dim) throw std::invalid_argument("frame vector length does not match dim");
  f.vectors = vs.empty() ? Mat<T>(dim, 0) : Mat<T>::from_columns(vs);
  f.validate();
  return f;
}

template <typename T>
void FrameSpec<T>::validate() const {
  if (dim == 0) throw std::invalid_argument("frame ambient dimension must be positive");
  if (vectors.cols() == 0) throw std::invalid_argument("frame must contain at least one vector");
  if (vectors.rows() != dim) throw std::invalid_argument("frame vector length does not match dim");
  if (!labels.empty() && labels.size() != vectors.cols())
    throw std::invalid_argument("label count does not match vector count");
}

template <typename T>
Mat<T> rows_for(const FrameSpec<T>& f, const std::vector<std::size_t>& idx) {
  Mat<T> m(idx.size(), f.dim);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t j = 0; j < f.dim; ++j) m(r, j) = f.vectors(j, idx[r]);
  return m;
}

template <typename T>
Mat<T> frame_operator(const FrameSpec<T>& f) {
  Mat<T> s(f.dim, f.dim);
  for (std::size_t k = 0; k < f.count(); ++k)
    for (std::size_t i = 0; i < f.dim; ++i) {
      const T& vi = f.vectors(i, k);
      if (vi == T(0)) continue;
      for (std::size_t j = 0; j < f.dim; ++j) s(i, j) += vi * f.vectors(j, k);
    }
  return s;
}

template <typename T>
std::pair<double, double> frame_bounds(const FrameSpec<T>& f) {
  const Mat<double> s = to_double(frame_operator(f));
  const auto eig = symmetric_eigen(s);
  double lo = eig.values.back(), hi = eig.values.front();
  const double noise = 1e-12 * std::max(1.0, hi);
  if (std::abs(lo) <= noise) lo = 0.0;
  return {lo, hi};
}

template <typename T>
std::size_t spark(const FrameSpec<T>& f, const Tolerance& tol, std::size_t max_enum) {
  check_enum_guard(f.count(), max_enum, "spark");
  const std::size_t m = f.count();
  const std::size_t top = std::min(m, f.dim);
  for (std::size_t s = 1; s <= top; ++s) {
    std::vector<std::size_t> comb(s);
    for (std::size_t i = 0; i < s; ++i) comb[i] = i;
    do {
      if (rank(rows_for(f, comb), tol) < s) return s;
    } while (next_combination(comb, m));
  }
  return f.dim + 1;
}

template <typename T>
FrameFlags classify(const FrameSpec<T>& f, const Tolerance& tol, std::size_t max_enum) {
  FrameFlags flags;
  const Mat<T> s = frame_operator(f);
  flags.is_frame = rank(f.vectors, tol) == f.dim;
  const auto [lo, hi] = frame_bounds(f);
  flags.lower_bound = lo;
  flags.upper_bound = hi;

  if constexpr (std::is_same_v<T, Rational>) {
    bool diagonal_equal = true, off_zero = true;
    for (std::size_t i = 0; i < f.dim; ++i)
      for (std::size_t j = 0; j < f.dim; ++j) {
        if (i == j && s(i, i) != s(0, 0)) diagonal_equal = false;
        if (i != j && s(i, j) != 0) off_zero = false;
      }
    flags.tight = flags.is_frame && diagonal_equal && off_zero;
    flags.parseval = flags.tight && s(0, 0) == 1;
    Rational n0 = dot(f.vec(0), f.vec(0));
    flags.equal_norm = true;
    flags.unit_norm = true;
    for (std::size_t k = 0; k < f.count(); ++k) {
      const Rational nk = dot(f.vec(k), f.vec(k));
      if (nk != n0) flags.equal_norm = false;
      if (nk != 1) flags.unit_norm = false;
    }
  } else {
    const double eps = 1e-9 * std::max(1.0, hi);
    flags.tight = flags.is_frame && (hi - lo) <= eps;
    flags.parseval = flags.tight && std::abs(lo - 1.0) <= eps;
    double nmin = 0, nmax = 0;
    for (std::size_t k = 0; k < f.count(); ++k) {
      const double nk = norm_sq(f.vec(k));
      if (k == 0) nmin = nmax = nk;
      nmin = std::min(nmin, nk);
      nmax = std::max(nmax, nk);
    }
    const double neps = 1e-9 * std::max(1.0, nmax);
    flags.equal_norm = (nmax - nmin) <= neps;
    flags.unit_norm = flags.equal_norm && std::abs(nmax - 1.0) <= neps;
  }

  flags.spark = spark(f, tol, max_enum);
  flags.full_spark = flags.spark == f.dim + 1;
  return flags;
}

template <typename T>
Verdict complement_property(const FrameSpec<T>& f, const Tolerance& tol, std::size_t max_enum) {
  check_enum_guard(f.count(), max_enum, "complement property");
  const std::size_t m = f.count();
  Verdict verdict;
  verdict.rule = "complement-property";
  const std::uint32_t total = m == 1 ? 1u : (1u << (m - 1));
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    const auto left = mask_to_indices(mask, m);
    const auto right = complement_indices(left, m);
    const bool left_spans = rank(rows_for(f, left), tol) == f.dim;
    const bool right_spans = left_spans ? true : rank(rows_for(f, right), tol) == f.dim;
    if (left_spans || right_spans) continue;

    // Neither side spans: vectors orthogonal to each side have equal
    // measurement moduli but are not sign-related.
    WitnessPair w;
    if constexpr (std::is_same_v<T, Rational>) {
      const auto u = nullspace(rows_for(f, left), tol).col(0);
      const auto v = nullspace(rows_for(f, right), tol).col(0);
      w = pair_from_exact(u, v);
    } else {
      auto nu = orthonormalize(nullspace(rows_for(f, left), tol), tol).basis.col(0);
      auto nv = orthonormalize(nullspace(rows_for(f, right), tol), tol).basis.col(0);
      w = pair_from_float(nu, nv);
    }
    w.partition = left;
    w.has_partition = true;
    fill_vector_measurements(f, w);
    verdict.status = Status::NoWithWitness;
    verdict.witness = w;
    verdict.diagnostics["violating-partition-size"] = std::to_string(left.size());
    return verdict;
  }
  verdict.status = Status::YesExact;
  Certificate cert;
  cert.description = "every index split leaves one side spanning";
  verdict.certificate = cert;
  verdict.diagnostics["partitions-checked"] = std::to_string(total);
  return verdict;
}

template <typename T>
Verdict phase_retrieval_vectors(const FrameSpec<T>& f, const Tolerance& tol, std::size_t max_enum) {
  return complement_property(f, tol, max_enum);
}

template <typename T>
Verdict norm_retrieval_vectors(const FrameSpec<T>& f, const Tolerance& tol, std::size_t max_enum) {
  check_enum_guard(f.count(), max_enum, "norm retrieval partition enumeration");
  const std::size_t m = f.count();
  Verdict verdict;
  verdict.rule = "partition-orthogonality";
  const std::uint32_t total = m == 1 ? 1u : (1u << (m - 1));
  bool boundary_case = false;

  for (std::uint32_t mask = 0; mask < total; ++mask) {
    const auto left = mask_to_indices(mask, m);
    const auto right = complement_indices(left, m);

    if constexpr (std::is_same_v<T, Rational>) {
      const Mat<Rational> b1 = nullspace(rows_for(f, left), tol);
      const Mat<Rational> b2 = nullspace(rows_for(f, right), tol);
      for (std::size_t i = 0; i < b1.cols(); ++i)
        for (std::size_t j = 0; j < b2.cols(); ++j) {
          if (dot(b1.col(i), b2.col(j)) == 0) continue;
          WitnessPair w = pair_from_exact(b1.col(i), b2.col(j));
          w.partition = left;
          w.has_partition = true;
          fill_vector_measurements(f, w);
          verdict.status = Status::NoWithWitness;
          verdict.witness = w;
          return verdict;
        }
    } else {
      const Mat<double> q1 = orthonormalize(nullspace(rows_for(f, left), tol), tol).basis;
      const Mat<double> q2 = orthonormalize(nullspace(rows_for(f, right), tol), tol).basis;
      if (q1.cols() == 0 || q2.cols() == 0) continue;
      const Mat<double> k = q1.transposed() * q2;
      if (max_abs(k) <= tol.orth_rel * static_cast<double>(std::max<std::size_t>(f.dim, 1))) continue;

      // Principal correlation pair maximizes the witness margin.
      const auto eig = symmetric_eigen(k.transposed() * k);
      const double sigma = std::sqrt(std::max(eig.values.front(), 0.0));
      if (sigma < kStrongCorrelation) {
        boundary_case = true;
        continue;
      }
      const std::vector<double> wv = eig.vectors.col(0);
      const std::vector<double> kw = mat_vec(k, wv);
      const std::vector<double> u = mat_vec(q1, scaled_vec(kw, 1.0 / sigma));
      const std::vector<double> v = mat_vec(q2, wv);
      WitnessPair w = pair_from_float(u, v);
      w.partition = left;
      w.has_partition = true;
      fill_vector_measurements(f, w);
      verdict.status = Status::NoWithWitness;
      verdict.witness = w;
      verdict.diagnostics["principal-correlation"] = std::to_string(sigma);
      return verdict;
    }
  }

  if (boundary_case) {
    verdict.status = Status::Unknown;
    verdict.diagnostics["note"] =
        "complement spans are neither orthogonal at tolerance nor separated enough for a witness";
    return verdict;
  }
  verdict.status = Status::YesExact;
  Certificate cert;
  cert.description = "complement spans of every index split are mutually orthogonal";
  verdict.certificate = cert;
  verdict.diagnostics["partitions-checked"] = std::to_string(total);
  return verdict;
}

template <typename T>
bool sinv_span_membership(const FrameSpec<T>& f, const std::vector<std::size_t>& index_set,
                          const std::vector<T>& x, const Tolerance& tol) {
  const Mat<T> s = frame_operator(f);
  Mat<T> sinv;
  try {
    sinv = inverse(s, tol);
  } catch (const std::domain_error&) {
    throw std::invalid_argument("sinv_span_membership: frame operator is singular");
  }
  // Precondition: x is orthogonal to the I-side.
  for (auto i : index_set) {
    const T ip = dot(x, f.vec(i));
    if constexpr (std::is_same_v<T, Rational>) {
      if (ip != 0) throw std::invalid_argument("sinv_span_membership: x is not orthogonal to the index side");
    } else {
      const double bound = tol.orth_rel * std::max(1.0, norm(x)) * std::max(1.0, norm(f.vec(i))) *
                           static_cast<double>(f.dim);
      if (std::abs(ip) > bound)
        throw std::invalid_argument("sinv_span_membership: x is not orthogonal to the index side");
    }
  }
  const auto rest = complement_indices(index_set, f.count());
  std::vector<std::vector<T>> cols;
  for (auto i : rest) cols.push_back(mat_vec(sinv, f.vec(i)));
  Mat<T> span_m = cols.empty() ? Mat<T>(f.dim, 0) : Mat<T>::from_columns(cols);
  const std::size_t r0 = rank(span_m, tol);
  cols.push_back(x);
  const std::size_t r1 = rank(Mat<T>::from_columns(cols), tol);
  return r0 == r1;
}

template <typename T>
ReplayReport replay_vector_witness(const FrameSpec<T>& f, const WitnessPair& w, bool phase,
                                   const ReplayThresholds& thr) {
  ReplayReport rep;
  const double scale = std::max({norm(w.x), norm(w.y), 1e-300});
  rep.max_measurement_diff = 0.0;
  for (std::size_t i = 0; i < f.count(); ++i) {
    const std::vector<double> phi = to_double(f.vec(i));
    const double diff = std::abs(std::abs(dot(w.x, phi)) - std::abs(dot(w.y, phi))) / scale;
    rep.max_measurement_diff = std::max(rep.max_measurement_diff, diff);
  }
  rep.measurements_equal = rep.max_measurement_diff <= thr.measurement_rel;

  if (phase) {
    const double dplus = norm(vec_sub(w.x, w.y));
    const double dminus = norm(vec_add(w.x, w.y));
    rep.gap = std::min(dplus, dminus) / scale;
  } else {
    rep.gap = std::abs(norm(w.x) - norm(w.y)) / scale;
  }
  rep.conclusion_violated = rep.gap >= thr.gap_rel;

  if constexpr (std::is_same_v<T, Rational>) {
    if (w.exact()) {
      rep.exact_checked = true;
      bool all_equal = true;
      for (std::size_t i = 0; i < f.count(); ++i) {
        const std::vector<Rational> phi = f.vec(i);
        const Rational mx = w.exact_x->scale_sq * dot(w.exact_x->coords, phi) * dot(w.exact_x->coords, phi);
        const Rational my = w.exact_y->scale_sq * dot(w.exact_y->coords, phi) * dot(w.exact_y->coords, phi);
        if (mx != my) all_equal = false;
      }
      rep.measurements_equal = all_equal;
      if (phase) {
        // x = +-y would force equal exact coordinates up to a shared sign.
        const bool xzero = is_zero_vec(w.exact_x->coords) || w.exact_x->scale_sq == 0;
        const bool yzero = is_zero_vec(w.exact_y->coords) || w.exact_y->scale_sq == 0;
        if (xzero && yzero) {
          rep.conclusion_violated = false;
        } else {
          const std::vector<double> dx = w.exact_x->to_double_vec();
          const std::vector<double> dy = w.exact_y->to_double_vec();
          rep.conclusion_violated =
              std::min(norm(vec_sub(dx, dy)), norm(vec_add(dx, dy))) / scale >= thr.gap_rel;
        }
      } else {
        rep.conclusion_violated = w.exact_x->norm_sq() != w.exact_y->norm_sq();
      }
    }
  }
  rep.ok = rep.measurements_equal && rep.conclusion_violated;
  return rep;
}

template struct FrameSpec<double>;
template struct FrameSpec<Rational>;
template Mat<double> rows_for<double>(const FrameSpec<double>&, const std::vector<std::size_t>&);
template Mat<Rational> rows_for<Rational>(const FrameSpec<Rational>&, const std::vector<std::size_t>&);
template Mat<double> frame_operator<double>(const FrameSpec<double>&);
template Mat<Rational> frame_operator<Rational>(const FrameSpec<Rational>&);
template std::pair<double, double> frame_bounds<double>(const FrameSpec<double>&);
template std::pair<double, double> frame_bounds<Rational>(const FrameSpec<Rational>&);
template std::size_t spark<double>(const FrameSpec<double>&, const Tolerance&, std::size_t);
template std::size_t spark<Rational>(const FrameSpec<Rational>&, const Tolerance&, std::size_t);
template FrameFlags classify<double>(const FrameSpec<double>&, const Tolerance&, std::size_t);
template FrameFlags classify<Rational>(const FrameSpec<Rational>&, const Tolerance&, std::size_t);
template Verdict complement_property<double>(const FrameSpec<double>&, const Tolerance&, std::size_t);
template Verdict complement_property<Rational>(const FrameSpec<Rational>&, const Tolerance&, std::size_t);
template Verdict phase_retrieval_vectors<double>(const FrameSpec<double>&, const Tolerance&, std::size_t);
template Verdict phase_retrieval_vectors<Rational>(const FrameSpec<Rational>&, const Tolerance&, std::size_t);
template Verdict norm_retrieval_vectors<double>(const FrameSpec<double>&, const Tolerance&, std::size_t);
template Verdict norm_retrieval_vectors<Rational>(const FrameSpec<Rational>&, const Tolerance&, std::size_t);
template bool sinv_span_membership<double>(const FrameSpec<double>&, const std::vector<std::size_t>&,
                                           const std::vector<double>&, const Tolerance&);
template bool sinv_span_membership<Rational>(const FrameSpec<Rational>&, const std::vector<std::size_t>&,
                                             const std::vector<Rational>&, const Tolerance&);
template ReplayReport replay_vector_witness<double>(const FrameSpec<double>&, const WitnessPair&, bool,
                                                    const ReplayThresholds&);
template ReplayReport replay_vector_witness<Rational>(const FrameSpec<Rational>&, const WitnessPair&, bool,
                                                      const ReplayThresholds&);

}  // namespace framecheck
