#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "framecheck/linalg.hpp"
#include "framecheck/matrix.hpp"
#include "framecheck/tolerance.hpp"
#include "framecheck/verdict.hpp"

namespace framecheck {

/// Ordered family of M vectors in R^N, stored as the columns of an N x M
/// matrix. The scalar type carries the field mode.
template <typename T>
struct FrameSpec {
  std::size_t dim = 0;
  Mat<T> vectors;                   // N x M
  std::vector<std::string> labels;  // empty, or one per vector

  std::size_t count() const { return vectors.cols(); }
  std::vector<T> vec(std::size_t i) const { return vectors.col(i); }

  static FrameSpec from_vectors(std::size_t dim, const std::vector<std::vector<T>>& vs);
  void validate() const;
};

inline FrameSpec<double> to_double(const FrameSpec<Rational>& f) {
  return {f.dim, to_double(f.vectors), f.labels};
}
inline const FrameSpec<double>& to_double(const FrameSpec<double>& f) { return f; }

struct FrameFlags {
  bool is_frame = false;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool tight = false;
  bool parseval = false;
  bool equal_norm = false;
  bool unit_norm = false;
  std::size_t spark = 0;
  bool full_spark = false;
};

/// S = sum of phi_i phi_i^T.
template <typename T>
Mat<T> frame_operator(const FrameSpec<T>& f);

/// (A, B) = extreme eigenvalues of the frame operator.
template <typename T>
std::pair<double, double> frame_bounds(const FrameSpec<T>& f);

template <typename T>
FrameFlags classify(const FrameSpec<T>& f, const Tolerance& tol = {}, std::size_t max_enum = 24);

/// Cardinality of the smallest dependent subfamily; N+1 when every subset
/// of size <= min(M, N) is independent.
template <typename T>
std::size_t spark(const FrameSpec<T>& f, const Tolerance& tol = {}, std::size_t max_enum = 24);

/// For every split (I, I^c) at least one side spans R^N. The failure
/// witness is a pair with equal measurement moduli that is not related by
/// a global sign.
template <typename T>
Verdict complement_property(const FrameSpec<T>& f, const Tolerance& tol = {}, std::size_t max_enum = 24);

template <typename T>
Verdict phase_retrieval_vectors(const FrameSpec<T>& f, const Tolerance& tol = {}, std::size_t max_enum = 24);

/// Norm retrieval for vectors: for every split, the orthogonal complements
/// of the two sides' spans must be mutually orthogonal.
template <typename T>
Verdict norm_retrieval_vectors(const FrameSpec<T>& f, const Tolerance& tol = {}, std::size_t max_enum = 24);

/// Whether x (orthogonal to the I-side) lies in span{S^-1 phi_i : i not in I}.
template <typename T>
bool sinv_span_membership(const FrameSpec<T>& f, const std::vector<std::size_t>& index_set,
                          const std::vector<T>& x, const Tolerance& tol = {});

/// Independent re-measurement of a witness pair against vector
/// measurements |<., phi_i>|. Exact payloads are checked in rational
/// arithmetic when the frame is exact.
template <typename T>
ReplayReport replay_vector_witness(const FrameSpec<T>& f, const WitnessPair& w, bool phase,
                                   const ReplayThresholds& thr = {});

/// Rows phi_i^T for i in the index list; shape (|I|, N) even when empty.
template <typename T>
Mat<T> rows_for(const FrameSpec<T>& f, const std::vector<std::size_t>& idx);

}  // namespace framecheck
