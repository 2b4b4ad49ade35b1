#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "framecheck/frames.hpp"
#include "framecheck/linalg.hpp"
#include "framecheck/matrix.hpp"

namespace framecheck {

/// Subspace of R^N held as an orthonormal (float) or orthogonal
/// integer-primitive (exact) column basis. Spanning sets are canonicalized
/// at construction.
template <typename T>
struct Subspace {
  std::size_t dim_ambient = 0;
  Mat<T> basis;      // N x k, k may be 0 for the trivial subspace
  bool unit_flag = true;

  std::size_t dim() const { return basis.cols(); }

  static Subspace from_spanning(std::size_t dim_ambient, const Mat<T>& spanning, const Tolerance& tol = {});
  static Subspace trivial(std::size_t dim_ambient);
  void validate(const Tolerance& tol = {}) const;
};

template <typename T>
struct SubspaceFamily {
  std::size_t dim_ambient = 0;
  std::vector<Subspace<T>> members;

  std::size_t count() const { return members.size(); }
  void validate(const Tolerance& tol = {}) const;
};

inline Subspace<double> to_double(const Subspace<Rational>& w) {
  Tolerance tol;
  return Subspace<double>::from_spanning(w.dim_ambient, to_double(w.basis), tol);
}
SubspaceFamily<double> to_double(const SubspaceFamily<Rational>& fam);
inline const SubspaceFamily<double>& to_double(const SubspaceFamily<double>& fam) { return fam; }

/// Orthogonal projection onto the subspace: B (B^T B)^-1 B^T, which
/// reduces to B B^T for a unit basis.
template <typename T>
Mat<T> projection_of(const Subspace<T>& w, const Tolerance& tol = {});

/// Orthogonal complement; dim(w) + dim(complement) = N.
template <typename T>
Subspace<T> complement(const Subspace<T>& w, const Tolerance& tol = {});

template <typename T>
struct SumIntersection {
  Subspace<T> sum;
  Subspace<T> intersection;
};

/// Sum as the orthonormalized union of bases; intersection through the
/// complement of the sum of complements.
template <typename T>
SumIntersection<T> sum_and_intersection(const Subspace<T>& a, const Subspace<T>& b,
                                        const Tolerance& tol = {});

/// Concatenates all stored basis vectors into one frame, labelling each
/// vector with its (member, column) origin.
template <typename T>
FrameSpec<T> pooled_basis(const SubspaceFamily<T>& fam);

}  // namespace framecheck
