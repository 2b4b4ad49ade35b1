#pragma once

#include <cstddef>
#include <vector>

#include "framecheck/matrix.hpp"
#include "framecheck/tolerance.hpp"

namespace framecheck {

/// Rank of a dense matrix. Exact mode runs fraction-free (Bareiss)
/// elimination over the integers after clearing row denominators, so the
/// answer is a proof; float mode counts pivots above
/// rank_rel * (largest magnitude seen) * max(rows, cols).
template <typename T>
std::size_t rank(const Mat<T>& m, const Tolerance& tol);

/// Columns form a basis of {x : m x = 0}. Exact mode: m v = 0 exactly.
template <typename T>
Mat<T> nullspace(const Mat<T>& m, const Tolerance& tol);

template <typename T>
struct OrthoBasis {
  Mat<T> basis;     // columns
  bool unit = true; // false in exact mode: orthogonal but not unit length
};

/// Modified Gram-Schmidt with re-orthogonalization; dependent inputs are
/// dropped. Exact mode returns an orthogonal (not unit) basis with
/// unit=false, normalized to primitive integer vectors.
template <typename T>
OrthoBasis<T> orthonormalize(const Mat<T>& columns, const Tolerance& tol);

enum class SolveKind { Unique, Affine, Infeasible };

template <typename T>
struct LinearSolution {
  SolveKind kind = SolveKind::Infeasible;
  std::vector<T> x0;   // a solution (Unique/Affine)
  Mat<T> kernel;       // kernel basis columns (Affine)
  double residual = 0; // |a x0 - b| (least-squares residual in float mode)
};

/// Exact mode classifies the solution set of a x = b exactly. Float mode
/// returns the least-squares solution and reports Infeasible when the
/// residual exceeds the tolerance scale.
template <typename T>
LinearSolution<T> solve_linear(const Mat<T>& a, const std::vector<T>& b, const Tolerance& tol);

/// Inverse of a square matrix; throws std::domain_error when singular
/// (exactly, or at the rank tolerance in float mode).
template <typename T>
Mat<T> inverse(const Mat<T>& m, const Tolerance& tol);

/// Reduced row echelon form; records pivot column indices if requested.
template <typename T>
Mat<T> rref(Mat<T> m, const Tolerance& tol, std::vector<std::size_t>* pivot_cols = nullptr);

/// Scales a rational vector to a primitive integer vector (cleared
/// denominators, gcd 1, first nonzero entry positive). Zero stays zero.
std::vector<Rational> primitive_integer_vector(const std::vector<Rational>& v);

}  // namespace framecheck
