#include "framecheck/subspaces.hpp"

#include <cmath>
#include <stdexcept>

namespace framecheck {

template <typename T>
Subspace<T> Subspace<T>::from_spanning(std::size_t dim_ambient, const Mat<T>& spanning,
                                       const Tolerance& tol) {
  if (spanning.cols() > 0 && spanning.rows() != dim_ambient)
    throw std::invalid_argument("subspace spanning vectors do not match ambient dimension");
  Subspace<T> w;
  w.dim_ambient = dim_ambient;
  const auto ob = orthonormalize(spanning.cols() > 0 ? spanning : Mat<T>(dim_ambient, 0), tol);
  w.basis = ob.basis;
  w.unit_flag = ob.unit;
  return w;
}

template <typename T>
Subspace<T> Subspace<T>::trivial(std::size_t dim_ambient) {
  Subspace<T> w;
  w.dim_ambient = dim_ambient;
  w.basis = Mat<T>(dim_ambient, 0);
  return w;
}

template <typename T>
void Subspace<T>::validate(const Tolerance& tol) const {
  if (dim_ambient == 0) throw std::invalid_argument("subspace ambient dimension must be positive");
  if (basis.cols() > dim_ambient) throw std::invalid_argument("subspace basis has too many columns");
  if (basis.cols() > 0 && basis.rows() != dim_ambient)
    throw std::invalid_argument("subspace basis does not match ambient dimension");
  for (std::size_t i = 0; i < basis.cols(); ++i)
    for (std::size_t j = i; j < basis.cols(); ++j) {
      const T ip = dot(basis.col(i), basis.col(j));
      if constexpr (std::is_same_v<T, Rational>) {
        if (i == j && ip == 0) throw std::invalid_argument("subspace basis contains a zero column");
        if (i != j && ip != 0) throw std::invalid_argument("subspace basis is not orthogonal");
      } else {
        if (i == j && std::abs(ip - 1.0) > 1e-8)
          throw std::invalid_argument("subspace basis column is not unit length");
        if (i != j && std::abs(ip) > tol.orth_rel * static_cast<double>(dim_ambient) * 10)
          throw std::invalid_argument("subspace basis is not orthogonal");
      }
    }
}

template <typename T>
void SubspaceFamily<T>::validate(const Tolerance& tol) const {
  if (members.empty()) throw std::invalid_argument("subspace family must have at least one member");
  for (const auto& w : members) {
    if (w.dim_ambient != dim_ambient)
      throw std::invalid_argument("subspace family members disagree on ambient dimension");
    w.validate(tol);
  }
}

SubspaceFamily<double> to_double(const SubspaceFamily<Rational>& fam) {
  SubspaceFamily<double> out;
  out.dim_ambient = fam.dim_ambient;
  for (const auto& w : fam.members) out.members.push_back(to_double(w));
  return out;
}

template <typename T>
Mat<T> projection_of(const Subspace<T>& w, const Tolerance& tol) {
  const std::size_t n = w.dim_ambient;
  if (w.dim() == 0) return Mat<T>(n, n);
  if (w.unit_flag) return w.basis * w.basis.transposed();
  // Orthogonal non-unit basis: B^T B is diagonal, invert it exactly.
  const Mat<T> gram = w.basis.transposed() * w.basis;
  Mat<T> inv_gram = inverse(gram, tol);
  return w.basis * inv_gram * w.basis.transposed();
}

template <typename T>
Subspace<T> complement(const Subspace<T>& w, const Tolerance& tol) {
  Subspace<T> c;
  c.dim_ambient = w.dim_ambient;
  if (w.dim() == 0) {
    const auto ob = orthonormalize(Mat<T>::identity(w.dim_ambient), tol);
    c.basis = ob.basis;
    c.unit_flag = ob.unit;
    return c;
  }
  const Mat<T> kernel = nullspace(w.basis.transposed(), tol);
  const auto ob = orthonormalize(kernel, tol);
  c.basis = ob.basis;
  c.unit_flag = ob.unit;
  return c;
}

template <typename T>
SumIntersection<T> sum_and_intersection(const Subspace<T>& a, const Subspace<T>& b,
                                        const Tolerance& tol) {
  if (a.dim_ambient != b.dim_ambient)
    throw std::invalid_argument("sum_and_intersection: ambient dimensions differ");
  const std::size_t n = a.dim_ambient;
  Mat<T> both(n, a.dim() + b.dim());
  for (std::size_t j = 0; j < a.dim(); ++j) both.set_col(j, a.basis.col(j));
  for (std::size_t j = 0; j < b.dim(); ++j) both.set_col(a.dim() + j, b.basis.col(j));
  SumIntersection<T> out;
  out.sum = Subspace<T>::from_spanning(n, both, tol);

  const Subspace<T> ca = complement(a, tol);
  const Subspace<T> cb = complement(b, tol);
  Mat<T> cboth(n, ca.dim() + cb.dim());
  for (std::size_t j = 0; j < ca.dim(); ++j) cboth.set_col(j, ca.basis.col(j));
  for (std::size_t j = 0; j < cb.dim(); ++j) cboth.set_col(ca.dim() + j, cb.basis.col(j));
  out.intersection = complement(Subspace<T>::from_spanning(n, cboth, tol), tol);
  return out;
}

template <typename T>
FrameSpec<T> pooled_basis(const SubspaceFamily<T>& fam) {
  std::vector<std::vector<T>> cols;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < fam.members.size(); ++i)
    for (std::size_t j = 0; j < fam.members[i].dim(); ++j) {
      cols.push_back(fam.members[i].basis.col(j));
      labels.push_back("W" + std::to_string(i + 1) + ":" + std::to_string(j + 1));
    }
  if (cols.empty())
    throw std::invalid_argument("pooled_basis: family of trivial subspaces has no basis vectors");
  auto f = FrameSpec<T>::from_vectors(fam.dim_ambient, cols);
  f.labels = labels;
  return f;
}

template struct Subspace<double>;
template struct Subspace<Rational>;
template struct SubspaceFamily<double>;
template struct SubspaceFamily<Rational>;
template Mat<double> projection_of<double>(const Subspace<double>&, const Tolerance&);
template Mat<Rational> projection_of<Rational>(const Subspace<Rational>&, const Tolerance&);
template Subspace<double> complement<double>(const Subspace<double>&, const Tolerance&);
template Subspace<Rational> complement<Rational>(const Subspace<Rational>&, const Tolerance&);
template SumIntersection<double> sum_and_intersection<double>(const Subspace<double>&, const Subspace<double>&, const Tolerance&);
template SumIntersection<Rational> sum_and_intersection<Rational>(const Subspace<Rational>&, const Subspace<Rational>&, const Tolerance&);
template FrameSpec<double> pooled_basis<double>(const SubspaceFamily<double>&);
template FrameSpec<Rational> pooled_basis<Rational>(const SubspaceFamily<Rational>&);

}  // namespace framecheck
