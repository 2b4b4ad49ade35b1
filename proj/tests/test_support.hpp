#pragma once

// Deterministic generators shared by the test suites.

#include <random>
#include <string>
#include <vector>

#include "framecheck/frames.hpp"
#include "framecheck/linalg.hpp"
#include "framecheck/matrix.hpp"
#include "framecheck/subspaces.hpp"

namespace framecheck::testgen {

inline std::mt19937_64 rng_for(const std::string& tag) {
  std::seed_seq seq(tag.begin(), tag.end());
  return std::mt19937_64(seq);
}

inline Rational random_rational(std::mt19937_64& rng, int span = 20) {
  const std::int64_t num = static_cast<std::int64_t>(rng() % (2 * span + 1)) - span;
  const std::int64_t den = static_cast<std::int64_t>(rng() % 7) + 1;
  return Rational(num, den);
}

inline Rational random_nonzero_rational(std::mt19937_64& rng, int span = 20) {
  Rational r = random_rational(rng, span);
  while (r == 0) r = random_rational(rng, span);
  return r;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double s = 0;
  do {
    for (auto& x : v) x = g(rng);
    s = norm(v);
  } while (s < 1e-8);
  return scaled_vec(v, 1.0 / s);
}

inline Mat<double> random_gaussian(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  Mat<double> m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

/// Orthogonal matrix from the QR of a Gaussian square matrix.
inline Mat<double> random_orthogonal(std::mt19937_64& rng, std::size_t n) {
  while (true) {
    const auto ob = orthonormalize(random_gaussian(rng, n, n), Tolerance{});
    if (ob.basis.cols() == n) return ob.basis;
  }
}

/// Rational orthogonal matrix: product of two Householder reflections
/// I - 2 v v^T / |v|^2 with small integer v.
inline Mat<Rational> random_rational_orthogonal(std::mt19937_64& rng, std::size_t n) {
  auto householder = [&](void) {
    std::vector<Rational> v(n);
    bool nonzero = false;
    while (!nonzero)
      for (auto& x : v) {
        x = Rational(static_cast<std::int64_t>(rng() % 7) - 3);
        if (x != 0) nonzero = true;
      }
    const Rational nsq = dot(v, v);
    Mat<Rational> h = Mat<Rational>::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= Rational(2) * v[i] * v[j] / nsq;
    return h;
  };
  return householder() * householder();
}

/// Exact Parseval frame: rows of the first n columns of a rational
/// orthogonal m x m matrix.
inline FrameSpec<Rational> random_rational_parseval(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  const Mat<Rational> q = random_rational_orthogonal(rng, m);
  std::vector<std::vector<Rational>> rows(m, std::vector<Rational>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = q(i, j);
  return FrameSpec<Rational>::from_vectors(n, rows);
}

inline FrameSpec<double> random_parseval(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  const Mat<double> q = random_orthogonal(rng, m);
  std::vector<std::vector<double>> rows(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = q(i, j);
  return FrameSpec<double>::from_vectors(n, rows);
}

/// Tight frame as a union of rotated orthonormal bases, all scaled by c.
inline FrameSpec<double> random_tight(std::mt19937_64& rng, std::size_t n, std::size_t bases,
                                      double c = 1.0) {
  std::vector<std::vector<double>> vecs;
  for (std::size_t b = 0; b < bases; ++b) {
    const Mat<double> q = random_orthogonal(rng, n);
    for (std::size_t i = 0; i < n; ++i) vecs.push_back(scaled_vec(q.row(i), c));
  }
  return FrameSpec<double>::from_vectors(n, vecs);
}

inline FrameSpec<Rational> random_rational_frame(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                                 int span = 6) {
  std::vector<std::vector<Rational>> vecs(m, std::vector<Rational>(n));
  for (auto& v : vecs)
    for (auto& x : v) x = random_rational(rng, span);
  return FrameSpec<Rational>::from_vectors(n, vecs);
}

inline FrameSpec<double> random_float_frame(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<std::vector<double>> vecs;
  for (std::size_t i = 0; i < m; ++i) vecs.push_back(random_unit(rng, n));
  return FrameSpec<double>::from_vectors(n, vecs);
}

inline SubspaceFamily<double> random_family(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                            std::size_t max_dim) {
  SubspaceFamily<double> fam;
  fam.dim_ambient = n;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = 1 + rng() % max_dim;
    fam.members.push_back(Subspace<double>::from_spanning(n, random_gaussian(rng, n, k), Tolerance{}));
  }
  return fam;
}

}  // namespace framecheck::testgen
