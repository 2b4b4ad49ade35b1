#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "framecheck/frames.hpp"
#include "framecheck/subspaces.hpp"
#include "framecheck/verdict.hpp"

namespace framecheck {

/// Realization of a Parseval frame as the shadow of an orthonormal basis
/// of a larger space: P is the projection onto the embedded copy and
/// P e_i corresponds to the i-th frame vector in embedded coordinates.
struct NaimarkEmbedding {
  std::size_t ambient = 0;     // M
  Mat<double> basis;           // orthonormal basis of the big space (columns)
  Mat<double> projection;      // M x M, symmetric idempotent of rank N
  FrameSpec<double> image_frame;
};

NaimarkEmbedding naimark_embed(const FrameSpec<double>& parseval, const Tolerance& tol = {});
NaimarkEmbedding naimark_embed(const FrameSpec<Rational>& parseval, const Tolerance& tol = {});

struct CompletionResult {
  FrameSpec<double> frame;  // 2M-1 vectors whose frame operator is I
  double scale = 1.0;       // applied to the input so its top eigenvalue is 1
};

/// Rescales the input so the largest frame-operator eigenvalue is 1,
/// appends sqrt(1 - lambda_j) g_j along the remaining eigenbasis, and pads
/// with zero vectors to exactly 2M-1 members.
template <typename T>
CompletionResult bessel_to_parseval_completion(const FrameSpec<T>& f, const Tolerance& tol = {});

/// Embeds both vectors through the completed Parseval frame and checks:
/// matching head moduli (first M coordinates) force matching tail norms.
/// Vacuously true when the head moduli differ.
template <typename T>
bool naimark_nr_tail_check(const FrameSpec<T>& f, const std::vector<double>& x,
                           const std::vector<double>& y, const Tolerance& tol = {});

template <typename T>
struct Equimodular {
  std::vector<T> phi;
  T modulus;  // common |<phi, v_i>| against the inputs as given
};

/// Inductive construction of phi in span(columns) with equal nonzero
/// moduli against every column; requires independent columns. The root of
/// smaller magnitude is chosen at each step, positive on ties.
template <typename T>
std::optional<Equimodular<T>> equimodular_in_span(const Mat<T>& columns, const Tolerance& tol = {});

/// The M = N case on a full frame; throws on dependent input.
template <typename T>
Equimodular<T> equimodular_vector(const FrameSpec<T>& f, const Tolerance& tol = {});

/// For N-1 independent unit vectors: a measurement-equal pair for the
/// hyperplane family {v_i ^perp} with |x| = 1 and |y| != 1.
WitnessPair independent_hyperplane_failure_witness(const FrameSpec<double>& unit_vectors,
                                                   const Tolerance& tol = {});

struct ConstructionOutput {
  std::string name;
  std::optional<SubspaceFamily<Rational>> exact_family;
  std::optional<SubspaceFamily<double>> float_family;
  std::optional<FrameSpec<Rational>> exact_frame;
  std::optional<FrameSpec<double>> float_frame;
  std::optional<std::vector<Rational>> certificate;  // coefficients with sum a_i P_i = I
  std::map<std::string, std::string> expected;       // operation name -> expected status
};

/// {e1^perp, e2^perp, (e1-e2)^perp} in R^n.
ConstructionOutput construct_three_codim_one(std::size_t n);

/// Coordinate blocks of an orthonormal basis listed L times; sizes k_i with
/// sum k_i = L n and k_i <= n. Certificate (1/L, ..., 1/L).
ConstructionOutput construct_partition_ln(std::size_t n, const std::vector<std::size_t>& sizes);

/// W_1 = span{e_1..e_{n-k}}, W_i = span{W_1, e_{n-k+i-1}} for i = 2..k+1;
/// certificate (-(k-1), 1, ..., 1).
ConstructionOutput construct_k_plus_one(std::size_t n, std::size_t k);

/// Member-wise hyperplane family {v_i ^perp}.
ConstructionOutput construct_hyperplane_family(const FrameSpec<Rational>& normals);

/// Five subspaces built from the standard basis and a rotated copy whose
/// union is full spark; phase retrieval holds while the complements fail.
ConstructionOutput construct_two_basis_pr();

/// Five fixed full-spark rational unit vectors with third coordinate
/// >= 0.9: phase retrieval holds, no identity certificate, not scalable.
ConstructionOutput construct_cone_example();

/// W_j = span{e_i : i in I_j} with every coordinate covered by exactly m
/// sets; certificate (1/m, ..., 1/m).
ConstructionOutput construct_coordinate_multiplicity(std::size_t n,
                                                     const std::vector<std::vector<std::size_t>>& sets);

}  // namespace framecheck
