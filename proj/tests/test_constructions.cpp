#include <doctest.h>

#include <cmath>

#include "framecheck/constructions.hpp"
#include "framecheck/nnls.hpp"
#include "framecheck/retrieval.hpp"
#include "test_support.hpp"

using namespace framecheck;
using namespace framecheck::testgen;

namespace {

template <typename T>
void check_certificate(const SubspaceFamily<T>& fam, const std::vector<Rational>& cert) {
  Tolerance tol;
  const auto projs = projections_of(fam, tol);
  if constexpr (std::is_same_v<T, Rational>) {
    Mat<Rational> sum(fam.dim_ambient, fam.dim_ambient);
    for (std::size_t k = 0; k < cert.size(); ++k) sum = sum + scaled(projs[k], cert[k]);
    CHECK(sum == Mat<Rational>::identity(fam.dim_ambient));
  }
}

}  // namespace

TEST_CASE("naimark_embed on orthonormal bases and scaled mercedes-benz") {
  Tolerance tol;
  const auto onb = FrameSpec<Rational>::from_vectors(
      2, {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
  const auto emb = naimark_embed(onb, tol);
  CHECK(emb.ambient == 2);
  CHECK(frobenius(emb.projection - Mat<double>::identity(2)) < 1e-12);

  const double s3 = std::sqrt(3.0) / 2.0;
  const double c = std::sqrt(2.0 / 3.0);
  const auto mb = FrameSpec<double>::from_vectors(
      2, {{0, c}, {-s3 * c, -0.5 * c}, {s3 * c, -0.5 * c}});
  const auto emb2 = naimark_embed(mb, tol);
  CHECK(emb2.ambient == 3);
  double trace = 0;
  for (int i = 0; i < 3; ++i) trace += emb2.projection(i, i);
  CHECK(trace == doctest::Approx(2.0));

  // Non-Parseval input is rejected with the deviation reported.
  const auto plain = FrameSpec<double>::from_vectors(2, {{1, 0}, {0, 1}, {1, 1}});
  CHECK_THROWS_AS(naimark_embed(plain, tol), std::invalid_argument);
}

TEST_CASE("naimark projections of random parseval frames") {
  Tolerance tol;
  auto rng = rng_for("naimark-random");
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t m = n + 1 + rng() % 3;
    const auto f = random_parseval(rng, n, m);
    const auto emb = naimark_embed(f, tol);
    const auto& p = emb.projection;
    CHECK(frobenius(p * p - p) <= 1e-9 * std::max(1.0, frobenius(p)));
    double trace = 0;
    for (std::size_t i = 0; i < m; ++i) trace += p(i, i);
    CHECK(trace == doctest::Approx(static_cast<double>(n)));
  }
}

TEST_CASE("completion: worked example, already-parseval input, single vector") {
  Tolerance tol;
  // {(1,0),(0,1),(1,1)} has frame operator ((2,1),(1,2)) with eigenvalues
  // 3 and 1; after scaling by 1/sqrt(3) the completion adds sqrt(2/3) g2
  // and one zero vector for a total of five.
  const auto f = FrameSpec<double>::from_vectors(2, {{1, 0}, {0, 1}, {1, 1}});
  const auto res = bessel_to_parseval_completion(f, tol);
  CHECK(res.frame.count() == 5);
  CHECK(res.scale == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(norm(res.frame.vec(3)) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(norm(res.frame.vec(4)) == 0.0);
  CHECK(frobenius(frame_operator(res.frame) - Mat<double>::identity(2)) <= 1e-9);

  const auto onb = FrameSpec<double>::from_vectors(2, {{1, 0}, {0, 1}});
  const auto res2 = bessel_to_parseval_completion(onb, tol);
  CHECK(res2.frame.count() == 3);
  for (std::size_t i = 2; i < res2.frame.count(); ++i) CHECK(norm(res2.frame.vec(i)) == 0.0);

  const auto single = FrameSpec<double>::from_vectors(1, {{2.5}});
  const auto res3 = bessel_to_parseval_completion(single, tol);
  CHECK(res3.frame.count() == 1);
  CHECK(norm(res3.frame.vec(0)) == doctest::Approx(1.0));

  const auto short_frame = FrameSpec<double>::from_vectors(3, {{1, 0, 0}, {0, 1, 0}});
  CHECK_THROWS_AS(bessel_to_parseval_completion(short_frame, tol), std::invalid_argument);
}

TEST_CASE("completion always lands on a parseval frame of 2M-1 vectors") {
  Tolerance tol;
  auto rng = rng_for("completion-random");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t m = n + rng() % (11 - n);
    const auto f = random_gaussian(rng, n, m);
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < m; ++j) cols.push_back(f.col(j));
    const auto frame = FrameSpec<double>::from_vectors(n, cols);
    const auto res = bessel_to_parseval_completion(frame, tol);
    CHECK(res.frame.count() == 2 * m - 1);
    CHECK(frobenius(frame_operator(res.frame) - Mat<double>::identity(n)) <=
          1e-9 * std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("naimark tail check: vacuous, positive, and failing directions") {
  Tolerance tol;
  const auto onb = FrameSpec<double>::from_vectors(2, {{1, 0}, {0, 1}});
  // Orthonormal basis: the tail is all zero vectors, so the check holds.
  CHECK(naimark_nr_tail_check(onb, {1.0, 2.0}, {-1.0, 2.0}, tol));
  // Mismatched head moduli: vacuously true.
  CHECK(naimark_nr_tail_check(onb, {1.0, 0.0}, {5.0, 0.0}, tol));

  // {(1,0),(1,1)} fails norm retrieval, so some sign-flip pair breaks the
  // tail property; find it by enumerating sign patterns.
  const auto bad = FrameSpec<double>::from_vectors(2, {{1, 0}, {1, 1}});
  Mat<double> analysis(2, 2);
  analysis(0, 0) = 1;
  analysis(0, 1) = 0;
  analysis(1, 0) = 1;
  analysis(1, 1) = 1;
  const std::vector<double> x = {0.3, 0.8};
  const auto coeffs = mat_vec(analysis, x);
  bool found_false = false;
  for (unsigned mask = 1; mask < 4 && !found_false; ++mask) {
    std::vector<double> target = coeffs;
    for (int i = 0; i < 2; ++i)
      if (mask & (1u << i)) target[i] = -target[i];
    const auto sol = solve_linear(analysis, target, tol);
    REQUIRE(sol.kind == SolveKind::Unique);
    if (!naimark_nr_tail_check(bad, x, sol.x0, tol)) found_false = true;
  }
  CHECK(found_false);
}

TEST_CASE("naimark tail property holds for a norm-retrieving frame") {
  Tolerance tol;
  auto rng = rng_for("tail-property");
  // Exact tight frame {(1,0),(0,1),(1,1),(1,-1)}: verified norm retrieval.
  const auto f = FrameSpec<double>::from_vectors(2, {{1, 0}, {0, 1}, {1, 1}, {1, -1}});
  Mat<double> analysis(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) analysis(i, j) = f.vectors(j, i);
  int tested = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_unit(rng, 2);
    const auto coeffs = mat_vec(analysis, x);
    const unsigned mask = 1 + rng() % 15;
    std::vector<double> target = coeffs;
    for (int i = 0; i < 4; ++i)
      if (mask & (1u << i)) target[i] = -target[i];
    const auto sol = solve_linear(analysis, target, tol);
    if (sol.kind == SolveKind::Infeasible) continue;
    CHECK(naimark_nr_tail_check(f, x, sol.x0, tol));
    ++tested;
  }
  // With four vectors in the plane most sign patterns leave the range of
  // the analysis map, so only a fraction of trials produce a pair.
  CHECK(tested > 30);
}

TEST_CASE("equimodular vectors: axes, oblique pair, dependence rejection") {
  Tolerance tol;
  const auto axes = FrameSpec<Rational>::from_vectors(
      2, {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
  const auto eq = equimodular_vector(axes, tol);
  CHECK(eq.modulus == 1);
  CHECK(eq.phi[0] == 1);
  CHECK(eq.phi[1] == 1);

  const auto axes3 = FrameSpec<Rational>::from_vectors(
      3, {{Rational(1), Rational(0), Rational(0)},
          {Rational(0), Rational(1), Rational(0)},
          {Rational(0), Rational(0), Rational(1)}});
  const auto eq3 = equimodular_vector(axes3, tol);
  CHECK(eq3.phi == std::vector<Rational>{1, 1, 1});

  const auto oblique = FrameSpec<Rational>::from_vectors(
      2, {{Rational(1), Rational(0)}, {Rational(1), Rational(1)}});
  const auto eqo = equimodular_vector(oblique, tol);
  CHECK(eqo.modulus != 0);
  for (std::size_t i = 0; i < 2; ++i) {
    Rational ip = dot(eqo.phi, oblique.vec(i));
    if (ip < 0) ip = -ip;
    CHECK(ip == eqo.modulus);
  }

  const auto dep = FrameSpec<Rational>::from_vectors(
      2, {{Rational(1), Rational(0)}, {Rational(2), Rational(0)}});
  CHECK_THROWS_AS(equimodular_vector(dep, tol), std::invalid_argument);
}

TEST_CASE("equimodular moduli agree on random independent sets") {
  Tolerance tol;
  auto rng = rng_for("equimodular-random");
  int done = 0;
  while (done < 100) {
    const std::size_t n = 2 + rng() % 7;
    const auto m = random_gaussian(rng, n, n);
    if (rank(m, tol) != n) continue;
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < n; ++j) cols.push_back(m.col(j));
    const auto f = FrameSpec<double>::from_vectors(n, cols);
    const auto eq = equimodular_vector(f, tol);
    CHECK(eq.modulus > 0);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(std::abs(dot(eq.phi, f.vec(i))) - eq.modulus) <=
            1e-9 * std::max(1.0, eq.modulus));
    ++done;
  }
}

TEST_CASE("hyperplane failure witness: worked cases and random replay") {
  Tolerance tol;
  // Single vector (1,0) in R^2: x = e2 and y = c e2 + phi with c = 1.
  const auto single = FrameSpec<double>::from_vectors(2, {{1, 0}});
  const auto w = independent_hyperplane_failure_witness(single, tol);
  CHECK(norm(w.x) == doctest::Approx(1.0));
  CHECK(norm(w.y) > 1.0 + 1e-6);

  // Orthonormal pair in R^3 recovers the classic family: |x| = 1 and
  // |y|^2 = c^2 + 1 with c = 1/sqrt(2).
  const auto pair = FrameSpec<double>::from_vectors(3, {{1, 0, 0}, {0, 1, 0}});
  const auto w2 = independent_hyperplane_failure_witness(pair, tol);
  CHECK(norm_sq(w2.y) == doctest::Approx(1.5));

  auto rng = rng_for("hyperplane-witness");
  int done = 0;
  while (done < 100) {
    const std::size_t n = 3 + rng() % 3;
    std::vector<std::vector<double>> vecs;
    for (std::size_t i = 0; i + 1 < n; ++i) vecs.push_back(random_unit(rng, n));
    const auto f = FrameSpec<double>::from_vectors(n, vecs);
    if (rank(f.vectors, tol) != n - 1) continue;
    const auto witness = independent_hyperplane_failure_witness(f, tol);
    SubspaceFamily<double> fam;
    fam.dim_ambient = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      Mat<double> row(1, n);
      for (std::size_t j = 0; j < n; ++j) row(0, j) = f.vectors(j, i);
      fam.members.push_back(Subspace<double>::from_spanning(n, nullspace(row, tol), tol));
    }
    CHECK(replay_projection_witness(fam, witness, false).ok);
    ++done;
  }

  CHECK_THROWS_AS(
      independent_hyperplane_failure_witness(
          FrameSpec<double>::from_vectors(3, {{2, 0, 0}, {0, 1, 0}}), tol),
      std::invalid_argument);
}

TEST_CASE("three-codim-one: shape and certificates absent") {
  const auto out = construct_three_codim_one(3);
  REQUIRE(out.exact_family.has_value());
  CHECK(out.exact_family->count() == 3);
  for (const auto& w : out.exact_family->members) CHECK(w.dim() == 2);
  CHECK(out.expected.at("decide_nr") == "ProbablyYes");
  CHECK_THROWS_AS(construct_three_codim_one(1), std::invalid_argument);
}

TEST_CASE("partition-ln: blocks, certificate, validation") {
  const auto out = construct_partition_ln(3, {2, 2, 2});
  REQUIRE(out.exact_family.has_value());
  CHECK(out.exact_family->count() == 3);
  REQUIRE(out.certificate.has_value());
  for (const auto& c : *out.certificate) CHECK(c == Rational(1, 2));
  check_certificate(*out.exact_family, *out.certificate);

  const auto decided = decide_norm_retrieval_projections(*out.exact_family);
  CHECK(decided.status == Status::YesExact);

  CHECK_THROWS_AS(construct_partition_ln(3, {2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(construct_partition_ln(3, {4, 2}), std::invalid_argument);
}

TEST_CASE("k-plus-one: nested spans and signed certificate") {
  const auto out = construct_k_plus_one(4, 2);
  REQUIRE(out.exact_family.has_value());
  REQUIRE(out.exact_family->count() == 3);
  CHECK(out.exact_family->members[0].dim() == 2);
  CHECK(out.exact_family->members[1].dim() == 3);
  CHECK(out.exact_family->members[2].dim() == 3);
  REQUIRE(out.certificate.has_value());
  CHECK((*out.certificate)[0] == -1);
  CHECK((*out.certificate)[1] == 1);
  CHECK((*out.certificate)[2] == 1);
  check_certificate(*out.exact_family, *out.certificate);

  // The perps of the members span exactly a K-dimensional space.
  Tolerance tol;
  const auto perps = perp_family(*out.exact_family, tol);
  std::vector<std::vector<Rational>> rows;
  for (const auto& w : perps.members)
    for (std::size_t j = 0; j < w.dim(); ++j) rows.push_back(w.basis.col(j));
  Mat<Rational> stacked(rows.size(), 4);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < 4; ++j) stacked(i, j) = rows[i][j];
  CHECK(rank(stacked, tol) == 2);

  CHECK_THROWS_AS(construct_k_plus_one(3, 5), std::invalid_argument);
}

TEST_CASE("hyperplane family of a full orthonormal basis has the 1/(N-1) certificate") {
  const auto normals = FrameSpec<Rational>::from_vectors(
      3, {{Rational(1), Rational(0), Rational(0)},
          {Rational(0), Rational(1), Rational(0)},
          {Rational(0), Rational(0), Rational(1)}});
  const auto out = construct_hyperplane_family(normals);
  REQUIRE(out.exact_family.has_value());
  const auto vd = decide_norm_retrieval_projections(*out.exact_family);
  CHECK(vd.status == Status::YesExact);
  CHECK(vd.rule == "identity-certificate");
  REQUIRE(vd.certificate.has_value());
  REQUIRE(vd.certificate->exact_coefficients.has_value());
  for (const auto& c : *vd.certificate->exact_coefficients) CHECK(c == Rational(1, 2));
}

TEST_CASE("two-basis family: full spark union, PR holds, complements fail") {
  const auto out = construct_two_basis_pr();
  REQUIRE(out.float_family.has_value());
  CHECK(out.float_family->count() == 5);
  CHECK(out.expected.at("decide_pr") == "ProbablyYes");
}

TEST_CASE("cone example: full spark, no certificate, not scalable") {
  Tolerance tol;
  const auto out = construct_cone_example();
  REQUIRE(out.exact_frame.has_value());
  const auto& f = *out.exact_frame;
  CHECK(spark(f, tol) == 4);
  CHECK(phase_retrieval_vectors(f, tol).status == Status::YesExact);
  CHECK(norm_retrieval_vectors(f, tol).status == Status::YesExact);
  for (std::size_t i = 0; i < f.count(); ++i) {
    CHECK(dot(f.vec(i), f.vec(i)) == 1);
    CHECK(to_double(f.vec(i)[2]) >= 0.9);
  }

  // No signed identity certificate over the rank-one projections.
  SubspaceFamily<Rational> lines;
  lines.dim_ambient = 3;
  for (std::size_t i = 0; i < f.count(); ++i)
    lines.members.push_back(
        Subspace<Rational>::from_spanning(3, Mat<Rational>::from_columns({f.vec(i)}), tol));
  CHECK(!identity_certificate(lines, tol).found);

  // Not scalable: no nonnegative combination of the rank-one projections
  // reaches the identity.
  const auto fd = to_double(f);
  Mat<double> a(6, 5);
  std::vector<double> b(6, 0.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j, ++row) {
      for (std::size_t k = 0; k < 5; ++k) a(row, k) = fd.vectors(i, k) * fd.vectors(j, k);
      b[row] = i == j ? 1.0 : 0.0;
    }
  const auto nn = nonnegative_feasibility(a, b, tol);
  CHECK(!nn.feasible);
}

TEST_CASE("coordinate multiplicity: uniform cover and certificate") {
  const auto out = construct_coordinate_multiplicity(4, {{0, 1}, {2, 3}, {0, 2}, {1, 3}});
  REQUIRE(out.exact_family.has_value());
  REQUIRE(out.certificate.has_value());
  for (const auto& c : *out.certificate) CHECK(c == Rational(1, 2));
  check_certificate(*out.exact_family, *out.certificate);
  CHECK(decide_norm_retrieval_projections(*out.exact_family).status == Status::YesExact);

  CHECK_THROWS_AS(construct_coordinate_multiplicity(3, {{0, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(construct_coordinate_multiplicity(2, {{0, 0}}), std::invalid_argument);
}

TEST_CASE("construction certificates replay through the decision engine") {
  const std::vector<ConstructionOutput> outs = {
      construct_partition_ln(4, {2, 3, 3}), construct_k_plus_one(5, 3),
      construct_coordinate_multiplicity(3, {{0}, {1}, {2}, {0, 1, 2}})};
  for (const auto& out : outs) {
    REQUIRE(out.exact_family.has_value());
    REQUIRE(out.certificate.has_value());
    check_certificate(*out.exact_family, *out.certificate);
    CHECK(decide_norm_retrieval_projections(*out.exact_family).status == Status::YesExact);
  }
}
