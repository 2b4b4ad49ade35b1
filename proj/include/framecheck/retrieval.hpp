#pragma once

#include <optional>
#include <vector>

#include "framecheck/frames.hpp"
#include "framecheck/subspaces.hpp"
#include "framecheck/verdict.hpp"

namespace framecheck {

template <typename T>
std::vector<Mat<T>> projections_of(const SubspaceFamily<T>& fam, const Tolerance& tol = {});

template <typename T>
struct DimensionSumOutcome {
  bool pass = false;
  std::vector<T> witness;  // nonzero vector orthogonal to every member on failure
};

/// Fails iff the member dimensions sum below the ambient dimension.
template <typename T>
DimensionSumOutcome<T> nr_dimension_sum_test(const SubspaceFamily<T>& fam, const Tolerance& tol = {});

template <typename T>
struct CertificateSearch {
  bool found = false;
  std::vector<T> coefficients;
  double residual = 0.0;
};

/// Solves sum a_i P_i = I over the symmetric-matrix coordinates; found
/// certificates are verified by reconstruction before return.
template <typename T>
CertificateSearch<T> identity_certificate(const SubspaceFamily<T>& fam, const Tolerance& tol = {});

template <typename T>
struct ComplementCertificate {
  bool applicable = false;  // false when sum a_i = 1
  std::vector<T> coefficients;
};

/// From sum a_i P_i = I with sum a_i != 1, the complements satisfy
/// sum b_i (I - P_i) = I with b_i = a_i / (sum a - 1).
template <typename T>
ComplementCertificate<T> complement_identity_certificate(const SubspaceFamily<T>& fam,
                                                         const std::vector<T>& a,
                                                         const Tolerance& tol = {});

enum class PooledOutcome { Pass, Fail, Inconclusive };

template <typename T>
struct PooledNrResult {
  PooledOutcome outcome = PooledOutcome::Inconclusive;
  std::optional<WitnessPair> witness;  // family-level witness on Fail
};

/// Runs the vector norm-retrieval check on the pooled stored bases. Fail
/// is conclusive for the family; Pass is necessary-only evidence.
template <typename T>
PooledNrResult<T> pooled_necessary_nr_test(const SubspaceFamily<T>& fam, const Tolerance& tol = {},
                                           std::size_t max_enum = 24);

/// x in span{P_i x}; throws on zero x.
template <typename T>
bool nr_spanning_check(const SubspaceFamily<T>& fam, const std::vector<T>& x,
                       const Tolerance& tol = {});

/// {P_i x} spans the ambient space; throws on zero x.
template <typename T>
bool pr_spanning_check(const SubspaceFamily<T>& fam, const std::vector<T>& x,
                       const Tolerance& tol = {});

struct SearchOutcome {
  std::optional<WitnessPair> witness;
  double best_objective = 0.0;
  std::size_t starts_used = 0;
};

/// Multi-start search for a unit u with a component outside span{P_i u};
/// a verified witness is (u+v, u-v) with v the unit residual direction.
SearchOutcome nr_counterexample_search(const SubspaceFamily<double>& fam, const SearchParams& params,
                                       const Tolerance& tol = {});

/// Alternating minimization of sum <P_i u, v>^2 over unit u, v; a verified
/// zero converts to the pair (u+v, u-v).
SearchOutcome pr_counterexample_search(const SubspaceFamily<double>& fam, const SearchParams& params,
                                       const Tolerance& tol = {});

template <typename T>
Verdict decide_norm_retrieval_projections(const SubspaceFamily<T>& fam, const SearchParams& params = {},
                                          const Tolerance& tol = {});

template <typename T>
Verdict decide_phase_retrieval_projections(const SubspaceFamily<T>& fam, const SearchParams& params = {},
                                           const Tolerance& tol = {});

template <typename T>
SubspaceFamily<T> perp_family(const SubspaceFamily<T>& fam, const Tolerance& tol = {});

/// Fresh re-measurement of a witness pair against |P_i .|; exact payloads
/// are checked in rational arithmetic when the family is exact.
template <typename T>
ReplayReport replay_projection_witness(const SubspaceFamily<T>& fam, const WitnessPair& w, bool phase,
                                       const ReplayThresholds& thr = {}, const Tolerance& tol = {});

/// Populates the measurement table of a witness against the family.
template <typename T>
void fill_projection_measurements(const SubspaceFamily<T>& fam, WitnessPair& w,
                                  const Tolerance& tol = {});

}  // namespace framecheck
