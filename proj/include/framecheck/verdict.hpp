#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "framecheck/matrix.hpp"
#include "framecheck/rational.hpp"

namespace framecheck {

enum class Status { YesExact, NoWithWitness, ProbablyYes, Unknown };

std::string status_name(Status s);
Status status_from_name(const std::string& name);

/// Thrown when a combinatorial enumeration would exceed the configured
/// family-size cap. The CLI exposes an override flag.
class EnumerationGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact vector sqrt(scale_sq) * coords. Squared quantities (norms,
/// measurement values) of such vectors stay rational, which lets witnesses
/// with irrational entries replay exactly.
struct ScaledVec {
  Rational scale_sq = 1;
  std::vector<Rational> coords;

  std::vector<double> to_double_vec() const;
  Rational norm_sq() const;
};

struct WitnessPair {
  std::vector<double> x, y;
  std::optional<ScaledVec> exact_x, exact_y;
  // Per-index measurement pairs (m_i(x), m_i(y)): |P_i x| for projections,
  // |<x, phi_i>| for vectors.
  std::vector<std::array<double, 2>> measurements;
  std::vector<std::array<Rational, 2>> exact_measurements_sq;
  std::vector<std::size_t> partition;  // violating index split, when one exists
  bool has_partition = false;

  bool exact() const { return exact_x.has_value() && exact_y.has_value(); }
};

struct Certificate {
  std::vector<double> coefficients;
  std::optional<std::vector<Rational>> exact_coefficients;
  std::string description;
  double residual = 0.0;
};

struct Verdict {
  Status status = Status::Unknown;
  std::string rule;  // which decision rule fired
  std::optional<Certificate> certificate;
  std::optional<WitnessPair> witness;
  std::map<std::string, std::string> diagnostics;
};

struct SearchParams {
  std::size_t starts = 256;
  std::size_t max_iter = 500;
  std::uint64_t seed = 0;
  double objective_floor = 1e-18;
  double witness_margin = 1e-6;
  std::size_t max_enum = 24;  // partition/subset enumeration cap

  void validate() const {
    if (starts == 0 || max_iter == 0 || !(objective_floor > 0) || !(witness_margin > 0) || max_enum == 0)
      throw std::invalid_argument("search parameters must be positive");
  }
};

struct ReplayThresholds {
  double measurement_rel = 1e-9;  // |m(x) - m(y)| <= rel * max(|x|, |y|)
  double gap_rel = 1e-6;          // conclusion violation margin
};

struct ReplayReport {
  bool ok = false;
  bool measurements_equal = false;
  bool conclusion_violated = false;
  double max_measurement_diff = 0.0;  // relative to vector scale
  double gap = 0.0;                   // relative norm gap (NR) or distance from +-y (PR)
  bool exact_checked = false;
};

}  // namespace framecheck
