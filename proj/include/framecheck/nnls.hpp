#pragma once

#include <vector>

#include "framecheck/matrix.hpp"
#include "framecheck/tolerance.hpp"

namespace framecheck {

struct NnlsResult {
  bool feasible = false;
  std::vector<double> coefficients;  // c >= 0 with |A c - b| within threshold
  double residual = 0.0;
  std::vector<double> farkas;        // infeasible: y with y'A <= 0 and y'b > 0
};

/// Decides existence of c >= 0 with A c = b via Lawson-Hanson active-set
/// nonnegative least squares. Feasibility threshold: |Ac - b| <= 1e-8 |b|.
/// The infeasibility certificate (the optimal residual vector) is verified
/// before return.
NnlsResult nonnegative_feasibility(const Mat<double>& a, const std::vector<double>& b,
                                   const Tolerance& tol = {});

}  // namespace framecheck
