#pragma once

#include <vector>

#include "framecheck/matrix.hpp"

namespace framecheck {

struct SymmetricEigen {
  std::vector<double> values;  // sorted descending
  Mat<double> vectors;         // orthonormal columns, vectors.col(k) pairs with values[k]
};

/// Cyclic Jacobi rotations. Throws std::invalid_argument when the input's
/// relative asymmetry exceeds 1e-12.
SymmetricEigen symmetric_eigen(const Mat<double>& s);

}  // namespace framecheck
