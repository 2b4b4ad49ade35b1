#pragma once

#include <stdexcept>

namespace framecheck {

/// Relative tolerances used by all float-mode decisions. Exact-mode
/// (rational) code paths ignore them.
struct Tolerance {
  double rank_rel = 1e-10;  // pivot threshold, relative to the largest magnitude seen
  double orth_rel = 1e-10;  // |<x,y>| <= orth_rel * |x| * |y|

  void validate() const {
    if (!(rank_rel > 0) || !(orth_rel > 0))
      throw std::invalid_argument("tolerances must be strictly positive");
  }
};

}  // namespace framecheck
