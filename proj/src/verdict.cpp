#include "framecheck/verdict.hpp"

#include <cmath>

namespace framecheck {

std::string status_name(Status s) {
  switch (s) {
    case Status::YesExact: return "YesExact";
    case Status::NoWithWitness: return "NoWithWitness";
    case Status::ProbablyYes: return "ProbablyYes";
    case Status::Unknown: return "Unknown";
  }
  return "Unknown";
}

Status status_from_name(const std::string& name) {
  if (name == "YesExact") return Status::YesExact;
  if (name == "NoWithWitness") return Status::NoWithWitness;
  if (name == "ProbablyYes") return Status::ProbablyYes;
  if (name == "Unknown") return Status::Unknown;
  throw std::invalid_argument("unknown verdict status: " + name);
}

std::vector<double> ScaledVec::to_double_vec() const {
  const double s = std::sqrt(to_double(scale_sq));
  std::vector<double> out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) out[i] = s * to_double(coords[i]);
  return out;
}

Rational ScaledVec::norm_sq() const {
  Rational s(0);
  for (const auto& c : coords) s += c * c;
  return s * scale_sq;
}

}  // namespace framecheck
