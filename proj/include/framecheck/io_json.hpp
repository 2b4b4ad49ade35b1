#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "framecheck/constructions.hpp"
#include "framecheck/frames.hpp"
#include "framecheck/subspaces.hpp"
#include "framecheck/verdict.hpp"

namespace framecheck {

using nlohmann::json;

/// One parsed input: a vector frame or a subspace family, in one field
/// mode. Exactly one of the four payloads is set.
struct ParsedInput {
  bool exact = false;
  std::optional<FrameSpec<Rational>> exact_frame;
  std::optional<FrameSpec<double>> float_frame;
  std::optional<SubspaceFamily<Rational>> exact_family;
  std::optional<SubspaceFamily<double>> float_family;

  bool is_frame() const { return exact_frame || float_frame; }
};

/// Formats: {"field":"exact"|"float","dim":N,"vectors":[[..],..]} or
/// {"field":...,"dim":N,"subspaces":[{"basis":[[..],..]},..]}.
/// Exact entries are "p/q" strings or integers; float entries numbers.
/// force_exact rejects non-integer float literals.
ParsedInput parse_input(const json& j, bool force_exact = false);

json frame_to_json(const FrameSpec<Rational>& f);
json frame_to_json(const FrameSpec<double>& f);
json family_to_json(const SubspaceFamily<Rational>& fam);
json family_to_json(const SubspaceFamily<double>& fam);

json flags_to_json(const FrameFlags& flags);
json witness_to_json(const WitnessPair& w);
WitnessPair witness_from_json(const json& j);
json verdict_to_json(const Verdict& v);

/// Recipe dispatch for the CLI and corpus; parameters are recipe-specific.
ConstructionOutput construct_from_json(const std::string& recipe, const json& params);
json construction_to_json(const ConstructionOutput& c);

json load_json_file(const std::string& path);

}  // namespace framecheck
