#include "framecheck/io_json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace framecheck {

namespace {

bool contains_string_entry(const json& j) {
  if (j.is_string()) return true;
  if (j.is_array() || j.is_object())
    for (const auto& item : j)
      if (contains_string_entry(item)) return true;
  return false;
}

Rational parse_exact_entry(const json& e) {
  if (e.is_string()) return parse_rational(e.get<std::string>());
  if (e.is_number_integer()) return Rational(e.get<long long>());
  if (e.is_number_float())
    throw std::invalid_argument("float literal in exact-mode input: " + e.dump());
  throw std::invalid_argument("bad exact entry: " + e.dump());
}

double parse_float_entry(const json& e) {
  if (e.is_number()) return e.get<double>();
  if (e.is_string()) return to_double(parse_rational(e.get<std::string>()));
  throw std::invalid_argument("bad float entry: " + e.dump());
}

template <typename T, typename Parse>
std::vector<std::vector<T>> parse_vector_list(const json& arr, std::size_t dim, Parse parse) {
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("expected a non-empty array of vectors");
  std::vector<std::vector<T>> out;
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != dim)
      throw std::invalid_argument("vector length does not match dim");
    std::vector<T> row;
    for (const auto& e : v) row.push_back(parse(e));
    out.push_back(row);
  }
  return out;
}

json rational_vec_to_json(const std::vector<Rational>& v) {
  json arr = json::array();
  for (const auto& x : v) arr.push_back(rational_to_string(x));
  return arr;
}

json double_vec_to_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

json scaled_vec_to_json(const ScaledVec& s) {
  return json{{"scale_sq", rational_to_string(s.scale_sq)}, {"coords", rational_vec_to_json(s.coords)}};
}

ScaledVec scaled_vec_from_json(const json& j) {
  ScaledVec s;
  s.scale_sq = parse_rational(j.at("scale_sq").get<std::string>());
  for (const auto& e : j.at("coords")) s.coords.push_back(parse_exact_entry(e));
  return s;
}

}  // namespace

ParsedInput parse_input(const json& j, bool force_exact) {
  if (!j.is_object()) throw std::invalid_argument("input must be a JSON object");
  const bool has_vectors = j.contains("vectors");
  const bool has_subspaces = j.contains("subspaces");
  if (has_vectors == has_subspaces)
    throw std::invalid_argument("input needs exactly one of the fields vectors / subspaces");
  if (!j.contains("dim")) throw std::invalid_argument("input is missing the field dim");
  const std::size_t dim = j.at("dim").get<std::size_t>();

  bool exact;
  if (j.contains("field")) {
    const std::string field = j.at("field").get<std::string>();
    if (field == "exact") {
      exact = true;
    } else if (field == "float") {
      exact = false;
    } else {
      throw std::invalid_argument("field must be exact or float, got " + field);
    }
  } else {
    exact = contains_string_entry(j.at(has_vectors ? "vectors" : "subspaces"));
  }
  if (force_exact) exact = true;

  ParsedInput out;
  out.exact = exact;
  Tolerance tol;
  if (has_vectors) {
    if (exact) {
      out.exact_frame = FrameSpec<Rational>::from_vectors(
          dim, parse_vector_list<Rational>(j.at("vectors"), dim, parse_exact_entry));
      if (j.contains("labels")) out.exact_frame->labels = j.at("labels").get<std::vector<std::string>>();
    } else {
      out.float_frame = FrameSpec<double>::from_vectors(
          dim, parse_vector_list<double>(j.at("vectors"), dim, parse_float_entry));
      if (j.contains("labels")) out.float_frame->labels = j.at("labels").get<std::vector<std::string>>();
    }
    return out;
  }
  const auto& subs = j.at("subspaces");
  if (!subs.is_array() || subs.empty()) throw std::invalid_argument("subspaces must be a non-empty array");
  if (exact) {
    SubspaceFamily<Rational> fam;
    fam.dim_ambient = dim;
    for (const auto& s : subs) {
      const auto vecs = parse_vector_list<Rational>(s.at("basis"), dim, parse_exact_entry);
      fam.members.push_back(
          Subspace<Rational>::from_spanning(dim, Mat<Rational>::from_columns(vecs), tol));
    }
    fam.validate(tol);
    out.exact_family = fam;
  } else {
    SubspaceFamily<double> fam;
    fam.dim_ambient = dim;
    for (const auto& s : subs) {
      const auto vecs = parse_vector_list<double>(s.at("basis"), dim, parse_float_entry);
      fam.members.push_back(Subspace<double>::from_spanning(dim, Mat<double>::from_columns(vecs), tol));
    }
    fam.validate(tol);
    out.float_family = fam;
  }
  return out;
}

json frame_to_json(const FrameSpec<Rational>& f) {
  json vectors = json::array();
  for (std::size_t i = 0; i < f.count(); ++i) vectors.push_back(rational_vec_to_json(f.vec(i)));
  json out{{"field", "exact"}, {"dim", f.dim}, {"vectors", vectors}};
  if (!f.labels.empty()) out["labels"] = f.labels;
  return out;
}

json frame_to_json(const FrameSpec<double>& f) {
  json vectors = json::array();
  for (std::size_t i = 0; i < f.count(); ++i) vectors.push_back(double_vec_to_json(f.vec(i)));
  json out{{"field", "float"}, {"dim", f.dim}, {"vectors", vectors}};
  if (!f.labels.empty()) out["labels"] = f.labels;
  return out;
}

json family_to_json(const SubspaceFamily<Rational>& fam) {
  json subs = json::array();
  for (const auto& w : fam.members) {
    json basis = json::array();
    for (std::size_t j = 0; j < w.dim(); ++j) basis.push_back(rational_vec_to_json(w.basis.col(j)));
    subs.push_back(json{{"basis", basis}});
  }
  return json{{"field", "exact"}, {"dim", fam.dim_ambient}, {"subspaces", subs}};
}

json family_to_json(const SubspaceFamily<double>& fam) {
  json subs = json::array();
  for (const auto& w : fam.members) {
    json basis = json::array();
    for (std::size_t j = 0; j < w.dim(); ++j) basis.push_back(double_vec_to_json(w.basis.col(j)));
    subs.push_back(json{{"basis", basis}});
  }
  return json{{"field", "float"}, {"dim", fam.dim_ambient}, {"subspaces", subs}};
}

json flags_to_json(const FrameFlags& f) {
  return json{{"is_frame", f.is_frame}, {"lower_bound", f.lower_bound},
              {"upper_bound", f.upper_bound}, {"tight", f.tight},
              {"parseval", f.parseval},      {"equal_norm", f.equal_norm},
              {"unit_norm", f.unit_norm},    {"spark", f.spark},
              {"full_spark", f.full_spark}};
}

json witness_to_json(const WitnessPair& w) {
  json out;
  out["x"] = double_vec_to_json(w.x);
  out["y"] = double_vec_to_json(w.y);
  out["norm_x"] = norm(w.x);
  out["norm_y"] = norm(w.y);
  if (w.exact_x) {
    out["exact_x"] = scaled_vec_to_json(*w.exact_x);
    out["norm_sq_x"] = rational_to_string(w.exact_x->norm_sq());
  }
  if (w.exact_y) {
    out["exact_y"] = scaled_vec_to_json(*w.exact_y);
    out["norm_sq_y"] = rational_to_string(w.exact_y->norm_sq());
  }
  json table = json::array();
  for (const auto& m : w.measurements) table.push_back(json::array({m[0], m[1]}));
  out["measurements"] = table;
  if (!w.exact_measurements_sq.empty()) {
    json etable = json::array();
    for (const auto& m : w.exact_measurements_sq)
      etable.push_back(json::array({rational_to_string(m[0]), rational_to_string(m[1])}));
    out["exact_measurements_sq"] = etable;
  }
  if (w.has_partition) out["partition"] = w.partition;
  return out;
}

WitnessPair witness_from_json(const json& j) {
  WitnessPair w;
  auto read_side = [&](const char* plain, const char* exact, std::vector<double>& dst,
                       std::optional<ScaledVec>& ex) {
    if (j.contains(exact)) {
      ex = scaled_vec_from_json(j.at(exact));
      dst = ex->to_double_vec();
    } else if (j.contains(plain)) {
      const auto& arr = j.at(plain);
      if (arr.is_object()) {
        ex = scaled_vec_from_json(arr);
        dst = ex->to_double_vec();
      } else {
        for (const auto& e : arr) dst.push_back(parse_float_entry(e));
      }
    } else {
      throw std::invalid_argument(std::string("witness is missing ") + plain);
    }
  };
  read_side("x", "exact_x", w.x, w.exact_x);
  read_side("y", "exact_y", w.y, w.exact_y);
  if (j.contains("partition")) {
    w.partition = j.at("partition").get<std::vector<std::size_t>>();
    w.has_partition = true;
  }
  return w;
}

json verdict_to_json(const Verdict& v) {
  json out;
  out["status"] = status_name(v.status);
  out["rule"] = v.rule;
  if (v.certificate) {
    json c;
    c["description"] = v.certificate->description;
    if (!v.certificate->coefficients.empty())
      c["coefficients"] = double_vec_to_json(v.certificate->coefficients);
    if (v.certificate->exact_coefficients)
      c["exact_coefficients"] = rational_vec_to_json(*v.certificate->exact_coefficients);
    out["certificate"] = c;
  }
  if (v.witness) out["witness"] = witness_to_json(*v.witness);
  out["diagnostics"] = v.diagnostics;
  return out;
}

ConstructionOutput construct_from_json(const std::string& recipe, const json& params) {
  auto need = [&](const char* key) -> const json& {
    if (!params.contains(key))
      throw std::invalid_argument("construct " + recipe + " needs parameter " + key);
    return params.at(key);
  };
  if (recipe == "three-codim-one") return construct_three_codim_one(need("dim").get<std::size_t>());
  if (recipe == "partition-ln")
    return construct_partition_ln(need("dim").get<std::size_t>(),
                                  need("sizes").get<std::vector<std::size_t>>());
  if (recipe == "k-plus-one")
    return construct_k_plus_one(need("dim").get<std::size_t>(), need("k").get<std::size_t>());
  if (recipe == "hyperplane-family") {
    const auto input = parse_input(need("normals"), /*force_exact=*/true);
    if (!input.exact_frame)
      throw std::invalid_argument("hyperplane-family normals must be an exact vector list");
    return construct_hyperplane_family(*input.exact_frame);
  }
  if (recipe == "two-basis-pr") return construct_two_basis_pr();
  if (recipe == "cone-example") return construct_cone_example();
  if (recipe == "coordinate-multiplicity") {
    auto sets = need("sets").get<std::vector<std::vector<std::size_t>>>();
    for (auto& s : sets)
      for (auto& i : s) {
        if (i == 0) throw std::invalid_argument("coordinate-multiplicity indices are 1-based");
        --i;
      }
    return construct_coordinate_multiplicity(need("dim").get<std::size_t>(), sets);
  }
  throw std::invalid_argument("unknown construction recipe: " + recipe);
}

json construction_to_json(const ConstructionOutput& c) {
  json out;
  out["construction"] = c.name;
  if (c.exact_family) out["output"] = family_to_json(*c.exact_family);
  if (c.float_family) out["output"] = family_to_json(*c.float_family);
  if (c.exact_frame) out["output"] = frame_to_json(*c.exact_frame);
  if (c.float_frame) out["output"] = frame_to_json(*c.float_frame);
  json expected = c.expected;
  if (c.certificate) expected["certificate"] = rational_vec_to_json(*c.certificate);
  if (!expected.empty()) out["expected"] = expected;
  return out;
}

json load_json_file(const std::string& path) {
  if (path == "-") {
    json j;
    std::cin >> j;
    return j;
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace framecheck
