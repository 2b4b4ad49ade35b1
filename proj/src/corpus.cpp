#include "framecheck/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "framecheck/constructions.hpp"
#include "framecheck/nnls.hpp"
#include "framecheck/retrieval.hpp"

namespace framecheck {

namespace {

struct EntryContext {
  ParsedInput input;
  std::optional<std::vector<Rational>> construction_certificate;
  SearchParams params;
  Tolerance tol;
};

std::string bool_name(bool b) { return b ? "true" : "false"; }

CorpusCheck check_equal(const std::string& name, const std::string& expected, const std::string& actual) {
  CorpusCheck c{name, expected == actual, expected, actual};
  return c;
}

template <typename F>
json dispatch_frame(const EntryContext& ctx, F&& fn) {
  if (ctx.input.exact_frame) return fn(*ctx.input.exact_frame);
  if (ctx.input.float_frame) return fn(*ctx.input.float_frame);
  throw std::invalid_argument("expectation needs a vector-frame input");
}

template <typename F>
json dispatch_family(const EntryContext& ctx, F&& fn) {
  if (ctx.input.exact_family) return fn(*ctx.input.exact_family);
  if (ctx.input.float_family) return fn(*ctx.input.float_family);
  throw std::invalid_argument("expectation needs a subspace-family input");
}

// Compares a verdict against an expectation block: status, optionally the
// fired rule, exact certificate values, exact witness norms and gap.
void compare_verdict(const json& expect, const Verdict& vd, const std::string& prefix,
                     std::vector<CorpusCheck>& checks) {
  checks.push_back(check_equal(prefix + ".status", expect.at("status").get<std::string>(),
                               status_name(vd.status)));
  if (expect.contains("rule"))
    checks.push_back(check_equal(prefix + ".rule", expect.at("rule").get<std::string>(), vd.rule));
  if (expect.contains("certificate")) {
    std::string actual = "absent";
    if (vd.certificate && vd.certificate->exact_coefficients) {
      actual = "";
      for (const auto& c : *vd.certificate->exact_coefficients)
        actual += (actual.empty() ? "" : ",") + rational_to_string(c);
    } else if (vd.certificate && !vd.certificate->coefficients.empty()) {
      for (double c : vd.certificate->coefficients)
        actual += (actual.empty() ? "" : ",") + std::to_string(c);
    }
    std::string expected;
    for (const auto& e : expect.at("certificate"))
      expected += (expected.empty() ? "" : ",") + e.get<std::string>();
    checks.push_back(check_equal(prefix + ".certificate", expected, actual));
  }
  if (expect.contains("witness_norms_sq")) {
    std::string actual = "absent";
    if (vd.witness && vd.witness->exact()) {
      actual = rational_to_string(vd.witness->exact_x->norm_sq()) + "," +
               rational_to_string(vd.witness->exact_y->norm_sq());
    }
    const auto& arr = expect.at("witness_norms_sq");
    const std::string expected =
        arr.at(0).get<std::string>() + "," + arr.at(1).get<std::string>();
    checks.push_back(check_equal(prefix + ".witness_norms_sq", expected, actual));
  }
  if (expect.contains("witness_norm_gap_sq")) {
    std::string actual = "absent";
    if (vd.witness && vd.witness->exact()) {
      Rational gap = vd.witness->exact_y->norm_sq() - vd.witness->exact_x->norm_sq();
      if (gap < 0) gap = -gap;
      actual = rational_to_string(gap);
    }
    checks.push_back(check_equal(prefix + ".witness_norm_gap_sq",
                                 expect.at("witness_norm_gap_sq").get<std::string>(), actual));
  }
}

template <typename T>
std::vector<T> parse_coefficients(const json& arr);

template <>
std::vector<Rational> parse_coefficients<Rational>(const json& arr) {
  std::vector<Rational> out;
  for (const auto& e : arr)
    out.push_back(e.is_string() ? parse_rational(e.get<std::string>()) : Rational(e.get<long long>()));
  return out;
}

template <>
std::vector<double> parse_coefficients<double>(const json& arr) {
  std::vector<double> out;
  for (const auto& e : arr)
    out.push_back(e.is_string() ? to_double(parse_rational(e.get<std::string>())) : e.get<double>());
  return out;
}

template <typename T>
void replay_certificate_list(const SubspaceFamily<T>& fam, const json& expect,
                             std::vector<CorpusCheck>& checks, const Tolerance& tol) {
  std::size_t idx = 0;
  for (const auto& item : expect) {
    const auto coeffs = parse_coefficients<T>(item.at("coefficients"));
    const std::size_t n = fam.dim_ambient;
    const auto projs = projections_of(fam, tol);
    Mat<T> rebuilt(n, n);
    for (std::size_t k = 0; k < coeffs.size(); ++k) rebuilt = rebuilt + scaled(projs[k], coeffs[k]);
    bool ok;
    if constexpr (std::is_same_v<T, Rational>) {
      ok = rebuilt == Mat<Rational>::identity(n);
    } else {
      ok = frobenius(rebuilt - Mat<double>::identity(n)) <= 1e-9 * std::sqrt(static_cast<double>(n));
    }
    const std::string tag = "replay_certificates[" + std::to_string(idx) + "]";
    checks.push_back(check_equal(tag + ".reconstructs_identity", "true", bool_name(ok)));
    if (item.contains("sum")) {
      T sum(0);
      for (const auto& c : coeffs) sum += c;
      std::string actual;
      if constexpr (std::is_same_v<T, Rational>) {
        actual = rational_to_string(sum);
      } else {
        actual = std::to_string(sum);
      }
      checks.push_back(check_equal(tag + ".sum", item.at("sum").get<std::string>(), actual));
    }
    ++idx;
  }
}

// Sign-flip pair search for the embedding tail property: draws seeded x,
// solves for y matching |<y, phi_i>| = |<x, phi_i>| under each sign
// pattern, and evaluates the tail check on every solvable pair.
template <typename T>
void run_naimark_tail(const FrameSpec<T>& f, const json& expect, std::vector<CorpusCheck>& checks,
                      const SearchParams& params, const Tolerance& tol) {
  const std::size_t n = f.dim;
  const std::size_t m = f.count();
  std::mt19937_64 rng(params.seed + 17);
  const std::size_t pairs = expect.contains("pairs") ? expect.at("pairs").get<std::size_t>() : 200;
  const FrameSpec<double> fd = [&] {
    if constexpr (std::is_same_v<T, Rational>) return to_double(f);
    else return f;
  }();
  Mat<double> analysis(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) analysis(i, j) = fd.vectors(j, i);

  bool all_hold = true;
  std::size_t tested = 0;
  for (std::size_t trial = 0; trial < pairs && (all_hold || tested == 0); ++trial) {
    std::vector<double> x(n);
    for (auto& c : x) c = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
    if (norm(x) < 1e-6) continue;
    const std::vector<double> coeffs = mat_vec(analysis, x);
    const std::uint32_t patterns = 1u << std::min<std::size_t>(m, 12);
    for (std::uint32_t mask = 1; mask < patterns; ++mask) {
      std::vector<double> target(m);
      for (std::size_t i = 0; i < m; ++i)
        target[i] = (mask & (1u << i)) ? -coeffs[i] : coeffs[i];
      const auto sol = solve_linear(analysis, target, tol);
      if (sol.kind == SolveKind::Infeasible) continue;
      ++tested;
      if (!naimark_nr_tail_check(fd, x, sol.x0, tol)) all_hold = false;
    }
  }
  checks.push_back(check_equal("naimark_tail.holds", expect.at("holds").get<std::string>(),
                               bool_name(all_hold)));
}

void run_expectations(const std::string& id, const json& expectations, EntryContext& ctx,
                      std::vector<CorpusCheck>& checks) {
  for (const auto& [key, expect] : expectations.items()) {
    if (key == "classify") {
      const json flags = dispatch_frame(ctx, [&](const auto& f) { return flags_to_json(classify(f, ctx.tol)); });
      for (const auto& [fk, fv] : expect.items()) {
        if (fk == "lower_bound" || fk == "upper_bound") {
          const double got = flags.at(fk).get<double>();
          const bool ok = std::abs(got - fv.get<double>()) <= 1e-9 * std::max(1.0, std::abs(fv.get<double>()));
          checks.push_back(check_equal("classify." + fk, fv.dump(), ok ? fv.dump() : std::to_string(got)));
        } else {
          checks.push_back(check_equal("classify." + fk, fv.dump(), flags.at(fk).dump()));
        }
      }
    } else if (key == "nr_vectors" || key == "pr_vectors") {
      const bool phase = key == "pr_vectors";
      const json got = dispatch_frame(ctx, [&](const auto& f) {
        const Verdict vd = phase ? phase_retrieval_vectors(f, ctx.tol, ctx.params.max_enum)
                                 : norm_retrieval_vectors(f, ctx.tol, ctx.params.max_enum);
        // Witnesses coming out of the registry must always replay.
        if (vd.witness) {
          const auto rep = replay_vector_witness(f, *vd.witness, phase);
          if (!rep.ok) throw std::logic_error("corpus witness failed replay in " + key);
        }
        return verdict_to_json(vd);
      });
      checks.push_back(check_equal(key + ".status", expect.at("status").get<std::string>(),
                                   got.at("status").get<std::string>()));
    } else if (key == "decide_nr" || key == "decide_pr" || key == "perp_decide_nr" ||
               key == "perp_decide_pr") {
      const bool phase = key == "decide_pr" || key == "perp_decide_pr";
      const bool perp = key.rfind("perp_", 0) == 0;
      Verdict vd;
      if (ctx.input.exact_family) {
        auto fam = perp ? perp_family(*ctx.input.exact_family, ctx.tol) : *ctx.input.exact_family;
        vd = phase ? decide_phase_retrieval_projections(fam, ctx.params, ctx.tol)
                   : decide_norm_retrieval_projections(fam, ctx.params, ctx.tol);
        if (vd.witness) {
          const auto rep = replay_projection_witness(fam, *vd.witness, phase, ReplayThresholds{}, ctx.tol);
          if (!rep.ok) throw std::logic_error("corpus witness failed replay in " + key);
        }
      } else if (ctx.input.float_family) {
        auto fam = perp ? perp_family(*ctx.input.float_family, ctx.tol) : *ctx.input.float_family;
        vd = phase ? decide_phase_retrieval_projections(fam, ctx.params, ctx.tol)
                   : decide_norm_retrieval_projections(fam, ctx.params, ctx.tol);
        if (vd.witness) {
          const auto rep = replay_projection_witness(fam, *vd.witness, phase, ReplayThresholds{}, ctx.tol);
          if (!rep.ok) throw std::logic_error("corpus witness failed replay in " + key);
        }
      } else {
        throw std::invalid_argument("entry " + id + ": " + key + " needs a subspace family");
      }
      compare_verdict(expect, vd, key, checks);
    } else if (key == "identity_certificate") {
      // Vector frames are tested through the family of their spanned lines.
      json got;
      if (ctx.input.is_frame()) {
        got = dispatch_frame(ctx, [&](const auto& f) {
          using S = std::decay_t<decltype(f.vectors(0, 0))>;
          SubspaceFamily<S> lines;
          lines.dim_ambient = f.dim;
          for (std::size_t i = 0; i < f.count(); ++i)
            lines.members.push_back(Subspace<S>::from_spanning(
                f.dim, Mat<S>::from_columns({f.vec(i)}), ctx.tol));
          return json{{"found", identity_certificate(lines, ctx.tol).found}};
        });
      } else {
        got = dispatch_family(ctx, [&](const auto& fam) {
          return json{{"found", identity_certificate(fam, ctx.tol).found}};
        });
      }
      checks.push_back(check_equal("identity_certificate.found", expect.at("found").dump(),
                                   got.at("found").dump()));
    } else if (key == "replay_certificates") {
      if (ctx.input.exact_family) {
        replay_certificate_list(*ctx.input.exact_family, expect, checks, ctx.tol);
      } else if (ctx.input.float_family) {
        replay_certificate_list(*ctx.input.float_family, expect, checks, ctx.tol);
      } else {
        throw std::invalid_argument("entry " + id + ": replay_certificates needs a subspace family");
      }
    } else if (key == "complement_identity") {
      if (!ctx.input.exact_family)
        throw std::invalid_argument("entry " + id + ": complement_identity needs an exact family");
      const auto coeffs = parse_coefficients<Rational>(expect.at("given"));
      const auto res = complement_identity_certificate(*ctx.input.exact_family, coeffs, ctx.tol);
      checks.push_back(check_equal("complement_identity.applicable", expect.at("applicable").dump(),
                                   res.applicable ? "true" : "false"));
    } else if (key == "scalability") {
      const json got = dispatch_frame(ctx, [&](const auto& f) {
        const auto fd = [&] {
          if constexpr (std::is_same_v<std::decay_t<decltype(f)>, FrameSpec<Rational>>)
            return to_double(f);
          else
            return f;
        }();
        const std::size_t n = fd.dim;
        Mat<double> a(n * (n + 1) / 2, fd.count());
        std::vector<double> b(n * (n + 1) / 2, 0.0);
        std::size_t row = 0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i; j < n; ++j, ++row) {
            for (std::size_t k = 0; k < fd.count(); ++k) a(row, k) = fd.vectors(i, k) * fd.vectors(j, k);
            b[row] = i == j ? 1.0 : 0.0;
          }
        const auto res = nonnegative_feasibility(a, b, ctx.tol);
        return json{{"feasible", res.feasible}};
      });
      checks.push_back(check_equal("scalability.feasible",
                                   expect.at("feasible").dump(), got.at("feasible").dump()));
    } else if (key == "completion") {
      const json got = dispatch_frame(ctx, [&](const auto& f) {
        const auto res = bessel_to_parseval_completion(f, ctx.tol);
        const auto flags = classify(res.frame, ctx.tol, 32);
        return json{{"count", res.frame.count()}, {"parseval", flags.parseval}};
      });
      checks.push_back(check_equal("completion.count", expect.at("count").dump(), got.at("count").dump()));
      checks.push_back(
          check_equal("completion.parseval", expect.at("parseval").dump(), got.at("parseval").dump()));
    } else if (key == "naimark_tail") {
      if (ctx.input.exact_frame) {
        run_naimark_tail(*ctx.input.exact_frame, expect, checks, ctx.params, ctx.tol);
      } else if (ctx.input.float_frame) {
        run_naimark_tail(*ctx.input.float_frame, expect, checks, ctx.params, ctx.tol);
      } else {
        throw std::invalid_argument("entry " + id + ": naimark_tail needs a vector frame");
      }
    } else if (key == "construction_certificate") {
      if (!ctx.construction_certificate)
        throw std::invalid_argument("entry " + id + ": no construction certificate to replay");
      json item = json::object();
      json coeff_arr = json::array();
      for (const auto& c : *ctx.construction_certificate) coeff_arr.push_back(rational_to_string(c));
      item["coefficients"] = coeff_arr;
      json list = json::array({item});
      if (ctx.input.exact_family) {
        replay_certificate_list(*ctx.input.exact_family, list, checks, ctx.tol);
      } else {
        throw std::invalid_argument("entry " + id + ": construction certificate needs an exact family");
      }
      checks.back().name = "construction_certificate.reconstructs_identity";
    } else {
      throw std::invalid_argument("corpus entry " + id + " names an unknown operation: " + key);
    }
  }
}

}  // namespace

CorpusReport run_corpus(const std::string& dir, const std::string& filter, const SearchParams& params) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  CorpusReport report;
  report.all_pass = true;
  for (const auto& path : files) {
    const json j = load_json_file(path.string());
    const std::string id = j.at("id").get<std::string>();
    if (!filter.empty() && id.find(filter) == std::string::npos) continue;

    CorpusEntryResult result;
    result.id = id;
    result.source = j.value("source", "");

    EntryContext ctx;
    ctx.params = params;
    if (j.contains("construct")) {
      const auto& c = j.at("construct");
      const auto output =
          construct_from_json(c.at("recipe").get<std::string>(), c.value("params", json::object()));
      ctx.construction_certificate = output.certificate;
      if (output.exact_family) {
        ctx.input.exact = true;
        ctx.input.exact_family = output.exact_family;
      } else if (output.float_family) {
        ctx.input.float_family = output.float_family;
      } else if (output.exact_frame) {
        ctx.input.exact = true;
        ctx.input.exact_frame = output.exact_frame;
      } else if (output.float_frame) {
        ctx.input.float_frame = output.float_frame;
      }
    } else {
      ctx.input = parse_input(j.at("input"));
    }

    run_expectations(id, j.at("expectations"), ctx, result.checks);
    result.pass = std::all_of(result.checks.begin(), result.checks.end(),
                              [](const CorpusCheck& c) { return c.pass; });
    report.all_pass = report.all_pass && result.pass;
    report.entries.push_back(std::move(result));
  }
  return report;
}

json corpus_report_to_json(const CorpusReport& report) {
  json out;
  out["all_pass"] = report.all_pass;
  json entries = json::array();
  for (const auto& e : report.entries) {
    json je{{"id", e.id}, {"pass", e.pass}};
    if (!e.source.empty()) je["source"] = e.source;
    json checks = json::array();
    for (const auto& c : e.checks) {
      json jc{{"name", c.name}, {"pass", c.pass}};
      if (!c.pass) {
        jc["expected"] = c.expected;
        jc["actual"] = c.actual;
      }
      checks.push_back(jc);
    }
    je["checks"] = checks;
    entries.push_back(je);
  }
  out["entries"] = entries;
  return out;
}

}  // namespace framecheck
