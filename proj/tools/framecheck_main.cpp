#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "framecheck/corpus.hpp"
#include "framecheck/io_json.hpp"
#include "framecheck/nnls.hpp"
#include "framecheck/retrieval.hpp"

namespace {

using namespace framecheck;

struct Options {
  std::string input_path;
  bool json_out = false;
  bool force_exact = false;
  std::uint64_t seed = 0;
  double tol_value = 1e-10;
  std::size_t starts = 256;
  std::size_t max_iter = 500;
  std::size_t max_enum = 24;
};

Tolerance make_tolerance(const Options& opt) {
  Tolerance tol;
  tol.rank_rel = opt.tol_value;
  tol.orth_rel = opt.tol_value;
  tol.validate();
  return tol;
}

SearchParams make_params(const Options& opt) {
  SearchParams p;
  p.seed = opt.seed;
  p.starts = opt.starts;
  p.max_iter = opt.max_iter;
  p.max_enum = opt.max_enum;
  p.validate();
  return p;
}

ParsedInput load_input(const Options& opt) {
  json j = load_json_file(opt.input_path);
  // Construction outputs wrap the object under "output" and corpus entries
  // under "input"; both pipe straight back into the decision verbs.
  if (j.is_object() && j.contains("output")) j = j.at("output");
  if (j.is_object() && j.contains("input")) j = j.at("input");
  return parse_input(j, opt.force_exact);
}

void emit(const Options& opt, const json& report, const std::string& human) {
  if (opt.json_out) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

std::string human_verdict(const Verdict& v) {
  std::string out = "status: " + status_name(v.status) + " via " + v.rule + "\n";
  if (v.certificate) {
    out += "certificate: " + v.certificate->description + "\n";
    if (v.certificate->exact_coefficients) {
      out += "coefficients:";
      for (const auto& c : *v.certificate->exact_coefficients) out += " " + rational_to_string(c);
      out += "\n";
    } else if (!v.certificate->coefficients.empty()) {
      out += "coefficients:";
      for (double c : v.certificate->coefficients) out += " " + std::to_string(c);
      out += "\n";
    }
  }
  if (v.witness) {
    out += "witness |x| = " + std::to_string(norm(v.witness->x)) +
           ", |y| = " + std::to_string(norm(v.witness->y)) + "\n";
    if (v.witness->exact()) {
      out += "witness squared norms (exact): " + rational_to_string(v.witness->exact_x->norm_sq()) +
             ", " + rational_to_string(v.witness->exact_y->norm_sq()) + "\n";
    }
  }
  for (const auto& [k, val] : v.diagnostics) out += "  " + k + ": " + val + "\n";
  return out;
}

json base_report(const char* command, const Options& opt) {
  return json{{"tool", "framecheck"}, {"command", command}, {"seed", opt.seed}};
}

template <typename T>
SubspaceFamily<T> lines_of(const FrameSpec<T>& f, const Tolerance& tol) {
  SubspaceFamily<T> fam;
  fam.dim_ambient = f.dim;
  for (std::size_t i = 0; i < f.count(); ++i)
    fam.members.push_back(Subspace<T>::from_spanning(f.dim, Mat<T>::from_columns({f.vec(i)}), tol));
  return fam;
}

int run_analyze(const Options& opt) {
  const auto input = load_input(opt);
  const auto tol = make_tolerance(opt);
  const auto params = make_params(opt);
  json report = base_report("analyze", opt);
  std::string human;

  if (input.is_frame()) {
    auto analyze_frame = [&](const auto& f) {
      const auto flags = classify(f, tol, params.max_enum);
      const auto nr = norm_retrieval_vectors(f, tol, params.max_enum);
      const auto pr = phase_retrieval_vectors(f, tol, params.max_enum);
      report["flags"] = flags_to_json(flags);
      report["norm_retrieval"] = verdict_to_json(nr);
      report["phase_retrieval"] = verdict_to_json(pr);
      human += "frame: " + std::to_string(f.count()) + " vectors in dimension " +
               std::to_string(f.dim) + "\n";
      human += "bounds: A = " + std::to_string(flags.lower_bound) +
               ", B = " + std::to_string(flags.upper_bound) + "\n";
      human += std::string("tight: ") + (flags.tight ? "yes" : "no") + ", parseval: " +
               (flags.parseval ? "yes" : "no") + ", spark: " + std::to_string(flags.spark) +
               (flags.full_spark ? " (full)" : "") + "\n";
      human += "norm retrieval -> " + human_verdict(nr);
      human += "phase retrieval -> " + human_verdict(pr);
    };
    if (input.exact_frame) analyze_frame(*input.exact_frame);
    if (input.float_frame) analyze_frame(*input.float_frame);
  } else {
    auto analyze_family = [&](const auto& fam) {
      const auto nr = decide_norm_retrieval_projections(fam, params, tol);
      const auto pr = decide_phase_retrieval_projections(fam, params, tol);
      report["norm_retrieval"] = verdict_to_json(nr);
      report["phase_retrieval"] = verdict_to_json(pr);
      human += "family: " + std::to_string(fam.count()) + " subspaces in dimension " +
               std::to_string(fam.dim_ambient) + "\n";
      human += "norm retrieval -> " + human_verdict(nr);
      human += "phase retrieval -> " + human_verdict(pr);
    };
    if (input.exact_family) analyze_family(*input.exact_family);
    if (input.float_family) analyze_family(*input.float_family);
  }
  emit(opt, report, human);
  return 0;
}

int run_decide(const Options& opt, bool phase) {
  const auto input = load_input(opt);
  const auto tol = make_tolerance(opt);
  const auto params = make_params(opt);
  Verdict vd;
  if (input.exact_frame) {
    vd = phase ? phase_retrieval_vectors(*input.exact_frame, tol, params.max_enum)
               : norm_retrieval_vectors(*input.exact_frame, tol, params.max_enum);
  } else if (input.float_frame) {
    vd = phase ? phase_retrieval_vectors(*input.float_frame, tol, params.max_enum)
               : norm_retrieval_vectors(*input.float_frame, tol, params.max_enum);
  } else if (input.exact_family) {
    vd = phase ? decide_phase_retrieval_projections(*input.exact_family, params, tol)
               : decide_norm_retrieval_projections(*input.exact_family, params, tol);
  } else {
    vd = phase ? decide_phase_retrieval_projections(*input.float_family, params, tol)
               : decide_norm_retrieval_projections(*input.float_family, params, tol);
  }
  json report = base_report(phase ? "decide-pr" : "decide-nr", opt);
  report["verdict"] = verdict_to_json(vd);
  emit(opt, report, human_verdict(vd));
  return 0;
}

int run_certify(const Options& opt, bool complement_too) {
  const auto input = load_input(opt);
  const auto tol = make_tolerance(opt);
  json report = base_report("certify", opt);
  std::string human;

  auto certify_family = [&](const auto& fam) {
    const auto cert = identity_certificate(fam, tol);
    report["found"] = cert.found;
    if (!cert.found) {
      human += "no identity certificate: the identity is outside the span of the projections\n";
      return;
    }
    using S = std::decay_t<decltype(cert.coefficients[0])>;
    json coeffs = json::array();
    std::string line = "certificate:";
    for (const auto& c : cert.coefficients) {
      if constexpr (std::is_same_v<S, Rational>) {
        coeffs.push_back(rational_to_string(c));
        line += " " + rational_to_string(c);
      } else {
        coeffs.push_back(c);
        line += " " + std::to_string(c);
      }
    }
    report["coefficients"] = coeffs;
    human += line + "\n";
    if (complement_too) {
      const auto comp = complement_identity_certificate(fam, cert.coefficients, tol);
      report["complement_applicable"] = comp.applicable;
      if (comp.applicable) {
        json bs = json::array();
        std::string bline = "complement certificate:";
        for (const auto& b : comp.coefficients) {
          if constexpr (std::is_same_v<S, Rational>) {
            bs.push_back(rational_to_string(b));
            bline += " " + rational_to_string(b);
          } else {
            bs.push_back(b);
            bline += " " + std::to_string(b);
          }
        }
        report["complement_coefficients"] = bs;
        human += bline + "\n";
      } else {
        human += "coefficients sum to one: no complement certificate from this route\n";
      }
    }
  };

  if (input.exact_family) {
    certify_family(*input.exact_family);
  } else if (input.float_family) {
    certify_family(*input.float_family);
  } else if (input.exact_frame) {
    certify_family(lines_of(*input.exact_frame, tol));
  } else {
    certify_family(lines_of(*input.float_frame, tol));
  }
  emit(opt, report, human);
  return 0;
}

int run_scale_check(const Options& opt) {
  const auto input = load_input(opt);
  if (!input.is_frame()) throw std::invalid_argument("scale-check expects a vector frame");
  const auto tol = make_tolerance(opt);
  const FrameSpec<double> f = input.exact_frame ? to_double(*input.exact_frame) : *input.float_frame;
  const std::size_t n = f.dim;
  Mat<double> a(n * (n + 1) / 2, f.count());
  std::vector<double> b(n * (n + 1) / 2, 0.0);
  std::size_t row = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j, ++row) {
      for (std::size_t k = 0; k < f.count(); ++k) a(row, k) = f.vectors(i, k) * f.vectors(j, k);
      b[row] = i == j ? 1.0 : 0.0;
    }
  const auto res = nonnegative_feasibility(a, b, tol);
  json report = base_report("scale-check", opt);
  report["feasible"] = res.feasible;
  report["residual"] = res.residual;
  std::string human;
  if (res.feasible) {
    json cs = json::array();
    human = "scalable: weights";
    for (double c : res.coefficients) {
      cs.push_back(c);
      human += " " + std::to_string(c);
    }
    report["coefficients"] = cs;
    human += " (squared scalings c with sum c_i phi_i phi_i^T = I)\n";
  } else {
    json ys = json::array();
    for (double y : res.farkas) ys.push_back(y);
    report["separating_certificate"] = ys;
    human = "not scalable: a separating functional blocks every nonnegative combination\n";
  }
  emit(opt, report, human);
  return 0;
}

int run_naimark(const Options& opt, bool complete) {
  const auto input = load_input(opt);
  if (!input.is_frame()) throw std::invalid_argument("naimark expects a vector frame");
  const auto tol = make_tolerance(opt);
  json report = base_report("naimark", opt);
  std::string human;
  if (complete) {
    const auto res = input.exact_frame ? bessel_to_parseval_completion(*input.exact_frame, tol)
                                       : bessel_to_parseval_completion(*input.float_frame, tol);
    report["completion"] = frame_to_json(res.frame);
    report["scale"] = res.scale;
    human = "completed to " + std::to_string(res.frame.count()) +
            " vectors with frame operator I (input scaled by " + std::to_string(res.scale) + ")\n";
  } else {
    const auto emb = input.exact_frame ? naimark_embed(*input.exact_frame, tol)
                                       : naimark_embed(*input.float_frame, tol);
    json p = json::array();
    for (std::size_t i = 0; i < emb.projection.rows(); ++i) {
      json prow = json::array();
      for (std::size_t j = 0; j < emb.projection.cols(); ++j) prow.push_back(emb.projection(i, j));
      p.push_back(prow);
    }
    report["ambient"] = emb.ambient;
    report["projection"] = p;
    human = "embedded into dimension " + std::to_string(emb.ambient) +
            "; the projection reproduces every frame vector\n";
  }
  emit(opt, report, human);
  return 0;
}

int run_witness(const Options& opt, const std::string& kind) {
  const json j = load_json_file(opt.input_path);
  const auto input = parse_input(j.at("input"), opt.force_exact);
  const auto w = witness_from_json(j.at("witness"));
  const bool phase = kind == "phase" || (j.contains("kind") && j.at("kind") == "phase");
  const auto tol = make_tolerance(opt);

  ReplayReport rep;
  if (input.exact_frame) {
    rep = replay_vector_witness(*input.exact_frame, w, phase);
  } else if (input.float_frame) {
    rep = replay_vector_witness(*input.float_frame, w, phase);
  } else if (input.exact_family) {
    rep = replay_projection_witness(*input.exact_family, w, phase, ReplayThresholds{}, tol);
  } else {
    rep = replay_projection_witness(*input.float_family, w, phase, ReplayThresholds{}, tol);
  }
  json report = base_report("witness", opt);
  report["measurements_equal"] = rep.measurements_equal;
  report["conclusion_violated"] = rep.conclusion_violated;
  report["max_measurement_diff"] = rep.max_measurement_diff;
  report["gap"] = rep.gap;
  report["exact_checked"] = rep.exact_checked;
  report["valid"] = rep.ok;
  const std::string human = rep.ok
                                ? "witness replays: measurements agree and the conclusion fails\n"
                                : "witness rejected\n";
  emit(opt, report, human);
  return rep.ok ? 0 : 1;
}

int run_construct(const std::string& recipe, const json& params) {
  const auto out = construct_from_json(recipe, params);
  std::cout << construction_to_json(out).dump(2) << "\n";
  return 0;
}

int run_corpus_cmd(const Options& opt, const std::string& dir, const std::string& filter) {
  const auto report = run_corpus(dir, filter, make_params(opt));
  if (opt.json_out) {
    std::cout << corpus_report_to_json(report).dump(2) << "\n";
  } else {
    for (const auto& entry : report.entries) {
      std::cout << (entry.pass ? "PASS " : "FAIL ") << entry.id << "\n";
      for (const auto& check : entry.checks)
        if (!check.pass)
          std::cout << "  " << check.name << ": expected " << check.expected << ", got "
                    << check.actual << "\n";
    }
    std::cout << (report.all_pass ? "all entries pass" : "some entries FAILED") << "\n";
  }
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"framecheck: decides norm retrieval and phase retrieval for vector frames and "
               "subspace families, with exact rational certificates and replayable witnesses"};
  app.require_subcommand(1);

  Options opt;
  app.add_flag("--json", opt.json_out, "emit a JSON report");
  app.add_option("--seed", opt.seed, "seed for randomized searches");
  app.add_option("--tol", opt.tol_value, "relative tolerance for float-mode decisions");
  app.add_option("--starts", opt.starts, "random starts for counterexample searches");
  app.add_option("--max-iter", opt.max_iter, "iteration cap per search start");
  app.add_option("--max-enum", opt.max_enum, "partition/subset enumeration cap");
  app.add_flag("--exact", opt.force_exact, "force exact mode; float literals become errors");

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("input", opt.input_path, "input file (- for standard input)")->required();
  };

  auto* analyze = app.add_subcommand("analyze", "classification flags plus both retrieval verdicts");
  add_input(analyze);
  auto* decide_nr = app.add_subcommand("decide-nr", "norm retrieval verdict");
  add_input(decide_nr);
  auto* decide_pr = app.add_subcommand("decide-pr", "phase retrieval verdict");
  add_input(decide_pr);

  bool complement_too = false;
  auto* certify = app.add_subcommand("certify", "identity certificate search");
  add_input(certify);
  certify->add_flag("--complement", complement_too, "also convert the certificate for the complements");

  auto* scale = app.add_subcommand("scale-check", "nonnegative scalability of a vector frame");
  add_input(scale);

  bool complete = false;
  auto* naimark = app.add_subcommand("naimark", "orthonormal-basis embedding of a Parseval frame");
  add_input(naimark);
  naimark->add_flag("--complete", complete, "complete a frame to a Parseval frame of 2M-1 vectors");

  std::string witness_kind = "norm";
  auto* witness = app.add_subcommand("witness", "replay a witness file");
  add_input(witness);
  witness->add_option("--kind", witness_kind, "norm or phase")->check(CLI::IsMember({"norm", "phase"}));

  std::string recipe;
  std::size_t c_dim = 3, c_k = 1;
  std::vector<std::size_t> c_sizes;
  std::vector<std::string> c_sets;
  std::string c_normals;
  auto* construct = app.add_subcommand("construct", "emit a named construction");
  construct
      ->add_option("recipe", recipe,
                   "three-codim-one | partition-ln | k-plus-one | hyperplane-family | "
                   "two-basis-pr | cone-example | coordinate-multiplicity")
      ->required();
  construct->add_option("--dim", c_dim, "ambient dimension");
  construct->add_option("--k", c_k, "parameter k for k-plus-one");
  construct->add_option("--sizes", c_sizes, "block sizes for partition-ln")->delimiter(',');
  construct
      ->add_option("--sets", c_sets, "1-based index sets for coordinate-multiplicity, e.g. 1,2;3,4")
      ->delimiter(';');
  construct->add_option("--normals", c_normals, "JSON file of exact normals for hyperplane-family");

  std::string corpus_dir = "corpus";
  std::string corpus_filter;
  auto* corpus_cmd = app.add_subcommand("corpus", "run the registry of worked instances");
  auto* corpus_run = corpus_cmd->add_subcommand("run", "replay entries against the engine");
  corpus_run->add_option("--dir", corpus_dir, "registry directory");
  corpus_run->add_option("--filter", corpus_filter, "only ids containing this substring");
  corpus_cmd->require_subcommand(1);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  corpus_run->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(opt);
    if (decide_nr->parsed()) return run_decide(opt, false);
    if (decide_pr->parsed()) return run_decide(opt, true);
    if (certify->parsed()) return run_certify(opt, complement_too);
    if (scale->parsed()) return run_scale_check(opt);
    if (naimark->parsed()) return run_naimark(opt, complete);
    if (witness->parsed()) return run_witness(opt, witness_kind);
    if (construct->parsed()) {
      json params;
      params["dim"] = c_dim;
      if (construct->count("--k")) params["k"] = c_k;
      if (!c_sizes.empty()) params["sizes"] = c_sizes;
      if (!c_sets.empty()) {
        json sets = json::array();
        for (const auto& group : c_sets) {
          json one = json::array();
          std::size_t pos = 0;
          while (pos < group.size()) {
            auto comma = group.find(',', pos);
            if (comma == std::string::npos) comma = group.size();
            one.push_back(std::stoul(group.substr(pos, comma - pos)));
            pos = comma + 1;
          }
          sets.push_back(one);
        }
        params["sets"] = sets;
      }
      if (!c_normals.empty()) params["normals"] = load_json_file(c_normals);
      return run_construct(recipe, params);
    }
    if (corpus_cmd->parsed()) return run_corpus_cmd(opt, corpus_dir, corpus_filter);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::logic_error& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
