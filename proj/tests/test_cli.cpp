#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "framecheck/io_json.hpp"

using namespace framecheck;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(FRAMECHECK_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buffer.data(), buffer.size(), pipe)) res.output += buffer.data();
  const int raw = pclose(pipe);
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("decide-nr on the worked three-subspace family") {
  const auto path = write_temp("fc-cli-ex45.json", R"({
    "field": "exact", "dim": 3,
    "subspaces": [
      {"basis": [["1","0","0"],["0","1","0"]]},
      {"basis": [["0","1","0"],["0","0","1"]]},
      {"basis": [["0","1","0"]]}
    ]})");
  const auto res = run_cli("--json decide-nr " + path.string());
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j.at("verdict").at("status") == "YesExact");
  const auto coeffs = j.at("verdict").at("certificate").at("exact_coefficients");
  CHECK(coeffs == json::array({"1", "1", "-1"}));
}

TEST_CASE("construct pipes into decide-nr through stdin") {
  const auto res =
      run_cli("construct three-codim-one --dim 3 > /tmp/fc-cli-tc1.json && " +
              std::string(FRAMECHECK_CLI_PATH) + " decide-nr /tmp/fc-cli-tc1.json");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("ProbablyYes") != std::string::npos);
}

TEST_CASE("scale-check on the three unit vectors at 120 degrees") {
  const auto path = write_temp("fc-cli-mb.json", R"({
    "field": "float", "dim": 2,
    "vectors": [[0.0, 1.0], [-0.8660254037844386, -0.5], [0.8660254037844386, -0.5]]})");
  const auto res = run_cli("--json scale-check " + path.string());
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.output);
  REQUIRE(j.at("feasible").get<bool>());
  for (const auto& c : j.at("coefficients")) CHECK(std::abs(c.get<double>() - 2.0 / 3.0) < 1e-6);
}

TEST_CASE("witness replay accepts the classic hyperplane pair") {
  const auto path = write_temp("fc-cli-witness.json", R"({
    "input": {"field": "float", "dim": 3,
      "subspaces": [
        {"basis": [[0.0,1.0,0.0],[0.0,0.0,1.0]]},
        {"basis": [[1.0,0.0,0.0],[0.0,0.0,1.0]]}
      ]},
    "witness": {"x": [1.0, 1.0, 1.0],
                "y": [1.4142135623730951, 1.4142135623730951, 0.0]}})");
  const auto res = run_cli("--json witness " + path.string());
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j.at("valid").get<bool>());
}

TEST_CASE("corpus run passes and reports per-entry lines") {
  const auto res = run_cli("corpus run --dir " + std::string(FRAMECHECK_CORPUS_DIR));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("PASS example-4.5") != std::string::npos);
  CHECK(res.output.find("all entries pass") != std::string::npos);
  CHECK(res.output.find("FAIL") == std::string::npos);
}

TEST_CASE("malformed input yields exit code 1 with a one-line diagnosis") {
  const auto path = write_temp("fc-cli-bad.json", R"({"field":"exact","dim":2,
    "vectors": [["1","0"],["1"]]})");
  const auto res = run_cli("decide-nr " + path.string());
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("error:") != std::string::npos);

  // Float literals are rejected under --exact.
  const auto fpath = write_temp("fc-cli-float.json", R"({"field":"exact","dim":2,
    "vectors": [["1","0"],[0.5, 1.5]]})");
  const auto res2 = run_cli("--exact decide-nr " + fpath.string());
  CHECK(res2.exit_code == 1);
  CHECK(res2.output.find("float literal") != std::string::npos);
}

TEST_CASE("json reports are byte-identical for identical seeds") {
  const auto path = write_temp("fc-cli-seeded.json", R"({
    "field": "float", "dim": 3,
    "subspaces": [
      {"basis": [[0.0,1.0,0.0],[0.0,0.0,1.0]]},
      {"basis": [[1.0,0.0,0.0],[0.0,0.0,1.0]]}
    ]})");
  const auto a = run_cli("--json --seed 7 decide-nr " + path.string());
  const auto b = run_cli("--json --seed 7 decide-nr " + path.string());
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  const json j = json::parse(a.output);
  CHECK(j.at("verdict").at("status") == "NoWithWitness");
}

TEST_CASE("emitted constructions re-enter the decision verbs unchanged") {
  const auto res = run_cli("construct partition-ln --dim 3 --sizes 2,2,2 > /tmp/fc-cli-pln.json && " +
                           std::string(FRAMECHECK_CLI_PATH) + " --json decide-nr /tmp/fc-cli-pln.json");
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j.at("verdict").at("status") == "YesExact");
}

TEST_CASE("analyze emits a full frame report that re-parses") {
  const auto path = write_temp("fc-cli-frame.json", R"({
    "field": "exact", "dim": 2,
    "vectors": [["1","0"],["0","1"],["1","1"]]})");
  const auto res = run_cli("--json analyze " + path.string());
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j.at("flags").at("spark") == 3);
  CHECK(j.at("flags").at("full_spark").get<bool>());
  // Full spark with 2N-1 vectors: phase retrieval holds and implies norm
  // retrieval.
  CHECK(j.at("norm_retrieval").at("status") == "YesExact");
  CHECK(j.at("phase_retrieval").at("status") == "YesExact");
}
