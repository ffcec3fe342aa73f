/*
 * Copyright 2026 The cosi Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "catch_amalgamated.hpp"
#include "cosi/runner.hpp"
#include "cosi/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cosi;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"(
name: minimal
seed: 5
generators:
  Z: {type: zero, dim: 4}
spaces:
  L2: {type: lp, p: 2, dim: 4}
checks:
  - name: law
    type: semigroup_law
    tol: 1.0e-12
    generator: Z
    space: L2
    times: [0.5, 1, 2]
)";

const std::string kMixed = R"(
name: mixed
seed: 11
generators:
  lap: {type: tridiag, n: 6}
  bumped: {type: perturb, base: lap, row: 2, col: 3, delta: 1.0e-3}
spaces:
  L1: {type: lp, p: 1, dim: 6}
  L4: {type: lp, p: 4, dim: 6}
functors:
  Kinf: {type: real_k, theta: 0.5, q: inf}
checks:
  - name: same
    type: operator_consistency
    tol: 1.0e-12
    generators: [lap, lap]
    spaces: [L1, L4]
  - name: bumped
    type: operator_consistency
    tol: 1.0e-6
    generators: [lap, bumped]
    spaces: [L1, L4]
  - name: refused
    type: interpolated_semigroup
    tol: 1.0e-8
    generators: [lap, lap]
    spaces: [L1, L4]
    functor: Kinf
    times: [0.5]
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

Scenario only(const Scenario& sc, std::initializer_list<std::string> names) {
  Scenario out = sc;
  out.checks.clear();
  for (const auto& c : sc.checks)
    for (const auto& n : names)
      if (c.name == n) out.checks.push_back(c);
  return out;
}

std::string fixture(const std::string& stem) { return std::string(COSI_TEST_FIXTURE_DIR) + "/" + stem + ".yaml"; }

}  // namespace

TEST_CASE("minimal scenario loads, runs and passes", "[cli]") {
  const auto sc = parse_scenario(kMinimal);
  CHECK(sc.name == "minimal");
  CHECK(sc.seed == 5);
  REQUIRE(sc.checks.size() == 1);
  const auto run = run_scenario(sc, 1);
  CHECK(run.exit_code() == 0);
  CHECK(run.checks[0].report.verdict() == Verdict::Pass);
}

TEST_CASE("dangling references are rejected with the offending name", "[cli]") {
  const auto text = replace(kMixed, "functor: Kinf", "functor: F9");
  const auto msg = error_of(text);
  CHECK(msg.find("F9") != std::string::npos);
  CHECK(msg.find("line ") != std::string::npos);
  CHECK(error_of(replace(kMixed, "generators: [lap, bumped]", "generators: [lap, nope]")).find("nope") != std::string::npos);
  CHECK(error_of(replace(kMixed, "base: lap", "base: later")).find("later") != std::string::npos);
}

TEST_CASE("parse errors carry line and column", "[cli]") {
  const auto msg = error_of("name: x\nseed: 1\nchecks: [unclosed\n");
  CHECK(msg.find("line ") != std::string::npos);
  CHECK(msg.find("column ") != std::string::npos);
  const auto bad_key = error_of(replace(kMinimal, "    times: [0.5, 1, 2]", "    times: [0.5, 1, 2]\n    colour: blue"));
  CHECK(bad_key.find("colour") != std::string::npos);
  CHECK(bad_key.find("line 15, column 5") != std::string::npos);
}

TEST_CASE("parameter ranges are validated", "[cli]") {
  CHECK(error_of(replace(kMixed, "theta: 0.5", "theta: 1.5")).find("0 < theta < 1") != std::string::npos);
  CHECK(error_of(replace(kMixed, "theta: 0.5", "theta: 0")).find("theta") != std::string::npos);
  CHECK(error_of(replace(kMixed, "{type: lp, p: 1, dim: 6}", "{type: lp, p: 0.5, dim: 6}")).find("p") != std::string::npos);
  CHECK(!error_of(replace(kMinimal, "tol: 1.0e-12", "tol: 0")).empty());
  CHECK(!error_of(replace(kMinimal, "tol: 1.0e-12", "tol: -1")).empty());
  CHECK(error_of(replace(kMinimal, "seed: 5\n", "")).find("seed") != std::string::npos);
  CHECK(!error_of(kMinimal + "  - name: law\n    type: semigroup_law\n    tol: 1\n    generator: Z\n    space: L2\n    times: [1]\n").empty());
  CHECK(error_of(replace(kMinimal, "type: semigroup_law", "type: no_such_check")).find("no_such_check") != std::string::npos);
  CHECK(!error_of(replace(kMinimal, "dim: 4}\nchecks", "dim: 5}\nchecks")).empty());
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.yaml"), ScenarioError);
}

TEST_CASE("the refinement fixture loads with four levels", "[cli]") {
  const auto sc = load_scenario(fixture("lp-domain-interpolation"));
  REQUIRE(sc.ladder.has_value());
  CHECK(sc.ladder->sizes == std::vector<int>{16, 32, 64, 128});
  CHECK(sc.ladder->levels.size() == 4);
  CHECK(sc.ladder->levels[3].size() == 128);
}

TEST_CASE("every shipped fixture loads", "[cli]") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(COSI_TEST_FIXTURE_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    INFO(entry.path());
    const auto sc = load_scenario(entry.path().string());
    CHECK(sc.name == entry.path().stem().string());
    CHECK_FALSE(sc.checks.empty());
    ++count;
  }
  CHECK(count >= 9);
}

TEST_CASE("exit codes follow the verdicts", "[cli]") {
  const auto sc = parse_scenario(kMixed);
  CHECK(run_scenario(only(sc, {"same"}), 1).exit_code() == 0);
  CHECK(run_scenario(only(sc, {"bumped"}), 1).exit_code() == 1);
  CHECK(run_scenario(only(sc, {"refused"}), 1).exit_code() == 2);
  CHECK(run_scenario(only(sc, {"same", "refused"}), 1).exit_code() == 2);
  const auto all = run_scenario(sc, 2);
  CHECK(all.exit_code() == 1);
  CHECK(format_table(all).find("mixed,bumped,fail,") != std::string::npos);
  CHECK(run_scenario(only(sc, {}), 1).exit_code() == 0);
}

TEST_CASE("exceptions inside a check become inconclusive", "[cli]") {
  auto sc = parse_scenario(kMinimal);
  sc.checks.push_back({"throws", "custom", 1.0, [](std::uint64_t) -> CheckReport { throw NumericalError("boom"); }});
  const auto run = run_scenario(sc, 1);
  CHECK(run.exit_code() == 2);
  const auto& rep = run.checks[1].report;
  CHECK(rep.verdict() == Verdict::Inconclusive);
  bool found = false;
  for (const auto& n : rep.notes()) found = found || n.find("boom") != std::string::npos;
  CHECK(found);
}

TEST_CASE("digest tracks content, not layout", "[cli]") {
  const auto a = parse_scenario(kMinimal);
  const auto b = parse_scenario("# comment\n" + replace(kMinimal, "name: minimal\nseed: 5", "seed: 5\nname:   minimal"));
  CHECK(a.digest == b.digest);
  CHECK(a.digest.size() == 64);
  CHECK(parse_scenario(replace(kMinimal, "tol: 1.0e-12", "tol: 1.0e-11")).digest != a.digest);
  CHECK(parse_scenario(replace(kMinimal, "seed: 5", "seed: 6")).digest != a.digest);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("per-check seeds depend only on the scenario seed and the check name", "[cli]") {
  CHECK(derive_seed(5, "law") == derive_seed(5, "law"));
  CHECK(derive_seed(5, "law") != derive_seed(6, "law"));
  CHECK(derive_seed(5, "law") != derive_seed(5, "law2"));
  const auto sc = parse_scenario(kMixed);
  Scenario reversed = sc;
  std::reverse(reversed.checks.begin(), reversed.checks.end());
  const auto x = run_scenario(sc, 1), y = run_scenario(reversed, 1);
  for (const auto& cx : x.checks)
    for (const auto& cy : y.checks)
      if (cx.report.name() == cy.report.name()) {
        CHECK(cx.report.seed() == cy.report.seed());
        CHECK(cx.report.measurements().size() == cy.report.measurements().size());
      }
}

TEST_CASE("flat table format", "[cli]") {
  const std::string header = "scenario,check,verdict,constant_name,value,tolerance,seed\n";
  auto empty = parse_scenario("name: empty\nseed: 1\n");
  CHECK(format_table(run_scenario(empty, 1)) == header);

  const auto run = run_scenario(parse_scenario(kMinimal), 1);
  const auto table = format_table(run);
  CHECK(table.rfind(header, 0) == 0);
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("minimal,law,pass,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  CHECK(rows == run.checks[0].report.measurements().size());

  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(kInf) == "inf");
  CHECK(format_number(-kInf) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("tables are byte-identical across runs and worker counts", "[cli]") {
  const auto sc = load_scenario(fixture("generator-domain-core"));
  const auto a = format_table(run_scenario(sc, 1));
  const auto b = format_table(run_scenario(sc, 1));
  const auto c = format_table(run_scenario(sc, 3));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(format_table(run_scenario(sc, 1, 999)) != a);
}

TEST_CASE("tree output and report emission", "[cli]") {
  const auto run = run_scenario(parse_scenario(kMinimal), 1);
  const auto tree = format_tree(run);
  CHECK(tree.find("\"name\": \"minimal\"") != std::string::npos);
  CHECK(tree.find("\"exit_code\": 0") != std::string::npos);
  CHECK(tree.find(run.digest) != std::string::npos);

  const auto dir = fs::temp_directory_path() / "cosi-test-emit";
  fs::remove_all(dir);
  const auto written = emit_report(run, (dir / "nested").string(), {});
  CHECK(written.size() == 2);
  CHECK(fs::exists(dir / "nested" / "minimal.json"));
  CHECK(fs::exists(dir / "nested" / "minimal.csv"));
  std::ifstream csv(dir / "nested" / "minimal.csv");
  std::stringstream buf;
  buf << csv.rdbuf();
  CHECK(buf.str() == format_table(run));
  CHECK(emit_report(run, dir.string(), {false, true}).size() == 1);

  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS(emit_report(run, (dir / "blocker" / "sub").string(), {}));
  fs::remove_all(dir);
}
