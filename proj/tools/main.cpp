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
#include "cosi/cosi.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kUsageError = 3;

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

int report_error(const std::string& context) {
  std::cerr << "cosi: " << context << ": " << cosi_last_error() << "\n";
  return kUsageError;
}

struct Scenario {
  cosi_scenario* ptr = nullptr;
  ~Scenario() { cosi_scenario_free(ptr); }
};

struct Run {
  cosi_run* ptr = nullptr;
  ~Run() { cosi_run_free(ptr); }
};

int cmd_run(const std::string& file, const std::string& out, unsigned jobs, const std::vector<std::uint64_t>& seed,
            const std::vector<std::string>& formats, bool quiet) {
  bool tree = false, table = false;
  for (const auto& f : formats) {
    if (f == "tree") tree = true;
    else if (f == "table") table = true;
    else {
      std::cerr << "cosi: unknown format '" << f << "' (expected tree, table)\n";
      return kUsageError;
    }
  }
  Scenario sc;
  if (cosi_scenario_load(file.c_str(), &sc.ptr) != COSI_OK) return report_error("load");
  cosi_run_options opt{jobs, seed.empty() ? 0 : 1, seed.empty() ? 0 : seed.front()};
  Run run;
  if (cosi_run_scenario(sc.ptr, &opt, &run.ptr) != COSI_OK) return report_error("run");
  if (cosi_run_emit(run.ptr, out.c_str(), tree, table) != COSI_OK) return report_error("emit");
  if (!quiet) {
    std::cout << "scenario " << cosi_scenario_name(sc.ptr) << "  digest " << cosi_scenario_digest(sc.ptr) << "\n";
    for (size_t i = 0; i < cosi_run_check_count(run.ptr); ++i)
      std::cout << "  " << cosi_run_check_verdict(run.ptr, i) << "  " << cosi_run_check_name(run.ptr, i) << "\n";
    std::cout << "outputs in " << out << "\n";
  }
  return cosi_run_exit_code(run.ptr);
}

int cmd_validate(const std::string& file) {
  Scenario sc;
  if (cosi_scenario_load(file.c_str(), &sc.ptr) != COSI_OK) return report_error("validate");
  std::cout << "ok " << cosi_scenario_name(sc.ptr) << "\n"
            << "  digest " << cosi_scenario_digest(sc.ptr) << "\n"
            << "  seed " << cosi_scenario_seed(sc.ptr) << "\n"
            << "  checks " << cosi_scenario_check_count(sc.ptr) << "\n"
            << "  ladder levels " << cosi_scenario_ladder_levels(sc.ptr) << "\n";
  return 0;
}

int cmd_list(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.path().extension() == ".yaml" || e.path().extension() == ".yml") files.push_back(e.path());
  if (ec) {
    std::cerr << "cosi: cannot read fixture directory '" << dir << "': " << ec.message() << "\n";
    return kUsageError;
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Scenario sc;
    if (cosi_scenario_load(f.string().c_str(), &sc.ptr) != COSI_OK) {
      std::cout << f.string() << "  INVALID: " << cosi_last_error() << "\n";
      continue;
    }
    std::cout << f.string() << "  " << cosi_scenario_name(sc.ptr) << "  (" << cosi_scenario_check_count(sc.ptr)
              << " checks)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cosi: numerical checks for consistent operator families on interpolation couples"};
  app.set_version_flag("--version", std::string(cosi_version()));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write its reports");
  std::string file;
  std::string out = env_or("COSI_OUT_DIR", "cosi-out");
  unsigned jobs = 0;
  std::vector<std::uint64_t> seed;
  std::vector<std::string> formats{"tree", "table"};
  bool quiet = false;
  run->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default: $COSI_OUT_DIR or ./cosi-out)");
  run->add_option("--jobs", jobs, "Worker threads (default: logical cores)");
  run->add_option("--seed", seed, "Override the scenario seed")->expected(1);
  run->add_option("--format", formats, "Comma-separated subset of tree,table")->delimiter(',');
  run->add_flag("--quiet", quiet, "Print nothing on success");

  auto* validate = app.add_subcommand("validate", "Load and validate a scenario without running it");
  std::string vfile;
  validate->add_option("scenario", vfile, "Scenario file")->required();

  auto* list = app.add_subcommand("list-fixtures", "List the shipped fixture scenarios");
  std::string dir = env_or("COSI_FIXTURE_DIR", cosi_fixture_dir());
  list->add_option("--dir", dir, "Fixture directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (*run) return cmd_run(file, out, jobs, seed, formats, quiet);
  if (*validate) return cmd_validate(vfile);
  return cmd_list(dir);
}
