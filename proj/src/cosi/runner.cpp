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
#include "cosi/runner.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef COSI_VERSION
#define COSI_VERSION "0.0.0"
#endif

namespace cosi {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

CheckResult run_one(const CheckDecl& check, std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult out;
  try {
    out.report = check.run(seed);
  } catch (const std::exception& e) {
    out.report = CheckReport();
    out.report.inconclusive(std::string("exception: ") + e.what());
  } catch (...) {
    out.report = CheckReport();
    out.report.inconclusive("exception: unknown");
  }
  out.report.set_name(check.name);
  out.report.set_type(check.type);
  out.report.set_seed(seed);
  out.seconds = since(t0);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

const char* tool_version() { return COSI_VERSION; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int RunReport::exit_code() const {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.report.verdict() == Verdict::Fail) return 1;
    if (c.report.verdict() == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

RunReport run_scenario(const Scenario& scenario, unsigned jobs, std::optional<std::uint64_t> seed_override) {
  const auto t0 = Clock::now();
  RunReport rep;
  rep.scenario = scenario.name;
  rep.source = scenario.source;
  rep.digest = scenario.digest;
  rep.version = tool_version();
  rep.seed = seed_override.value_or(scenario.seed);
  const std::size_t n = scenario.checks.size();
  rep.checks.resize(n);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& c = scenario.checks[i];
      rep.checks[i] = run_one(c, derive_seed(rep.seed, c.name));
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  rep.seconds = since(t0);
  return rep;
}

std::string format_table(const RunReport& report) {
  std::ostringstream os;
  os << "scenario,check,verdict,constant_name,value,tolerance,seed\n";
  for (const auto& c : report.checks) {
    const auto& r = c.report;
    const std::string head = csv_field(report.scenario) + "," + csv_field(r.name()) + "," + to_string(r.verdict()) + ",";
    const std::string seed = std::to_string(r.seed());
    if (r.measurements().empty()) {
      os << head << ",,," << seed << "\n";
      continue;
    }
    for (const auto& m : r.measurements()) {
      os << head << csv_field(m.name) << "," << format_number(m.value) << ","
         << (std::isnan(m.tolerance) ? std::string() : format_number(m.tolerance)) << "," << seed << "\n";
    }
  }
  return os.str();
}

std::string format_tree(const RunReport& report) {
  nlohmann::json root;
  root["tool"] = {{"name", "cosi"}, {"version", report.version}};
  root["scenario"] = {{"name", report.scenario}, {"source", report.source}, {"digest", report.digest},
                      {"seed", report.seed}};
  root["exit_code"] = report.exit_code();
  root["seconds"] = report.seconds;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    const auto& r = c.report;
    nlohmann::json m = nlohmann::json::array();
    for (const auto& x : r.measurements()) {
      nlohmann::json e = {{"name", x.name}, {"value", json_number(x.value)}};
      if (!std::isnan(x.tolerance)) e["tolerance"] = json_number(x.tolerance);
      m.push_back(std::move(e));
    }
    checks.push_back({{"name", r.name()},
                      {"type", r.type()},
                      {"verdict", to_string(r.verdict())},
                      {"seed", r.seed()},
                      {"seconds", c.seconds},
                      {"measurements", std::move(m)},
                      {"notes", r.notes()}});
  }
  root["checks"] = std::move(checks);
  return root.dump(2) + "\n";
}

std::vector<std::string> emit_report(const RunReport& report, const std::string& dir, const OutputFormats& formats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << body;
    out.close();
    if (!out) throw Error("cannot write '" + path + "'");
    written.push_back(path);
  };
  if (formats.tree) write(report.scenario + ".json", format_tree(report));
  if (formats.table) write(report.scenario + ".csv", format_table(report));
  return written;
}

}  // namespace cosi
