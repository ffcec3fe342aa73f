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
#ifndef COSI_SCENARIO_HPP
#define COSI_SCENARIO_HPP

#include "cosi/elliptic.hpp"
#include "cosi/interp.hpp"
#include "cosi/report.hpp"
#include "cosi/spaces.hpp"
#include "cosi/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cosi {

/// Malformed scenario: bad syntax, unknown keys, dangling references or
/// out-of-range parameters. The message carries line and column.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

struct GeneratorDecl {
  std::string id;
  Matrix a;
  std::optional<EllipticOperator> elliptic;
};

struct SpaceDecl {
  std::string id;
  SpacePtr space;
};

struct FunctorDecl {
  std::string id;
  FunctorDescriptor functor;
};

/// Refinement ladder: one elliptic operator per size (interior unknowns per axis).
struct Ladder {
  std::vector<int> sizes;
  std::vector<EllipticOperator> levels;
};

using CheckRunner = std::function<CheckReport(std::uint64_t seed)>;

struct CheckDecl {
  std::string name;
  std::string type;
  double tol = 0.0;
  CheckRunner run;
};

struct Scenario {
  std::string name;
  std::string source;     ///< path the scenario was read from, empty for strings
  std::uint64_t seed = 0;
  std::string canonical;  ///< sorted-key JSON serialization of the document
  std::string digest;     ///< SHA-256 of `canonical`, lower-case hex
  std::map<std::string, GeneratorDecl> generators;
  std::map<std::string, SpaceDecl> spaces;
  std::map<std::string, FunctorDecl> functors;
  std::optional<Ladder> ladder;
  std::vector<CheckDecl> checks;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& source = {});

/// Check types understood by the loader.
std::vector<std::string> check_types();

/// Seed of one check: a function of the scenario seed and the check name only.
std::uint64_t derive_seed(std::uint64_t scenario_seed, const std::string& check_name);

std::string sha256_hex(const std::string& data);

}  // namespace cosi

#endif  // COSI_SCENARIO_HPP
