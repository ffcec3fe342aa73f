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
#include "cosi/report.hpp"

namespace cosi {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

void CheckReport::record(std::string name, double value, double tolerance) {
  measurements_.push_back({std::move(name), value, tolerance});
}

bool CheckReport::expect_le(const std::string& name, double value, double bound, double tol) {
  record(name, value, tol);
  const bool ok = value <= bound + tol;
  if (!ok) fail(name + " = " + std::to_string(value) + " exceeds " + std::to_string(bound) + " + " + std::to_string(tol));
  return ok;
}

void CheckReport::fail(const std::string& why) {
  verdict_ = Verdict::Fail;
  notes_.push_back("FAIL: " + why);
}

void CheckReport::inconclusive(const std::string& why) {
  if (verdict_ == Verdict::Pass) verdict_ = Verdict::Inconclusive;
  notes_.push_back("INCONCLUSIVE: " + why);
}

void CheckReport::absorb(const CheckReport& other, const std::string& prefix) {
  for (const auto& m : other.measurements_) measurements_.push_back({prefix + m.name, m.value, m.tolerance});
  for (const auto& n : other.notes_) notes_.push_back(prefix + n);
  if (other.verdict_ == Verdict::Fail) verdict_ = Verdict::Fail;
  else if (other.verdict_ == Verdict::Inconclusive && verdict_ == Verdict::Pass) verdict_ = Verdict::Inconclusive;
}

double CheckReport::value(const std::string& name) const {
  for (const auto& m : measurements_)
    if (m.name == name) return m.value;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace cosi
