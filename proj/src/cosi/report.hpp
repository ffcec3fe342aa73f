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
#ifndef COSI_REPORT_HPP
#define COSI_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace cosi {

enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

struct Measurement {
  std::string name;
  double value = 0.0;
  /// NaN for purely informational values.
  double tolerance = std::numeric_limits<double>::quiet_NaN();
};

/// Structured outcome of one verification run. A report starts as `Pass`;
/// `Fail` is sticky and outranks `Inconclusive`.
class CheckReport {
 public:
  CheckReport() = default;
  explicit CheckReport(std::string name, std::string type = {}) : name_(std::move(name)), type_(std::move(type)) {}

  const std::string& name() const { return name_; }
  const std::string& type() const { return type_; }
  void set_name(std::string n) { name_ = std::move(n); }
  void set_type(std::string t) { type_ = std::move(t); }

  std::uint64_t seed() const { return seed_; }
  void set_seed(std::uint64_t s) { seed_ = s; }

  Verdict verdict() const { return verdict_; }
  bool passed() const { return verdict_ == Verdict::Pass; }

  void record(std::string name, double value, double tolerance = std::numeric_limits<double>::quiet_NaN());

  /// Records `value` and fails the report unless value <= bound + tol.
  bool expect_le(const std::string& name, double value, double bound, double tol);

  void fail(const std::string& why);
  void inconclusive(const std::string& why);
  void note(std::string text) { notes_.push_back(std::move(text)); }

  /// Folds another report in: its measurements get `prefix` prepended and its
  /// verdict is combined with ours.
  void absorb(const CheckReport& other, const std::string& prefix);

  const std::vector<Measurement>& measurements() const { return measurements_; }
  const std::vector<std::string>& notes() const { return notes_; }

  /// Value of the first measurement with this name, NaN when absent.
  double value(const std::string& name) const;

 private:
  std::string name_;
  std::string type_;
  std::uint64_t seed_ = 0;
  Verdict verdict_ = Verdict::Pass;
  std::vector<Measurement> measurements_;
  std::vector<std::string> notes_;
};

}  // namespace cosi

#endif  // COSI_REPORT_HPP
