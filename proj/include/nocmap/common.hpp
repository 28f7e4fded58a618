/* Copyright 2026 The nocmap Authors
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

#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nocmap {

/* Error taxonomy, mapped 1:1 onto CLI exit codes:
 * ConfigError = 1, InvariantError = 2, LivelockError = 3. */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LivelockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* ceil(a/b) for a >= 0, b > 0. */
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

/* Exact nonnegative rational, always kept reduced with positive denominator.
 * Memory service time is a fractional number of network cycles (1/16 cycle
 * per value at the default clocks); carrying it as a fraction keeps long runs
 * free of floating-point drift and makes queue-busy arithmetic exact. */
class Ratio {
 public:
  Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ <= 0 || num_ < 0)
      throw InvariantError("Ratio requires num >= 0 and den > 0");
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool positive() const { return num_ > 0; }
  double as_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Ratio scaled(std::int64_t k) const { return Ratio(num_ * k, den_); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace nocmap
