// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Internal unit system: time in ns, rates and angular frequencies in rad/ns.
// Parameter files use laboratory units (GHz, MHz as nu/2pi, microseconds).

#include <limits>
#include <numbers>

namespace qlink::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// nu/2pi in MHz -> angular rate in rad/ns.
constexpr double mhz(double nu_mhz) { return kTwoPi * nu_mhz * 1e-3; }

/// angular rate in rad/ns -> nu/2pi in MHz.
constexpr double to_mhz(double omega) { return omega / kTwoPi * 1e3; }

/// Time constant in microseconds -> decay rate in 1/ns. Non-positive or
/// infinite time constants mean "no decay".
constexpr double rate_from_us(double t_us) {
  if (!(t_us > 0.0) || t_us == std::numeric_limits<double>::infinity()) return 0.0;
  return 1.0 / (t_us * 1e3);
}

}  // namespace qlink::units
