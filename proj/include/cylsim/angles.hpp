// Copyright 2026 The cylsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <numbers>

namespace cylsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to the canonical range [0, 2*pi).
inline double wrap_two_pi(double angle) {
    double r = std::remainder(angle, kTwoPi);  // [-pi, pi]
    if (r < 0.0) r += kTwoPi;
    // -tiny + 2*pi rounds to 2*pi.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Reduces an angle to [0, period).
inline double wrap_period(double angle, double period) {
    double r = std::remainder(angle, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    return r;
}

constexpr double degrees_to_radians(double deg) { return deg * (kPi / 180.0); }
constexpr double radians_to_degrees(double rad) { return rad * (180.0 / kPi); }

}  // namespace cylsim
