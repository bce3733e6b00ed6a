// Copyright 2026 The sqze Authors
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

#include <numbers>

// Internal quantities are angular frequencies in rad/s and durations in
// seconds (hbar = 1). Ordinary frequencies such as "2.5 kHz" are converted
// with a factor of 2*pi at the boundary.
namespace sqze::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad_per_s(double hz) { return kTwoPi * hz; }
constexpr double khz_to_rad_per_s(double khz) { return kTwoPi * 1.0e3 * khz; }
constexpr double mhz_to_rad_per_s(double mhz) { return kTwoPi * 1.0e6 * mhz; }

constexpr double us_to_s(double us) { return us / 1.0e6; }
constexpr double s_to_us(double s) { return s * 1.0e6; }

}  // namespace sqze::units
