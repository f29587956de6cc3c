// SPDX-License-Identifier: Apache-2.0
//
// umimo - system-level simulator of massive-MIMO cellular downlink sharing
// unlicensed spectrum with WLAN devices through spatial radiation nulls
// Copyright (C) 2026 the umimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef UMIMO_UNITS_HPP
#define UMIMO_UNITS_HPP

#include <algorithm>
#include <cmath>

namespace umimo {

/// Reported in place of any power measurement that falls below the
/// measurement floor (e.g. no interferer present, or a channel that lies
/// entirely inside a nulled subspace).
inline constexpr double kBelowFloorDbm = -250.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Converts a linear milliwatt power to dBm, clamping everything at or
/// below the measurement floor to the sentinel.
inline double mw_to_dbm(double mw) {
    if (!(mw > 0.0))
        return kBelowFloorDbm;
    return std::max(10.0 * std::log10(mw), kBelowFloorDbm);
}

/// Thermal noise power over `bandwidth_hz` at the given receiver noise
/// figure: -174 dBm/Hz + 10 log10(B) + NF.
inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

} // namespace umimo

#endif // UMIMO_UNITS_HPP
