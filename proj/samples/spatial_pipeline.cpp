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
//
// Minimal walk through the spatial-processing core on synthetic channels:
// WLAN covariance -> dominant-eigenspace nulls -> filtered energy detection
// -> projected zero-forcing, printing the interference suppression achieved
// at each WLAN device.

#include <cstdio>
#include <vector>

#include "umimo/umimo.hpp"

int main() {
    using namespace umimo;

    const int n_antennas = 64;
    const int n_wlan = 6;
    const int n_users = 8;
    RngStream rng{2024};

    // Synthetic quasi-static WLAN channels with 20 dB power spread.
    std::vector<Eigen::VectorXcd> wlan(n_wlan);
    std::vector<double> wlan_power_mw(n_wlan);
    for (int w = 0; w < n_wlan; ++w) {
        wlan[w].resize(n_antennas);
        for (int i = 0; i < n_antennas; ++i)
            wlan[w](i) = rng.cnormal();
        wlan_power_mw[w] = dbm_to_mw(-40.0 - 20.0 * rng.uniform());
    }

    const auto cov = spatial::true_covariance(wlan, wlan_power_mw, n_antennas);
    const int n_nulls = 2 * n_wlan; // a few spare degrees of freedom
    const auto nulls = spatial::null_basis(cov, n_nulls);

    std::vector<coexistence::ActiveTransmitter> active(wlan.size());
    for (int w = 0; w < n_wlan; ++w)
        active[w] = {&wlan[w], wlan_power_mw[w]};
    const double unfiltered =
        coexistence::measure_filtered_power_dbm(spatial::NullBasis{}, active, n_antennas);
    const double filtered = coexistence::measure_filtered_power_dbm(nulls, active, n_antennas);
    std::printf("energy detection: unfiltered %.1f dBm, filtered %.1f dBm (threshold -72 dBm)\n",
                unfiltered, filtered);
    std::printf("eLBT grant: %s\n", coexistence::elbt_decision(filtered, -72.0) ? "yes" : "no");

    Eigen::MatrixXcd users(n_antennas, n_users);
    for (int u = 0; u < n_users; ++u)
        for (int i = 0; i < n_antennas; ++i)
            users(i, u) = rng.cnormal();

    const double total_mw = dbm_to_mw(spatial::regulatory_power_dbm(n_antennas, n_nulls, n_users));
    const auto precoder = spatial::zf_precoder(users, nulls, total_mw);
    std::printf("transmit power: %.2f dBm total, %.2f dBm per stream\n", mw_to_dbm(total_mw),
                mw_to_dbm(precoder.per_ut_power_mw));

    for (int w = 0; w < n_wlan; ++w) {
        const double leak_mw =
            precoder.per_ut_power_mw * (wlan[w].adjoint() * precoder.matrix).squaredNorm();
        std::printf("device %d: post-precoding interference %.1f dBm\n", w, mw_to_dbm(leak_mw));
    }
    return 0;
}
