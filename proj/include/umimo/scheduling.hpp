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

#ifndef UMIMO_SCHEDULING_HPP
#define UMIMO_SCHEDULING_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace umimo::scheduling {

/// Smoothed per-UT throughput used by the proportional-fair ranking.
/// Averages are floored at a small epsilon so a never-served UT keeps a
/// finite (and maximal) scheduling priority.
struct PfState {
    std::vector<double> avg_rate_bps;
    double window_intervals = 100.0;
    double floor_bps = 1.0;

    static PfState make(std::size_t n_uts, double window, double floor) {
        PfState st;
        st.avg_rate_bps.assign(n_uts, floor);
        st.window_intervals = window;
        st.floor_bps = floor;
        return st;
    }
};

/// RSSI a UT would report for one AP: AP transmit power minus the
/// large-scale device-to-device loss. Fast fading is deliberately absent;
/// these reports vary on the shadowing time scale only.
inline double ap_rssi_dbm(double ap_power_dbm, double pathloss_db, double shadowing_db) {
    return ap_power_dbm - pathloss_db - shadowing_db;
}

/// UTs whose strongest co-channel AP is still below the threshold. UTs with
/// no co-channel AP in range are always eligible.
inline std::vector<int> eligible_uts(std::span<const std::vector<double>> rssi_per_ut,
                                     double rssi_threshold_dbm) {
    std::vector<int> out;
    for (std::size_t u = 0; u < rssi_per_ut.size(); ++u) {
        double strongest = -std::numeric_limits<double>::infinity();
        for (double r : rssi_per_ut[u])
            strongest = std::max(strongest, r);
        if (strongest < rssi_threshold_dbm)
            out.push_back(static_cast<int>(u));
    }
    return out;
}

/// Proportional-fair selection: top n_select by instantaneous rate over
/// smoothed average, ties broken by UT index for determinism.
inline std::vector<int> pf_select(std::span<const int> eligible,
                                  std::span<const double> instantaneous_rate_bps,
                                  const PfState& state, int n_select) {
    if (eligible.empty())
        throw std::invalid_argument("no eligible UTs to select from");
    std::vector<int> ranked(eligible.begin(), eligible.end());
    std::vector<double> metric(instantaneous_rate_bps.size(), 0.0);
    for (int u : ranked) {
        if (u < 0 || static_cast<std::size_t>(u) >= instantaneous_rate_bps.size())
            throw std::out_of_range("eligible index outside rate vector");
        metric[static_cast<std::size_t>(u)] =
            instantaneous_rate_bps[static_cast<std::size_t>(u)] /
            state.avg_rate_bps.at(static_cast<std::size_t>(u));
    }
    std::sort(ranked.begin(), ranked.end(), [&](int a, int b) {
        const double ma = metric[static_cast<std::size_t>(a)];
        const double mb = metric[static_cast<std::size_t>(b)];
        if (ma != mb)
            return ma > mb;
        return a < b;
    });
    if (static_cast<int>(ranked.size()) > n_select)
        ranked.resize(static_cast<std::size_t>(n_select));
    std::sort(ranked.begin(), ranked.end());
    return ranked;
}

/// Exponential smoothing over the configured window; unserved UTs decay
/// with rate 0. Averages never drop below the floor.
inline void update_pf(PfState& state, std::span<const double> served_rate_bps) {
    if (served_rate_bps.size() != state.avg_rate_bps.size())
        throw std::invalid_argument("rate vector size mismatch");
    const double alpha = 1.0 / state.window_intervals;
    for (std::size_t u = 0; u < state.avg_rate_bps.size(); ++u) {
        if (served_rate_bps[u] < 0.0)
            throw std::invalid_argument("negative served rate");
        state.avg_rate_bps[u] =
            std::max(state.floor_bps, (1.0 - alpha) * state.avg_rate_bps[u] + alpha * served_rate_bps[u]);
    }
}

struct RelaxedSelection {
    std::vector<int> selected;
    double threshold_used_dbm = 0.0;
    bool degraded = false; // threshold had to be relaxed to fill the slots
};

/// Eligibility plus PF selection, relaxing the RSSI threshold in fixed dB
/// steps whenever fewer than n_select UTs qualify. Keeps UTs in-band and
/// flags the interval as degraded instead of dropping it.
inline RelaxedSelection select_with_relaxation(std::span<const std::vector<double>> rssi_per_ut,
                                               double rssi_threshold_dbm, double relax_step_db,
                                               std::span<const double> instantaneous_rate_bps,
                                               const PfState& state, int n_select) {
    RelaxedSelection out;
    out.threshold_used_dbm = rssi_threshold_dbm;
    std::vector<int> elig = eligible_uts(rssi_per_ut, out.threshold_used_dbm);
    while (static_cast<int>(elig.size()) < n_select) {
        double strongest = -std::numeric_limits<double>::infinity();
        for (const auto& per_ap : rssi_per_ut)
            for (double r : per_ap)
                strongest = std::max(strongest, r);
        if (out.threshold_used_dbm > strongest) {
            // Every UT already qualifies; the pool is simply small.
            break;
        }
        out.threshold_used_dbm += relax_step_db;
        out.degraded = true;
        elig = eligible_uts(rssi_per_ut, out.threshold_used_dbm);
    }
    out.selected = pf_select(elig, instantaneous_rate_bps, state,
                             std::min<int>(n_select, static_cast<int>(elig.size())));
    return out;
}

} // namespace umimo::scheduling

#endif // UMIMO_SCHEDULING_HPP
