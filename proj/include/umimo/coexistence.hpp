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

#ifndef UMIMO_COEXISTENCE_HPP
#define UMIMO_COEXISTENCE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <span>
#include <stdexcept>

#include "umimo/spatial.hpp"
#include "umimo/units.hpp"

namespace umimo::coexistence {

/// Result of one enhanced listen-before-talk energy detection.
struct ElbtOutcome {
    double measured_dbm = kBelowFloorDbm;
    double threshold_dbm = 0.0;
    bool granted = false;
    int n_nulls_used = 0;
};

/// Per-sector control state for the adaptive null-count feedback loop.
struct NullAdaptState {
    int current_n_nulls = 0;
    int consecutive_failures = 0;
    int step = 4;
    int patience = 3; // failures tolerated before stepping up
    int max_n_nulls = 0;
};

struct ActiveTransmitter {
    const Eigen::VectorXcd* channel = nullptr; // BS-side channel, length N_A
    double tx_power_mw = 0.0;
};

/// Aggregate received power after filtering through the radiation nulls,
/// averaged per antenna:
///   10 log10( (1/N_A) sum_w P_w || (I - U U^H) g_w ||^2 )  [dBm].
/// Per-antenna averaging keeps the value comparable with the scalar energy
/// detection thresholds for any array size. An empty active set (or full
/// suppression) reports the below-floor sentinel. `extra_noise_mw` models a
/// receiver noise floor when configured; the default excludes it.
inline double measure_filtered_power_dbm(const spatial::NullBasis& nulls,
                                         const Eigen::MatrixXcd& active_channels,
                                         const Eigen::VectorXd& tx_powers_mw,
                                         double extra_noise_mw = 0.0) {
    if (active_channels.cols() != tx_powers_mw.size())
        throw std::invalid_argument("channel/power count mismatch");
    const Eigen::MatrixXcd filtered = spatial::project_complement(nulls, active_channels);
    double sum_mw = 0.0;
    for (Eigen::Index w = 0; w < filtered.cols(); ++w)
        sum_mw += tx_powers_mw(w) * filtered.col(w).squaredNorm();
    return mw_to_dbm(sum_mw / static_cast<double>(active_channels.rows()) + extra_noise_mw);
}

inline double measure_filtered_power_dbm(const spatial::NullBasis& nulls,
                                         std::span<const ActiveTransmitter> active,
                                         int n_antennas) {
    Eigen::MatrixXcd cols(n_antennas, static_cast<Eigen::Index>(active.size()));
    Eigen::VectorXd powers(static_cast<Eigen::Index>(active.size()));
    for (std::size_t w = 0; w < active.size(); ++w) {
        if (active[w].channel == nullptr || active[w].channel->size() != n_antennas)
            throw std::invalid_argument("active transmitter channel length != N_A");
        cols.col(static_cast<Eigen::Index>(w)) = *active[w].channel;
        powers(static_cast<Eigen::Index>(w)) = active[w].tx_power_mw;
    }
    return measure_filtered_power_dbm(nulls, cols, powers);
}

/// Strict-inequality energy detection; with an empty basis this is the
/// conventional LBT decision on the unfiltered signal.
inline bool elbt_decision(double measured_dbm, double threshold_dbm) {
    return measured_dbm < threshold_dbm;
}

/// WLAN clear-channel assessment: transmission is feasible while the
/// aggregate interference stays below the regulatory threshold.
inline bool wlan_cca(double interference_dbm, double threshold_dbm) {
    return interference_dbm < threshold_dbm;
}

/// Feedback loop on eLBT failures: after `patience` consecutive failures
/// the null count steps up (clamped); a success resets the counter and
/// leaves the null count where it is.
inline NullAdaptState adapt_nulls(NullAdaptState state, const ElbtOutcome& last) {
    if (last.granted) {
        state.consecutive_failures = 0;
        return state;
    }
    ++state.consecutive_failures;
    if (state.consecutive_failures >= state.patience) {
        state.current_n_nulls = std::min(state.current_n_nulls + state.step, state.max_n_nulls);
        state.consecutive_failures = 0;
    }
    return state;
}

} // namespace umimo::coexistence

#endif // UMIMO_COEXISTENCE_HPP
