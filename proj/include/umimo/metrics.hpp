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

#ifndef UMIMO_METRICS_HPP
#define UMIMO_METRICS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "umimo/spatial.hpp"
#include "umimo/units.hpp"

namespace umimo::metrics {

struct TransmittingBs {
    const spatial::Precoder* precoder = nullptr;
    const Eigen::VectorXcd* channel_to_device = nullptr; // g_{b,d}, length N_A
};

/// Aggregate downlink interference one single-antenna WLAN device receives
/// from all co-channel transmitting BSs:
///   10 log10( sum_b sum_k p_{b,k} |g_{b,d}^H w_{b,k}|^2 )  [dBm].
inline double wlan_device_interference_dbm(std::span<const TransmittingBs> transmitters) {
    double sum_mw = 0.0;
    for (const auto& t : transmitters) {
        if (t.precoder == nullptr || t.channel_to_device == nullptr)
            throw std::invalid_argument("null transmitter entry");
        const Eigen::VectorXcd cross = t.precoder->matrix.adjoint() * (*t.channel_to_device);
        sum_mw += t.precoder->per_ut_power_mw * cross.squaredNorm();
    }
    return mw_to_dbm(sum_mw);
}

/// Adds one transmitting BS's contribution to every device's aggregate
/// interference: acc(d) += p_stream * ||W^H g_d||^2, in mW.
inline void accumulate_bs_interference_mw(const spatial::Precoder& precoder,
                                          const Eigen::MatrixXcd& device_channels,
                                          Eigen::VectorXd& acc_mw) {
    if (acc_mw.size() != device_channels.cols())
        throw std::invalid_argument("accumulator size mismatch");
    if (device_channels.cols() == 0)
        return;
    const Eigen::MatrixXcd cross = precoder.matrix.adjoint() * device_channels;
    acc_mw += precoder.per_ut_power_mw * cross.colwise().squaredNorm().real().transpose();
}

struct SinrTerms {
    double signal_mw = 0.0;
    double intra_mw = 0.0;
    double inter_mw = 0.0;
    double wlan_mw = 0.0;
    double noise_mw = 0.0;

    double sinr_linear() const {
        const double denom = intra_mw + inter_mw + wlan_mw + noise_mw;
        return denom > 0.0 ? signal_mw / denom : 0.0;
    }
    double sinr_db() const { return linear_to_db(sinr_linear()); }
};

/// SINR of one scheduled UT: own-stream power over intra-sector leakage,
/// other-sector downlink interference, WLAN-originated interference and
/// thermal noise. `stream` indexes the UT's column of the serving precoder.
inline SinrTerms ut_sinr_terms(const Eigen::VectorXcd& ut_channel,
                               const spatial::Precoder& serving, int stream,
                               std::span<const TransmittingBs> other_bs, double wlan_mw,
                               double noise_mw) {
    if (stream < 0 || stream >= serving.n_streams())
        throw std::out_of_range("stream index outside precoder");
    SinrTerms t;
    const Eigen::VectorXcd cross = serving.matrix.adjoint() * ut_channel;
    for (int j = 0; j < serving.n_streams(); ++j) {
        const double p = serving.per_ut_power_mw * std::norm(cross(j));
        if (j == stream)
            t.signal_mw = p;
        else
            t.intra_mw += p;
    }
    for (const auto& o : other_bs) {
        const Eigen::VectorXcd oc = o.precoder->matrix.adjoint() * (*o.channel_to_device);
        t.inter_mw += o.precoder->per_ut_power_mw * oc.squaredNorm();
    }
    t.wlan_mw = wlan_mw;
    t.noise_mw = noise_mw;
    return t;
}

/// Shannon sector sum rate with a spectral-efficiency cap per stream; a
/// sector that did not win channel access carries zero rate.
inline double sector_rate_bps(std::span<const double> sinrs_db, double bandwidth_hz,
                              double se_cap_bps_hz, bool channel_granted) {
    if (!channel_granted)
        return 0.0;
    double se = 0.0;
    for (double s : sinrs_db)
        se += std::min(std::log2(1.0 + db_to_linear(s)), se_cap_bps_hz);
    return se * bandwidth_hz;
}

/// Nearest-rank percentile: the sorted sample at 1-based index
/// ceil(p/100 * n). Deterministic, permutation-invariant, no interpolation.
inline double percentile(std::span<const double> samples, double p) {
    if (samples.empty())
        throw std::invalid_argument("percentile of an empty sample set");
    if (p < 0.0 || p > 100.0)
        throw std::invalid_argument("percentile rank outside [0, 100]");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::size_t idx = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n);
    return sorted[idx - 1];
}

/// Campaign-level summary of the quantities the simulator reports.
struct MetricsReport {
    double elbt_grant_rate = 0.0;
    double wlan_intf_p50_dbm = kBelowFloorDbm;
    double wlan_intf_p95_dbm = kBelowFloorDbm;
    double bs_intf_p50_dbm = kBelowFloorDbm;
    double bs_intf_p95_dbm = kBelowFloorDbm;
    double sector_rate_mean_bps = 0.0;
    double sector_rate_p50_bps = 0.0;

    // diagnostics
    std::size_t drops = 0;
    std::size_t sector_intervals = 0;
    std::size_t wlan_samples = 0;
    std::size_t degraded_intervals = 0;
    std::size_t rank_redraws = 0;
    double masked_sta_over_cca_fraction = 0.0;
    std::size_t masked_sta_samples = 0;
    double cca_clear_fraction = 0.0;
    double final_n_nulls_mean = 0.0;
};

} // namespace umimo::metrics

#endif // UMIMO_METRICS_HPP
