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

#ifndef UMIMO_REPORT_HPP
#define UMIMO_REPORT_HPP

#include <cstdio>
#include <string>

#include "umimo/config.hpp"
#include "umimo/metrics.hpp"

namespace umimo::report {

/// Campaign results table: one header, one row per campaign. dBm values at
/// -250 mean "below the measurement floor".
inline std::string csv_header() {
    return "config_hash,n_a,n_n,n_u,hotspots_per_sector,elbt_grant_rate,"
           "wlan_intf_p50_dbm,wlan_intf_p95_dbm,bs_intf_p50_dbm,bs_intf_p95_dbm,"
           "sector_rate_mean_bps,sector_rate_p50_bps";
}

/// For adaptive-null campaigns the n_n column reports the mean final null
/// count reached by the feedback loop.
inline std::string csv_row(const ScenarioConfig& cfg, const metrics::MetricsReport& rep) {
    const double n_n_col = cfg.null_policy == NullPolicy::kAdaptive
                               ? rep.final_n_nulls_mean
                               : static_cast<double>(cfg.resolved_n_n());
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.6g,%d,%.6g,%.6f,%.4f,%.4f,%.4f,%.4f,%.3f,%.3f",
                  cfg.hash_hex().c_str(), cfg.n_a, n_n_col, cfg.n_u, cfg.hotspots_per_sector,
                  rep.elbt_grant_rate, rep.wlan_intf_p50_dbm, rep.wlan_intf_p95_dbm,
                  rep.bs_intf_p50_dbm, rep.bs_intf_p95_dbm, rep.sector_rate_mean_bps,
                  rep.sector_rate_p50_bps);
    return buf;
}

/// Human-readable single-campaign summary.
inline std::string text_summary(const ScenarioConfig& cfg, const metrics::MetricsReport& rep) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "scenario        : N_A=%d N_U=%d N_N=%s hotspots/sector=%.6g\n"
                  "drops           : %zu x %d intervals (%zu sector-intervals)\n"
                  "eLBT grant rate : %.4f\n"
                  "WLAN interference (dBm): p50 %.2f  p95 %.2f  (%zu samples)\n"
                  "BS filtered interference (dBm): p50 %.2f  p95 %.2f\n"
                  "sector rate (Mbps): mean %.2f  p50 %.2f\n"
                  "CCA clear fraction: %.4f\n"
                  "degraded intervals: %zu   rank redraws: %zu\n",
                  cfg.n_a, cfg.n_u,
                  cfg.null_policy == NullPolicy::kAuto
                      ? "auto"
                      : (cfg.null_policy == NullPolicy::kAdaptive ? "adaptive" : "fixed"),
                  cfg.hotspots_per_sector, rep.drops, cfg.intervals_per_drop, rep.sector_intervals,
                  rep.elbt_grant_rate, rep.wlan_intf_p50_dbm, rep.wlan_intf_p95_dbm,
                  rep.wlan_samples, rep.bs_intf_p50_dbm, rep.bs_intf_p95_dbm,
                  rep.sector_rate_mean_bps / 1e6, rep.sector_rate_p50_bps / 1e6,
                  rep.cca_clear_fraction, rep.degraded_intervals, rep.rank_redraws);
    return buf;
}

} // namespace umimo::report

#endif // UMIMO_REPORT_HPP
