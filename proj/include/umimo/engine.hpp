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
// Drop pipeline: deployment -> large-scale links -> per-interval fading ->
// WLAN covariance -> null basis -> eLBT -> WLAN-aware scheduling ->
// projected zero-forcing -> interference / SINR / rate metrics.
//
// Cellular BSs operate on channel 0 of the unlicensed band; WLAN hotspots
// spread uniformly over `num_channels`, and only co-channel hotspots
// interact with the cellular system. Drops are independent work units;
// every random quantity comes from a stream keyed on (master_seed, drop,
// purpose, entity), so campaign results are bit-identical for any worker
// count and stay paired across sweep values that share a master seed.

#ifndef UMIMO_ENGINE_HPP
#define UMIMO_ENGINE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include "umimo/coexistence.hpp"
#include "umimo/config.hpp"
#include "umimo/geometry.hpp"
#include "umimo/metrics.hpp"
#include "umimo/propagation.hpp"
#include "umimo/rng.hpp"
#include "umimo/scheduling.hpp"
#include "umimo/spatial.hpp"
#include "umimo/units.hpp"

namespace umimo::engine {

/// The channel index the cellular system occupies; WLAN hotspots on other
/// channels do not interact with it.
inline constexpr int kOperatingChannel = 0;

struct DropResult {
    int drop_index = 0;
    std::uint64_t master_seed = 0;
    int sectors = 0;
    int intervals = 0;

    std::vector<double> bs_filtered_dbm;     // per (sector, interval)
    std::vector<double> wlan_intf_dbm;       // per (co-channel device, interval)
    std::vector<double> masked_sta_intf_dbm; // hidden-terminal subset of the above
    std::vector<double> sector_rate_bps;     // per (sector, interval)
    std::vector<int> grants_per_interval;    // granted sector count per interval

    std::size_t cca_samples = 0;
    std::size_t cca_clear = 0;
    std::size_t degraded_intervals = 0;
    std::size_t rank_redraws = 0;
    std::vector<int> final_n_nulls; // per sector (adaptive diagnostics)
    bool adapt_monotone = true;
};

namespace detail {

struct CochannelDevice {
    geometry::Vec2 pos;
    bool is_ap = false;
    int hotspot = 0; // index into the co-channel hotspot list
    double power_mw = 0.0;
    bool visible = true;    // transmits during covariance estimation
    bool masked_sta = false; // hidden terminal: never observed by the BS
    bool active = false;     // elected transmitter of its hotspot
};

/// Everything that stays fixed for the duration of one drop.
struct DropTables {
    geometry::Layout layout;
    std::vector<std::vector<geometry::Vec2>> ut_positions;
    int n_sectors = 0;
    int n_uts = 0; // per sector
    std::vector<CochannelDevice> devices;
    std::vector<int> active_devices; // one per co-channel hotspot

    // fading samplers, fixed large-scale state
    std::vector<propagation::ChannelSampler> bs_ut;  // [sector * (n_sectors*n_uts) + ut_global]
    std::vector<propagation::ChannelSampler> bs_dev; // [sector * devices + d]

    std::vector<std::vector<std::vector<double>>> rssi_reports; // [sector][ut_local][co-ch AP]
    Eigen::MatrixXd ut_active_dev_mw; // [ut_global][active rank]: received power per active device
    std::vector<double> wlan_at_ut_mw; // row sums of the above

    int ut_global(int sector, int local) const { return sector * n_uts + local; }
};

inline DropTables build_drop_tables(const ScenarioConfig& cfg, int drop) {
    DropTables t;
    t.layout = geometry::build_layout(cfg.sites, cfg.isd_m, cfg.bs_height_m, cfg.device_height_m);
    t.n_sectors = static_cast<int>(t.layout.sectors.size());
    t.n_uts = cfg.uts_per_sector;

    {
        RngStream rs = make_stream(cfg.master_seed, drop, StreamPurpose::kUserDrop);
        t.ut_positions = geometry::drop_users(t.layout, cfg.uts_per_sector, cfg.n_u, rs);
    }
    std::vector<geometry::Hotspot> hotspots;
    {
        RngStream rs = make_stream(cfg.master_seed, drop, StreamPurpose::kHotspotDrop);
        geometry::HotspotParams hp;
        hp.radius_m = cfg.hotspot_radius_m;
        hp.stas_per_hotspot = cfg.stas_per_hotspot;
        hp.num_channels = cfg.num_channels;
        hp.poisson_counts = cfg.poisson_hotspots;
        hotspots = geometry::drop_hotspots(t.layout, cfg.hotspots_per_sector, hp, rs);
    }

    // Co-channel devices, in deterministic order: per hotspot the AP first,
    // then its STAs. Hidden STAs never transmit, so the BS cannot see them
    // during covariance estimation and they are excluded from the election.
    RngStream mask_rs = make_stream(cfg.master_seed, drop, StreamPurpose::kHiddenMask);
    int cc_hotspot = 0;
    for (const auto& hs : hotspots) {
        if (hs.channel != kOperatingChannel)
            continue;
        CochannelDevice ap;
        ap.pos = hs.ap;
        ap.is_ap = true;
        ap.hotspot = cc_hotspot;
        ap.power_mw = dbm_to_mw(cfg.ap_power_dbm);
        t.devices.push_back(ap);
        for (const auto& sta_pos : hs.stas) {
            CochannelDevice sta;
            sta.pos = sta_pos;
            sta.is_ap = false;
            sta.hotspot = cc_hotspot;
            sta.power_mw = dbm_to_mw(cfg.sta_power_dbm);
            sta.masked_sta = mask_rs.bernoulli(cfg.hidden_fraction);
            sta.visible = !sta.masked_sta;
            t.devices.push_back(sta);
        }
        ++cc_hotspot;
    }

    // One transmitter per co-channel hotspot, elected uniformly among the
    // devices the BS can observe. With hidden_fraction = 1 only the AP
    // remains, which is exactly the downlink-only hidden-terminal scenario.
    {
        RngStream rs = make_stream(cfg.master_seed, drop, StreamPurpose::kActiveElection);
        for (int h = 0; h < cc_hotspot; ++h) {
            std::vector<int> candidates;
            for (int d = 0; d < static_cast<int>(t.devices.size()); ++d)
                if (t.devices[static_cast<std::size_t>(d)].hotspot == h &&
                    t.devices[static_cast<std::size_t>(d)].visible)
                    candidates.push_back(d);
            const int pick = candidates[static_cast<std::size_t>(
                rs.uniform_int(static_cast<std::uint64_t>(candidates.size())))];
            t.devices[static_cast<std::size_t>(pick)].active = true;
            t.active_devices.push_back(pick);
        }
    }

    const auto& umi = propagation::pathloss_model(cfg.pathloss_bs);
    const auto& d2d = propagation::pathloss_model(cfg.pathloss_d2d);
    const double dh_bs = cfg.bs_height_m - cfg.device_height_m;
    const int n_ut_global = t.n_sectors * t.n_uts;

    // BS-to-UT links (UMi, sector element pattern, Ricean fading).
    {
        RngStream rs = make_stream(cfg.master_seed, drop, StreamPurpose::kShadowing, 0);
        t.bs_ut.resize(static_cast<std::size_t>(t.n_sectors) * n_ut_global);
        for (int s = 0; s < t.n_sectors; ++s) {
            const auto& sec = t.layout.sectors[static_cast<std::size_t>(s)];
            const auto& site = t.layout.sites[static_cast<std::size_t>(sec.site)];
            for (int g = 0; g < n_ut_global; ++g) {
                const geometry::Vec2& pos = t.ut_positions[static_cast<std::size_t>(g / t.n_uts)]
                                                          [static_cast<std::size_t>(g % t.n_uts)];
                const geometry::Vec2 disp = geometry::wrap_displacement(site, pos, t.layout);
                const double d2 = disp.norm();
                const double d3 = std::hypot(d2, dh_bs);
                const double az = geometry::rad_to_deg(std::atan2(disp.y, disp.x));
                const double theta = geometry::wrap_angle_deg(az - sec.azimuth_deg);
                const auto loss = propagation::draw_link_loss(umi, d2, d3, cfg.carrier_ghz, rs);
                t.bs_ut[static_cast<std::size_t>(s) * n_ut_global + g] = propagation::ChannelSampler(
                    loss, theta, propagation::sector_antenna_gain_db(theta));
            }
        }
    }

    // BS-to-WLAN-device links (UMi both ways by TDD reciprocity).
    {
        RngStream rs = make_stream(cfg.master_seed, drop, StreamPurpose::kShadowing, 1);
        t.bs_dev.resize(static_cast<std::size_t>(t.n_sectors) * t.devices.size());
        for (int s = 0; s < t.n_sectors; ++s) {
            const auto& sec = t.layout.sectors[static_cast<std::size_t>(s)];
            const auto& site = t.layout.sites[static_cast<std::size_t>(sec.site)];
            for (std::size_t d = 0; d < t.devices.size(); ++d) {
                const geometry::Vec2 disp =
                    geometry::wrap_displacement(site, t.devices[d].pos, t.layout);
                const double d2 = disp.norm();
                const double d3 = std::hypot(d2, dh_bs);
                const double az = geometry::rad_to_deg(std::atan2(disp.y, disp.x));
                const double theta = geometry::wrap_angle_deg(az - sec.azimuth_deg);
                const auto loss = propagation::draw_link_loss(umi, d2, d3, cfg.carrier_ghz, rs);
                t.bs_dev[static_cast<std::size_t>(s) * t.devices.size() + d] =
                    propagation::ChannelSampler(loss, theta,
                                                propagation::sector_antenna_gain_db(theta));
            }
        }
    }

    // UT-to-device links (D2D, large-scale only). One draw per pair keeps
    // the AP RSSI report and the interference budget on the same physical
    // link. Reports only list co-channel APs.
    {
        RngStream rs = make_stream(cfg.master_seed, drop, StreamPurpose::kShadowing, 2);
        t.rssi_reports.assign(static_cast<std::size_t>(t.n_sectors), {});
        for (auto& per_sector : t.rssi_reports)
            per_sector.assign(static_cast<std::size_t>(t.n_uts), {});
        t.ut_active_dev_mw =
            Eigen::MatrixXd::Zero(n_ut_global, static_cast<Eigen::Index>(t.active_devices.size()));
        t.wlan_at_ut_mw.assign(static_cast<std::size_t>(n_ut_global), 0.0);

        for (int g = 0; g < n_ut_global; ++g) {
            const geometry::Vec2& pos =
                t.ut_positions[static_cast<std::size_t>(g / t.n_uts)][static_cast<std::size_t>(g % t.n_uts)];
            for (std::size_t d = 0; d < t.devices.size(); ++d) {
                const auto& dev = t.devices[d];
                const double dist = geometry::wrap_distance(pos, dev.pos, t.layout);
                const auto loss = propagation::draw_link_loss(d2d, dist, dist, cfg.carrier_ghz, rs);
                const double gain_db = -loss.pathloss_db - loss.shadowing_db;
                if (dev.is_ap)
                    t.rssi_reports[static_cast<std::size_t>(g / t.n_uts)]
                                  [static_cast<std::size_t>(g % t.n_uts)]
                                      .push_back(scheduling::ap_rssi_dbm(
                                          cfg.ap_power_dbm, loss.pathloss_db, loss.shadowing_db));
                if (dev.active) {
                    const auto rank = static_cast<Eigen::Index>(
                        std::find(t.active_devices.begin(), t.active_devices.end(),
                                  static_cast<int>(d)) -
                        t.active_devices.begin());
                    const double mw = dev.power_mw * db_to_linear(gain_db);
                    t.ut_active_dev_mw(g, rank) = mw;
                    t.wlan_at_ut_mw[static_cast<std::size_t>(g)] += mw;
                }
            }
        }
    }
    return t;
}

} // namespace detail

/// Runs one Monte Carlo drop. The configuration must already be validated.
inline DropResult run_drop(const ScenarioConfig& cfg, int drop_index) {
    using Eigen::MatrixXcd;
    using Eigen::VectorXd;
    using Eigen::VectorXcd;

    const detail::DropTables tab = detail::build_drop_tables(cfg, drop_index);
    const int n_sectors = tab.n_sectors;
    const int n_dev = static_cast<int>(tab.devices.size());
    const int n_active = static_cast<int>(tab.active_devices.size());
    const int n_a = cfg.n_a;

    DropResult res;
    res.drop_index = drop_index;
    res.master_seed = cfg.master_seed;
    res.sectors = n_sectors;
    res.intervals = cfg.intervals_per_drop;
    res.final_n_nulls.assign(static_cast<std::size_t>(n_sectors), 0);

    const double ut_noise_mw =
        dbm_to_mw(noise_power_dbm(cfg.bandwidth_hz(), cfg.ut_noise_figure_db));
    const double bs_noise_mw =
        dbm_to_mw(noise_power_dbm(cfg.bandwidth_hz(), cfg.bs_noise_figure_db));

    // Active-device channel gathering for the eLBT measurement.
    VectorXd active_powers(n_active);
    for (int a = 0; a < n_active; ++a)
        active_powers(a) =
            tab.devices[static_cast<std::size_t>(tab.active_devices[static_cast<std::size_t>(a)])]
                .power_mw;

    std::vector<int> visible_devices;
    for (int d = 0; d < n_dev; ++d)
        if (tab.devices[static_cast<std::size_t>(d)].visible)
            visible_devices.push_back(d);
    VectorXd visible_powers(static_cast<Eigen::Index>(visible_devices.size()));
    for (std::size_t v = 0; v < visible_devices.size(); ++v)
        visible_powers(static_cast<Eigen::Index>(v)) =
            tab.devices[static_cast<std::size_t>(visible_devices[v])].power_mw;

    // Per-sector state that persists across intervals.
    std::vector<scheduling::PfState> pf;
    pf.reserve(static_cast<std::size_t>(n_sectors));
    for (int s = 0; s < n_sectors; ++s)
        pf.push_back(scheduling::PfState::make(static_cast<std::size_t>(tab.n_uts),
                                               cfg.pf_window_intervals, cfg.pf_floor_bps));
    std::vector<coexistence::NullAdaptState> adapt(static_cast<std::size_t>(n_sectors));
    for (auto& st : adapt) {
        st.current_n_nulls = cfg.null_adapt_start;
        st.step = cfg.null_adapt_step;
        st.patience = cfg.null_adapt_patience;
        st.max_n_nulls = cfg.adaptive_max_n_n();
    }
    const bool adaptive = cfg.null_policy == NullPolicy::kAdaptive;

    // Reused per-interval buffers.
    std::vector<MatrixXcd> h_serv(static_cast<std::size_t>(n_sectors),
                                  MatrixXcd(n_a, tab.n_uts));
    std::vector<MatrixXcd> g_dev(static_cast<std::size_t>(n_sectors), MatrixXcd(n_a, n_dev));
    MatrixXcd visible_cols(n_a, visible_devices.size());
    MatrixXcd active_cols(n_a, n_active);
    std::vector<spatial::NullBasis> bases(static_cast<std::size_t>(n_sectors));
    std::vector<spatial::Precoder> precoders(static_cast<std::size_t>(n_sectors));
    std::vector<bool> precoder_valid(static_cast<std::size_t>(n_sectors), false);
    std::vector<bool> granted(static_cast<std::size_t>(n_sectors), false);
    std::vector<std::vector<int>> selected(static_cast<std::size_t>(n_sectors));
    std::vector<double> est_rates(static_cast<std::size_t>(tab.n_uts), 0.0);
    std::vector<double> served(static_cast<std::size_t>(tab.n_uts), 0.0);

    for (int t = 0; t < cfg.intervals_per_drop; ++t) {
        const auto ti = static_cast<std::uint64_t>(t);
        int grants_this_interval = 0;

        // Device-side fading for every sector.
        for (int s = 0; s < n_sectors; ++s) {
            RngStream rs = make_stream(cfg.master_seed, static_cast<std::uint64_t>(drop_index),
                                       StreamPurpose::kFadingDevice, ti,
                                       static_cast<std::uint64_t>(s));
            auto& g = g_dev[static_cast<std::size_t>(s)];
            for (int d = 0; d < n_dev; ++d)
                tab.bs_dev[static_cast<std::size_t>(s) * tab.devices.size() +
                           static_cast<std::size_t>(d)]
                    .draw_into(g.col(d), rs);
        }

        // Sector control loop: covariance, nulls, eLBT, scheduling, precoder.
        for (int s = 0; s < n_sectors; ++s) {
            const std::size_t su = static_cast<std::size_t>(s);
            auto& g = g_dev[su];

            int n_nulls = adaptive ? adapt[su].current_n_nulls : cfg.resolved_n_n();

            for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(visible_devices.size()); ++v)
                visible_cols.col(v) = g.col(visible_devices[static_cast<std::size_t>(v)]);
            spatial::Covariance cov;
            if (cfg.covariance_mode == CovarianceMode::kPerfect) {
                cov = spatial::true_covariance_cols(visible_cols, visible_powers);
            } else {
                RngStream rs =
                    make_stream(cfg.master_seed, static_cast<std::uint64_t>(drop_index),
                                StreamPurpose::kCovarianceSamples, ti, static_cast<std::uint64_t>(s));
                cov = spatial::sample_covariance_cols(visible_cols, visible_powers,
                                                      cfg.covariance_symbols, bs_noise_mw, rs);
            }
            bases[su] = spatial::null_basis(cov, n_nulls);

            for (int a = 0; a < n_active; ++a)
                active_cols.col(a) = g.col(tab.active_devices[static_cast<std::size_t>(a)]);
            const double elbt_noise_mw =
                cfg.elbt_include_noise
                    ? bs_noise_mw * static_cast<double>(n_a - n_nulls) / static_cast<double>(n_a)
                    : 0.0;
            const double measured = coexistence::measure_filtered_power_dbm(
                bases[su], active_cols, active_powers, elbt_noise_mw);
            coexistence::ElbtOutcome outcome;
            outcome.measured_dbm = measured;
            outcome.threshold_dbm = cfg.gamma_bs_dbm;
            outcome.granted = coexistence::elbt_decision(measured, cfg.gamma_bs_dbm);
            outcome.n_nulls_used = n_nulls;
            if (adaptive) {
                const int before = adapt[su].current_n_nulls;
                adapt[su] = coexistence::adapt_nulls(adapt[su], outcome);
                if (adapt[su].current_n_nulls < before)
                    res.adapt_monotone = false;
            }

            res.bs_filtered_dbm.push_back(measured);
            granted[su] = outcome.granted;
            if (outcome.granted)
                ++grants_this_interval;

            // Scheduling and precoding, with a bounded fading redraw on the
            // (measure-zero) rank-deficient draws.
            precoder_valid[su] = false;
            bool degraded_here = false;
            for (int attempt = 0; attempt < 4; ++attempt) {
                RngStream rs = make_stream(
                    cfg.master_seed, static_cast<std::uint64_t>(drop_index),
                    StreamPurpose::kFadingServing, ti,
                    static_cast<std::uint64_t>(s) * 16 + static_cast<std::uint64_t>(attempt));
                auto& h = h_serv[su];
                for (int u = 0; u < tab.n_uts; ++u)
                    tab.bs_ut[static_cast<std::size_t>(s) * (tab.n_sectors * tab.n_uts) +
                              static_cast<std::size_t>(tab.ut_global(s, u))]
                        .draw_into(h.col(u), rs);

                const MatrixXcd h_proj = spatial::project_complement(bases[su], h);
                const double p_stream_mw =
                    dbm_to_mw(spatial::per_stream_power_dbm(n_a, n_nulls, cfg.n_u));
                for (int u = 0; u < tab.n_uts; ++u) {
                    const double intf = ut_noise_mw +
                                        tab.wlan_at_ut_mw[static_cast<std::size_t>(tab.ut_global(s, u))];
                    const double snr = p_stream_mw * h_proj.col(u).squaredNorm() / intf;
                    est_rates[static_cast<std::size_t>(u)] =
                        std::min(std::log2(1.0 + snr), cfg.se_cap_bps_hz) * cfg.bandwidth_hz();
                }
                auto pick = scheduling::select_with_relaxation(
                    tab.rssi_reports[su], cfg.rssi_threshold_dbm, cfg.rssi_relax_step_db, est_rates,
                    pf[su], cfg.n_u);
                degraded_here = pick.degraded;
                selected[su] = pick.selected;

                MatrixXcd h_sel(n_a, static_cast<Eigen::Index>(pick.selected.size()));
                for (std::size_t k = 0; k < pick.selected.size(); ++k)
                    h_sel.col(static_cast<Eigen::Index>(k)) =
                        h.col(pick.selected[k]);
                try {
                    const double total_mw = dbm_to_mw(spatial::regulatory_power_dbm(
                        n_a, n_nulls, static_cast<int>(pick.selected.size())));
                    precoders[su] = spatial::zf_precoder(h_sel, bases[su], total_mw);
                    precoder_valid[su] = true;
                    break;
                } catch (const spatial::RankDeficientChannel&) {
                    ++res.rank_redraws;
                }
            }
            if (degraded_here)
                ++res.degraded_intervals;
            res.final_n_nulls[su] = adaptive ? adapt[su].current_n_nulls : n_nulls;
        }
        res.grants_per_interval.push_back(grants_this_interval);

        // WLAN-side aggregate interference, taken under the premise that
        // every sector transmits (the regulatory question is what devices
        // would experience once the cellular network holds the channel).
        if (n_dev > 0) {
            VectorXd acc = VectorXd::Zero(n_dev);
            for (int s = 0; s < n_sectors; ++s)
                if (precoder_valid[static_cast<std::size_t>(s)])
                    metrics::accumulate_bs_interference_mw(precoders[static_cast<std::size_t>(s)],
                                                           g_dev[static_cast<std::size_t>(s)], acc);
            for (int d = 0; d < n_dev; ++d) {
                const double dbm = mw_to_dbm(acc(d));
                res.wlan_intf_dbm.push_back(dbm);
                if (tab.devices[static_cast<std::size_t>(d)].masked_sta)
                    res.masked_sta_intf_dbm.push_back(dbm);
                ++res.cca_samples;
                if (coexistence::wlan_cca(dbm, cfg.gamma_wlan_dbm))
                    ++res.cca_clear;
            }
        }

        // Downlink SINR and sector rates for the sectors that won access.
        for (int s = 0; s < n_sectors; ++s) {
            const std::size_t su = static_cast<std::size_t>(s);
            std::fill(served.begin(), served.end(), 0.0);
            double rate_bps = 0.0;
            if (granted[su] && precoder_valid[su]) {
                const auto& w = precoders[su];
                const auto& sel = selected[su];
                MatrixXcd h_sel(n_a, static_cast<Eigen::Index>(sel.size()));
                for (std::size_t k = 0; k < sel.size(); ++k)
                    h_sel.col(static_cast<Eigen::Index>(k)) = h_serv[su].col(sel[k]);
                const MatrixXcd cross = w.matrix.adjoint() * h_sel; // [stream][ut]

                for (std::size_t k = 0; k < sel.size(); ++k) {
                    const int ug = tab.ut_global(s, sel[k]);
                    metrics::SinrTerms terms;
                    for (Eigen::Index j = 0; j < cross.rows(); ++j) {
                        const double p = w.per_ut_power_mw *
                                         std::norm(cross(j, static_cast<Eigen::Index>(k)));
                        if (j == static_cast<Eigen::Index>(k))
                            terms.signal_mw = p;
                        else
                            terms.intra_mw += p;
                    }
                    VectorXcd h_other(n_a);
                    for (int o = 0; o < n_sectors; ++o) {
                        const std::size_t ou = static_cast<std::size_t>(o);
                        if (o == s || !granted[ou] || !precoder_valid[ou])
                            continue;
                        RngStream rs = make_stream(
                            cfg.master_seed, static_cast<std::uint64_t>(drop_index),
                            StreamPurpose::kFadingCross, ti,
                            static_cast<std::uint64_t>(ug) * 64 + static_cast<std::uint64_t>(o));
                        tab.bs_ut[ou * static_cast<std::size_t>(tab.n_sectors * tab.n_uts) +
                                  static_cast<std::size_t>(ug)]
                            .draw_into(h_other, rs);
                        terms.inter_mw += precoders[ou].per_ut_power_mw *
                                          (precoders[ou].matrix.adjoint() * h_other).squaredNorm();
                    }
                    if (cfg.wlan_ut_fast_fading && n_active > 0) {
                        RngStream rs = make_stream(cfg.master_seed,
                                                   static_cast<std::uint64_t>(drop_index),
                                                   StreamPurpose::kWlanUtFading, ti,
                                                   static_cast<std::uint64_t>(ug));
                        double mw = 0.0;
                        for (int a = 0; a < n_active; ++a)
                            mw += tab.ut_active_dev_mw(ug, a) * (-std::log(rs.uniform_pos()));
                        terms.wlan_mw = mw;
                    } else {
                        terms.wlan_mw = tab.wlan_at_ut_mw[static_cast<std::size_t>(ug)];
                    }
                    terms.noise_mw = ut_noise_mw;
                    const double se =
                        std::min(std::log2(1.0 + terms.sinr_linear()), cfg.se_cap_bps_hz);
                    const double ut_rate = se * cfg.bandwidth_hz();
                    rate_bps += ut_rate;
                    served[static_cast<std::size_t>(sel[k])] = ut_rate;
                }
            }
            res.sector_rate_bps.push_back(rate_bps);
            scheduling::update_pf(pf[su], served);
        }
    }
    return res;
}

/// Deterministic, order-independent aggregation of per-drop results into
/// the campaign report. Drops must be supplied in ascending drop order.
inline metrics::MetricsReport merge_drops(const ScenarioConfig& cfg,
                                          std::span<const DropResult> drops) {
    metrics::MetricsReport rep;
    std::vector<double> bs_pool, wlan_pool, rate_pool, masked_pool;
    std::size_t grants = 0, grant_total = 0, cca_clear = 0, cca_total = 0;
    double nn_sum = 0.0;
    std::size_t nn_count = 0;
    for (const auto& d : drops) {
        bs_pool.insert(bs_pool.end(), d.bs_filtered_dbm.begin(), d.bs_filtered_dbm.end());
        wlan_pool.insert(wlan_pool.end(), d.wlan_intf_dbm.begin(), d.wlan_intf_dbm.end());
        rate_pool.insert(rate_pool.end(), d.sector_rate_bps.begin(), d.sector_rate_bps.end());
        masked_pool.insert(masked_pool.end(), d.masked_sta_intf_dbm.begin(),
                           d.masked_sta_intf_dbm.end());
        for (int g : d.grants_per_interval)
            grants += static_cast<std::size_t>(g);
        grant_total += static_cast<std::size_t>(d.sectors) * static_cast<std::size_t>(d.intervals);
        cca_clear += d.cca_clear;
        cca_total += d.cca_samples;
        rep.degraded_intervals += d.degraded_intervals;
        rep.rank_redraws += d.rank_redraws;
        for (int nn : d.final_n_nulls) {
            nn_sum += nn;
            ++nn_count;
        }
    }
    rep.drops = drops.size();
    rep.sector_intervals = grant_total;
    rep.wlan_samples = wlan_pool.size();
    rep.elbt_grant_rate =
        grant_total > 0 ? static_cast<double>(grants) / static_cast<double>(grant_total) : 0.0;
    if (!wlan_pool.empty()) {
        rep.wlan_intf_p50_dbm = metrics::percentile(wlan_pool, 50.0);
        rep.wlan_intf_p95_dbm = metrics::percentile(wlan_pool, 95.0);
    }
    if (!bs_pool.empty()) {
        rep.bs_intf_p50_dbm = metrics::percentile(bs_pool, 50.0);
        rep.bs_intf_p95_dbm = metrics::percentile(bs_pool, 95.0);
    }
    if (!rate_pool.empty()) {
        double sum = 0.0;
        for (double r : rate_pool)
            sum += r;
        rep.sector_rate_mean_bps = sum / static_cast<double>(rate_pool.size());
        rep.sector_rate_p50_bps = metrics::percentile(rate_pool, 50.0);
    }
    if (!masked_pool.empty()) {
        std::size_t over = 0;
        for (double v : masked_pool)
            if (v >= cfg.gamma_wlan_dbm)
                ++over;
        rep.masked_sta_over_cca_fraction =
            static_cast<double>(over) / static_cast<double>(masked_pool.size());
        rep.masked_sta_samples = masked_pool.size();
    }
    rep.cca_clear_fraction =
        cca_total > 0 ? static_cast<double>(cca_clear) / static_cast<double>(cca_total) : 1.0;
    rep.final_n_nulls_mean = nn_count > 0 ? nn_sum / static_cast<double>(nn_count) : 0.0;
    return rep;
}

/// Per-interval grant rate across drops (adaptive-null diagnostics).
inline std::vector<double> grant_rate_by_interval(std::span<const DropResult> drops) {
    std::vector<double> out;
    std::vector<std::size_t> counts;
    std::size_t sectors_total = 0;
    for (const auto& d : drops) {
        if (d.grants_per_interval.size() > out.size()) {
            out.resize(d.grants_per_interval.size(), 0.0);
            counts.resize(d.grants_per_interval.size(), 0);
        }
        for (std::size_t t = 0; t < d.grants_per_interval.size(); ++t) {
            out[t] += static_cast<double>(d.grants_per_interval[t]);
            counts[t] += static_cast<std::size_t>(d.sectors);
        }
        sectors_total += static_cast<std::size_t>(d.sectors);
    }
    (void)sectors_total;
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = counts[t] > 0 ? out[t] / static_cast<double>(counts[t]) : 0.0;
    return out;
}

struct CampaignResult {
    metrics::MetricsReport report;
    std::vector<double> grant_rate_by_interval;
    bool adapt_monotone = true;
};

/// Runs all drops of a campaign, optionally across worker threads. Results
/// are bit-identical for any worker count: drops are independent and the
/// merge always walks them in ascending drop order.
inline CampaignResult run_campaign_full(const ScenarioConfig& cfg, int workers = 0) {
    cfg.validate();
    if (workers <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        workers = static_cast<int>(hc > 0 ? hc : 1);
    }
    workers = std::min<int>(workers, cfg.drops);

    std::vector<DropResult> results(static_cast<std::size_t>(cfg.drops));
    if (workers <= 1) {
        for (int d = 0; d < cfg.drops; ++d)
            results[static_cast<std::size_t>(d)] = run_drop(cfg, d);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int d = next.fetch_add(1);
                    if (d >= cfg.drops)
                        return;
                    results[static_cast<std::size_t>(d)] = run_drop(cfg, d);
                }
            });
        for (auto& th : pool)
            th.join();
    }

    CampaignResult out;
    out.report = merge_drops(cfg, results);
    out.grant_rate_by_interval = grant_rate_by_interval(results);
    for (const auto& d : results)
        out.adapt_monotone = out.adapt_monotone && d.adapt_monotone;
    return out;
}

inline metrics::MetricsReport run_campaign(const ScenarioConfig& cfg, int workers = 0) {
    return run_campaign_full(cfg, workers).report;
}

enum class SweepAxis { kNa, kNn, kHotspots };

inline SweepAxis sweep_axis_from_string(std::string_view name) {
    if (name == "na")
        return SweepAxis::kNa;
    if (name == "nn")
        return SweepAxis::kNn;
    if (name == "hotspots")
        return SweepAxis::kHotspots;
    throw ConfigParseError("unknown sweep parameter: " + std::string(name) +
                           " (expected na, nn or hotspots)");
}

struct SweepPoint {
    ScenarioConfig config;
    metrics::MetricsReport report;
};

/// One campaign per axis value; all campaigns share the master seed so the
/// geometry and large-scale randomness stay paired across values.
inline std::vector<SweepPoint> sweep(const ScenarioConfig& base, SweepAxis axis,
                                     std::span<const double> values, int workers = 0) {
    if (values.empty())
        throw ConfigParseError("sweep requires a non-empty value list");
    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (double v : values) {
        ScenarioConfig cfg = base;
        switch (axis) {
        case SweepAxis::kNa:
            cfg.n_a = static_cast<int>(std::lround(v));
            break;
        case SweepAxis::kNn:
            cfg.null_policy = NullPolicy::kFixed;
            cfg.n_n_fixed = static_cast<int>(std::lround(v));
            break;
        case SweepAxis::kHotspots:
            cfg.hotspots_per_sector = v;
            break;
        }
        cfg.validate();
        out.push_back({cfg, run_campaign(cfg, workers)});
    }
    return out;
}

} // namespace umimo::engine

#endif // UMIMO_ENGINE_HPP
