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

#ifndef UMIMO_CONFIG_HPP
#define UMIMO_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace umimo {

/// Malformed input: unknown key, bad syntax, unreadable file (CLI exit 1).
struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A well-formed config that violates a scenario invariant (CLI exit 2).
struct ConfigInvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NullPolicy {
    kFixed,   // n_n = <integer>
    kAuto,    // n_n = auto: round(0.75 (N_A - N_U))
    kAdaptive // n_n = adaptive: eLBT-failure feedback loop
};

enum class CovarianceMode {
    kPerfect, // noise-free covariance of the realised channels
    kSamples  // silent-phase sample covariance over S symbols
};

/// Every scenario parameter, parsed from flat `key = value` text. The field
/// set is closed: unknown keys are rejected so typos fail fast.
struct ScenarioConfig {
    int n_a = 64;
    int n_u = 8;
    NullPolicy null_policy = NullPolicy::kAuto;
    int n_n_fixed = 0; // meaningful for kFixed only
    int sites = 19;
    int sectors_per_site = 3;
    double isd_m = 150.0;
    double bs_height_m = 10.0;
    double device_height_m = 1.5;
    int uts_per_sector = 24;
    double hotspots_per_sector = 2.0;
    double hotspot_radius_m = 10.0;
    int stas_per_hotspot = 8;
    double ap_power_dbm = 24.0;
    double sta_power_dbm = 18.0;
    double gamma_wlan_dbm = -62.0;
    double gamma_bs_dbm = -72.0;
    double carrier_ghz = 5.2;
    double bandwidth_mhz = 20.0;
    int num_channels = 4;
    CovarianceMode covariance_mode = CovarianceMode::kPerfect;
    long covariance_symbols = 200;
    double hidden_fraction = 0.0;
    int drops = 200;
    int intervals_per_drop = 10;
    std::uint64_t master_seed = 1;

    std::string pathloss_bs = "umi";  // registry name for links with a BS endpoint
    std::string pathloss_d2d = "d2d"; // registry name for device-to-device links
    bool poisson_hotspots = false;
    double rssi_threshold_dbm = -62.0;
    double rssi_relax_step_db = 3.0;
    double pf_window_intervals = 100.0;
    double pf_floor_bps = 1.0;
    double se_cap_bps_hz = 7.8;
    double ut_noise_figure_db = 9.0;
    double bs_noise_figure_db = 5.0;
    bool elbt_include_noise = false;
    bool wlan_ut_fast_fading = false;
    int null_adapt_start = 0;
    int null_adapt_step = 4;
    int null_adapt_patience = 3;
    int null_adapt_max = 0; // 0 = clamp at N_A - N_U

    /// Null count actually applied by a non-adaptive run.
    int resolved_n_n() const {
        if (null_policy == NullPolicy::kFixed)
            return n_n_fixed;
        return static_cast<int>(std::lround(0.75 * (n_a - n_u)));
    }

    int adaptive_max_n_n() const {
        return null_adapt_max > 0 ? null_adapt_max : n_a - n_u;
    }

    double bandwidth_hz() const { return bandwidth_mhz * 1e6; }

    void validate() const;
    std::string serialize() const;
    void set(std::string_view key, std::string_view value);
    std::uint64_t hash() const;
    std::string hash_hex() const;

    static ScenarioConfig parse(std::string_view text);
    static ScenarioConfig parse_file(const std::string& path);
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw std::runtime_error("double formatting failed");
    return std::string(buf, end);
}

template <typename T> T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigParseError("invalid numeric value for '" + std::string(key) +
                               "': " + std::string(value));
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigParseError("invalid boolean for '" + std::string(key) + "': " + std::string(value));
}

} // namespace detail

inline void ScenarioConfig::set(std::string_view key, std::string_view value) {
    using detail::parse_bool;
    using detail::parse_number;
    const std::string_view v = detail::trim(value);
    if (key == "n_a")
        n_a = parse_number<int>(key, v);
    else if (key == "n_u")
        n_u = parse_number<int>(key, v);
    else if (key == "n_n") {
        if (v == "auto")
            null_policy = NullPolicy::kAuto;
        else if (v == "adaptive")
            null_policy = NullPolicy::kAdaptive;
        else {
            null_policy = NullPolicy::kFixed;
            n_n_fixed = parse_number<int>(key, v);
        }
    } else if (key == "sites")
        sites = parse_number<int>(key, v);
    else if (key == "sectors_per_site")
        sectors_per_site = parse_number<int>(key, v);
    else if (key == "isd_m")
        isd_m = parse_number<double>(key, v);
    else if (key == "bs_height_m")
        bs_height_m = parse_number<double>(key, v);
    else if (key == "device_height_m")
        device_height_m = parse_number<double>(key, v);
    else if (key == "uts_per_sector")
        uts_per_sector = parse_number<int>(key, v);
    else if (key == "hotspots_per_sector")
        hotspots_per_sector = parse_number<double>(key, v);
    else if (key == "hotspot_radius_m")
        hotspot_radius_m = parse_number<double>(key, v);
    else if (key == "stas_per_hotspot")
        stas_per_hotspot = parse_number<int>(key, v);
    else if (key == "ap_power_dbm")
        ap_power_dbm = parse_number<double>(key, v);
    else if (key == "sta_power_dbm")
        sta_power_dbm = parse_number<double>(key, v);
    else if (key == "gamma_wlan_dbm")
        gamma_wlan_dbm = parse_number<double>(key, v);
    else if (key == "gamma_bs_dbm")
        gamma_bs_dbm = parse_number<double>(key, v);
    else if (key == "carrier_ghz")
        carrier_ghz = parse_number<double>(key, v);
    else if (key == "bandwidth_mhz")
        bandwidth_mhz = parse_number<double>(key, v);
    else if (key == "num_channels")
        num_channels = parse_number<int>(key, v);
    else if (key == "covariance_mode") {
        if (v == "perfect")
            covariance_mode = CovarianceMode::kPerfect;
        else if (v.rfind("samples:", 0) == 0) {
            covariance_mode = CovarianceMode::kSamples;
            covariance_symbols = parse_number<long>(key, v.substr(8));
        } else
            throw ConfigParseError("covariance_mode must be 'perfect' or 'samples:<S>'");
    } else if (key == "hidden_fraction")
        hidden_fraction = parse_number<double>(key, v);
    else if (key == "drops")
        drops = parse_number<int>(key, v);
    else if (key == "intervals_per_drop")
        intervals_per_drop = parse_number<int>(key, v);
    else if (key == "master_seed")
        master_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "pathloss_bs" || key == "pathloss_d2d") {
        if (v != "umi" && v != "d2d")
            throw ConfigParseError("unknown path-loss model for '" + std::string(key) +
                                   "': " + std::string(v) + " (registry has: umi, d2d)");
        (key == "pathloss_bs" ? pathloss_bs : pathloss_d2d) = std::string(v);
    } else if (key == "poisson_hotspots")
        poisson_hotspots = parse_bool(key, v);
    else if (key == "rssi_threshold_dbm")
        rssi_threshold_dbm = parse_number<double>(key, v);
    else if (key == "rssi_relax_step_db")
        rssi_relax_step_db = parse_number<double>(key, v);
    else if (key == "pf_window_intervals")
        pf_window_intervals = parse_number<double>(key, v);
    else if (key == "pf_floor_bps")
        pf_floor_bps = parse_number<double>(key, v);
    else if (key == "se_cap_bps_hz")
        se_cap_bps_hz = parse_number<double>(key, v);
    else if (key == "ut_noise_figure_db")
        ut_noise_figure_db = parse_number<double>(key, v);
    else if (key == "bs_noise_figure_db")
        bs_noise_figure_db = parse_number<double>(key, v);
    else if (key == "elbt_include_noise")
        elbt_include_noise = parse_bool(key, v);
    else if (key == "wlan_ut_fast_fading")
        wlan_ut_fast_fading = parse_bool(key, v);
    else if (key == "null_adapt_start")
        null_adapt_start = parse_number<int>(key, v);
    else if (key == "null_adapt_step")
        null_adapt_step = parse_number<int>(key, v);
    else if (key == "null_adapt_patience")
        null_adapt_patience = parse_number<int>(key, v);
    else if (key == "null_adapt_max")
        null_adapt_max = parse_number<int>(key, v);
    else
        throw ConfigParseError("unknown config key: " + std::string(key));
}

inline std::string ScenarioConfig::serialize() const {
    using detail::format_double;
    std::ostringstream os;
    os << "n_a = " << n_a << '\n';
    os << "n_u = " << n_u << '\n';
    os << "n_n = ";
    switch (null_policy) {
    case NullPolicy::kAuto: os << "auto"; break;
    case NullPolicy::kAdaptive: os << "adaptive"; break;
    case NullPolicy::kFixed: os << n_n_fixed; break;
    }
    os << '\n';
    os << "sites = " << sites << '\n';
    os << "sectors_per_site = " << sectors_per_site << '\n';
    os << "isd_m = " << format_double(isd_m) << '\n';
    os << "bs_height_m = " << format_double(bs_height_m) << '\n';
    os << "device_height_m = " << format_double(device_height_m) << '\n';
    os << "uts_per_sector = " << uts_per_sector << '\n';
    os << "hotspots_per_sector = " << format_double(hotspots_per_sector) << '\n';
    os << "hotspot_radius_m = " << format_double(hotspot_radius_m) << '\n';
    os << "stas_per_hotspot = " << stas_per_hotspot << '\n';
    os << "ap_power_dbm = " << format_double(ap_power_dbm) << '\n';
    os << "sta_power_dbm = " << format_double(sta_power_dbm) << '\n';
    os << "gamma_wlan_dbm = " << format_double(gamma_wlan_dbm) << '\n';
    os << "gamma_bs_dbm = " << format_double(gamma_bs_dbm) << '\n';
    os << "carrier_ghz = " << format_double(carrier_ghz) << '\n';
    os << "bandwidth_mhz = " << format_double(bandwidth_mhz) << '\n';
    os << "num_channels = " << num_channels << '\n';
    os << "covariance_mode = ";
    if (covariance_mode == CovarianceMode::kPerfect)
        os << "perfect";
    else
        os << "samples:" << covariance_symbols;
    os << '\n';
    os << "hidden_fraction = " << format_double(hidden_fraction) << '\n';
    os << "drops = " << drops << '\n';
    os << "intervals_per_drop = " << intervals_per_drop << '\n';
    os << "master_seed = " << master_seed << '\n';
    os << "pathloss_bs = " << pathloss_bs << '\n';
    os << "pathloss_d2d = " << pathloss_d2d << '\n';
    os << "poisson_hotspots = " << (poisson_hotspots ? "true" : "false") << '\n';
    os << "rssi_threshold_dbm = " << format_double(rssi_threshold_dbm) << '\n';
    os << "rssi_relax_step_db = " << format_double(rssi_relax_step_db) << '\n';
    os << "pf_window_intervals = " << format_double(pf_window_intervals) << '\n';
    os << "pf_floor_bps = " << format_double(pf_floor_bps) << '\n';
    os << "se_cap_bps_hz = " << format_double(se_cap_bps_hz) << '\n';
    os << "ut_noise_figure_db = " << format_double(ut_noise_figure_db) << '\n';
    os << "bs_noise_figure_db = " << format_double(bs_noise_figure_db) << '\n';
    os << "elbt_include_noise = " << (elbt_include_noise ? "true" : "false") << '\n';
    os << "wlan_ut_fast_fading = " << (wlan_ut_fast_fading ? "true" : "false") << '\n';
    os << "null_adapt_start = " << null_adapt_start << '\n';
    os << "null_adapt_step = " << null_adapt_step << '\n';
    os << "null_adapt_patience = " << null_adapt_patience << '\n';
    os << "null_adapt_max = " << null_adapt_max << '\n';
    return os.str();
}

inline ScenarioConfig ScenarioConfig::parse(std::string_view text) {
    ScenarioConfig cfg;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
        cfg.set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

inline void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigInvariantError(msg); };
    if (n_a < 1)
        fail("n_a must be at least 1");
    if (n_u < 1)
        fail("n_u must be at least 1");
    if (sites != 1 && sites != 7 && sites != 19)
        fail("sites must be 1, 7 or 19 (hexagonal rings 0..2)");
    if (sectors_per_site != 3)
        fail("sectors_per_site must be 3");
    if (isd_m <= 0.0)
        fail("isd_m must be positive");
    if (uts_per_sector < n_u)
        fail("uts_per_sector must be at least n_u");
    if (hotspots_per_sector < 0.0)
        fail("hotspots_per_sector must be non-negative");
    if (hotspot_radius_m <= 0.0)
        fail("hotspot_radius_m must be positive");
    if (stas_per_hotspot < 0)
        fail("stas_per_hotspot must be non-negative");
    if (num_channels < 1)
        fail("num_channels must be at least 1");
    if (carrier_ghz <= 0.0)
        fail("carrier_ghz must be positive");
    if (bandwidth_mhz <= 0.0)
        fail("bandwidth_mhz must be positive");
    if (hidden_fraction < 0.0 || hidden_fraction > 1.0)
        fail("hidden_fraction must lie in [0, 1]");
    if (drops < 1)
        fail("drops must be at least 1");
    if (intervals_per_drop < 1)
        fail("intervals_per_drop must be at least 1");
    if (covariance_mode == CovarianceMode::kSamples && covariance_symbols < 1)
        fail("covariance sample count must be at least 1");
    if (null_policy == NullPolicy::kAdaptive) {
        if (null_adapt_start < 0 || null_adapt_start > n_a - n_u)
            fail("null_adapt_start must lie in [0, n_a - n_u]");
        if (null_adapt_step < 1)
            fail("null_adapt_step must be at least 1");
        if (null_adapt_patience < 1)
            fail("null_adapt_patience must be at least 1");
        if (adaptive_max_n_n() > n_a - n_u)
            fail("null_adapt_max must not exceed n_a - n_u");
    } else {
        const int nn = resolved_n_n();
        if (nn < 0 || nn > n_a)
            fail("n_n must lie in [0, n_a]");
        if (n_u > n_a - nn)
            fail("n_u exceeds the available degrees of freedom n_a - n_n");
    }
    if (pf_window_intervals < 1.0)
        fail("pf_window_intervals must be at least 1");
    if (pf_floor_bps <= 0.0)
        fail("pf_floor_bps must be positive");
    if (se_cap_bps_hz <= 0.0)
        fail("se_cap_bps_hz must be positive");
    if (rssi_relax_step_db <= 0.0)
        fail("rssi_relax_step_db must be positive");
}

inline std::uint64_t ScenarioConfig::hash() const {
    // FNV-1a over the canonical serialisation.
    const std::string text = serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string ScenarioConfig::hash_hex() const {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = hash();
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

} // namespace umimo

#endif // UMIMO_CONFIG_HPP
