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

#ifndef UMIMO_PROPAGATION_HPP
#define UMIMO_PROPAGATION_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "umimo/rng.hpp"
#include "umimo/units.hpp"

namespace umimo::propagation {

/// Urban-micro LOS probability: min(18/d,1)*(1-exp(-d/36)) + exp(-d/36).
inline double los_probability(double d_m) {
    if (d_m <= 0.0)
        return 1.0;
    const double e = std::exp(-d_m / 36.0);
    const double p = std::min(18.0 / d_m, 1.0) * (1.0 - e) + e;
    return std::clamp(p, 0.0, 1.0);
}

/// Urban-micro path loss (TR 36.814 table B.1.2.1-1 coefficients), used for
/// every link with a base-station endpoint. Distances below 1 m clamp to 1 m.
inline double pathloss_umi_db(double d_m, double fc_ghz, bool los) {
    if (fc_ghz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    const double d = std::max(d_m, 1.0);
    if (los)
        return 22.0 * std::log10(d) + 28.0 + 20.0 * std::log10(fc_ghz);
    return 36.7 * std::log10(d) + 22.7 + 26.0 * std::log10(fc_ghz);
}

/// Device-to-device path loss: dual-slope outdoor model at 1.5 m antenna
/// heights (TR 36.843 A.2.1.2 outdoor links). Below the breakpoint the slope
/// is 22.7 dB/decade, beyond it 40 dB/decade; continuous at the breakpoint.
inline double pathloss_d2d_db(double d_m, double fc_ghz) {
    if (fc_ghz <= 0.0)
        throw std::invalid_argument("carrier frequency must be positive");
    const double d = std::max(d_m, 1.0);
    constexpr double h_eff = 0.5; // antenna height minus 1 m ground offset
    const double breakpoint_m = 4.0 * h_eff * h_eff * fc_ghz * 1e9 / 299792458.0;
    const double near_slope = [&](double dist) {
        return 22.7 * std::log10(dist) + 41.0 + 20.0 * std::log10(fc_ghz / 5.0);
    }(std::min(d, breakpoint_m));
    if (d <= breakpoint_m)
        return near_slope;
    // Far slope anchored at the breakpoint so the curve stays continuous.
    return near_slope + 40.0 * std::log10(d / breakpoint_m);
}

/// Distance-dependent Ricean K factor (TR 25.996 SCM LOS): K = 13 - 0.03 d dB.
inline double ricean_k_db(double d_m) { return 13.0 - 0.03 * std::max(d_m, 0.0); }

/// Linear K factor; values below 1e-3 collapse to pure Rayleigh (0).
inline double ricean_k_linear(double d_m) {
    const double k = db_to_linear(ricean_k_db(d_m));
    return k < 1e-3 ? 0.0 : k;
}

/// Three-sector element pattern: G_max - min(12 (theta/70)^2, 25) with
/// G_max = 14 dBi, theta off boresight in degrees.
inline double sector_antenna_gain_db(double theta_deg) {
    const double t = theta_deg / 70.0;
    return 14.0 - std::min(12.0 * t * t, 25.0);
}

struct PathLossModel {
    std::string name;
    double shadowing_sigma_los_db = 0.0;
    double shadowing_sigma_nlos_db = 0.0;
    double (*loss_db)(double d_m, double fc_ghz, bool los) = nullptr;
};

namespace detail {
inline double umi_entry(double d, double fc, bool los) { return pathloss_umi_db(d, fc, los); }
inline double d2d_entry(double d, double fc, bool /*los*/) { return pathloss_d2d_db(d, fc); }
} // namespace detail

/// Registry keyed by the model names accepted in config files.
inline const PathLossModel& pathloss_model(std::string_view name) {
    static const PathLossModel umi{"umi", 3.0, 4.0, &detail::umi_entry};
    static const PathLossModel d2d{"d2d", 7.0, 7.0, &detail::d2d_entry};
    if (name == "umi")
        return umi;
    if (name == "d2d")
        return d2d;
    throw std::invalid_argument("unknown path-loss model: " + std::string(name));
}

/// Large-scale state of one link, fixed for the duration of a drop.
struct LinkLoss {
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    bool los = false;
    double k_factor_db = -300.0; // effectively Rayleigh unless LOS
};

/// Draws LOS state, shadowing and the distance-dependent K factor for one
/// link. `d2_m` feeds the LOS probability, `d3_m` the path-loss curve.
inline LinkLoss draw_link_loss(const PathLossModel& model, double d2_m, double d3_m,
                               double fc_ghz, RngStream& rng) {
    LinkLoss ll;
    ll.los = rng.bernoulli(los_probability(d2_m));
    ll.pathloss_db = model.loss_db(d3_m, fc_ghz, ll.los);
    const double sigma = ll.los ? model.shadowing_sigma_los_db : model.shadowing_sigma_nlos_db;
    ll.shadowing_db = sigma * rng.normal();
    ll.k_factor_db = ll.los ? ricean_k_db(d2_m) : -300.0;
    return ll;
}

/// Half-wavelength uniform linear array response; theta measured from
/// broadside. All entries are unit modulus.
inline Eigen::VectorXcd steering_vector(int n_antennas, double theta_deg) {
    Eigen::VectorXcd a(n_antennas);
    const double phase_step = std::numbers::pi * std::sin(theta_deg * std::numbers::pi / 180.0);
    for (int n = 0; n < n_antennas; ++n)
        a(n) = std::polar(1.0, phase_step * n);
    return a;
}

/// Precomputed per-link fading sampler. Channels follow
///   h = sqrt(g) * ( sqrt(K/(K+1)) a(theta) + sqrt(1/(K+1)) w ),
/// with g the linear large-scale power gain (element gain, path loss and
/// shadowing), a(theta) the ULA steering vector and w i.i.d. CN(0,1), so
/// that E||h||^2 = N_A * g. The large-scale part is folded in once; only
/// the fading is redrawn per scheduling interval.
class ChannelSampler {
  public:
    ChannelSampler() = default;

    ChannelSampler(const LinkLoss& loss, double theta_deg, double element_gain_db) {
        const double gain_db = element_gain_db - loss.pathloss_db - loss.shadowing_db;
        amp_ = std::sqrt(db_to_linear(gain_db));
        double k_lin = loss.los ? db_to_linear(loss.k_factor_db) : 0.0;
        if (k_lin < 1e-3)
            k_lin = 0.0;
        los_w_ = std::sqrt(k_lin / (k_lin + 1.0));
        nlos_w_ = std::sqrt(1.0 / (k_lin + 1.0));
        phase_step_ = std::numbers::pi * std::sin(theta_deg * std::numbers::pi / 180.0);
    }

    template <typename Derived> void draw_into(Eigen::MatrixBase<Derived> const& out_, RngStream& rng) const {
        auto& out = const_cast<Eigen::MatrixBase<Derived>&>(out_);
        const auto n_antennas = out.size();
        for (Eigen::Index n = 0; n < n_antennas; ++n) {
            const std::complex<double> a = std::polar(1.0, phase_step_ * static_cast<double>(n));
            out(n) = amp_ * (los_w_ * a + nlos_w_ * rng.cnormal());
        }
    }

    /// Linear large-scale power gain per receive antenna.
    double large_scale_gain() const { return amp_ * amp_; }

  private:
    double amp_ = 0.0;
    double los_w_ = 0.0;
    double nlos_w_ = 1.0;
    double phase_step_ = 0.0;
};

/// Draws one N_A-dimensional Ricean channel realisation (see ChannelSampler).
inline Eigen::VectorXcd draw_channel(int n_antennas, const LinkLoss& loss, double theta_deg,
                                     double element_gain_db, RngStream& rng) {
    if (n_antennas < 1)
        throw std::invalid_argument("array size must be at least 1");
    const ChannelSampler sampler(loss, theta_deg, element_gain_db);
    Eigen::VectorXcd h(n_antennas);
    sampler.draw_into(h, rng);
    return h;
}

} // namespace umimo::propagation

#endif // UMIMO_PROPAGATION_HPP
