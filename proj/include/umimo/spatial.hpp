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

#ifndef UMIMO_SPATIAL_HPP
#define UMIMO_SPATIAL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "umimo/rng.hpp"
#include "umimo/units.hpp"

namespace umimo::spatial {

/// Thrown when the projected user channel matrix is rank deficient; the
/// caller treats the interval as a scheduling failure and redraws fading.
struct RankDeficientChannel : std::runtime_error {
    RankDeficientChannel() : std::runtime_error("projected user channels are rank deficient") {}
};

/// Hermitian spatial covariance of the WLAN transmissions seen by one BS.
/// sample_count == 0 marks the analytic (perfect-knowledge) form.
struct Covariance {
    Eigen::MatrixXcd matrix;
    long sample_count = 0;
};

/// Orthonormal basis of the nulled subspace: the n_nulls dominant
/// eigenvectors of the WLAN covariance, eigenvalues kept in descending order.
struct NullBasis {
    Eigen::MatrixXcd basis;      // N_A x N_N, orthonormal columns
    Eigen::VectorXd eigenvalues; // the N_N retained eigenvalues, descending

    int n_nulls() const { return static_cast<int>(basis.cols()); }
};

/// Power-scaled precoder: unit-norm columns plus the per-stream powers.
struct Precoder {
    Eigen::MatrixXcd matrix; // N_A x N_U, unit-norm columns
    double per_ut_power_mw = 0.0;
    double total_power_mw = 0.0;

    int n_streams() const { return static_cast<int>(matrix.cols()); }
};

/// Noise-free covariance from known channels stacked as matrix columns:
/// R = sum_w P_w g_w g_w^H. Zero columns yield the all-zero matrix.
inline Covariance true_covariance_cols(const Eigen::MatrixXcd& channels,
                                       const Eigen::VectorXd& tx_powers_mw) {
    if (channels.cols() != tx_powers_mw.size())
        throw std::invalid_argument("channel/power count mismatch");
    if ((tx_powers_mw.array() < 0.0).any())
        throw std::invalid_argument("negative transmit power");
    Covariance cov;
    cov.matrix = Eigen::MatrixXcd::Zero(channels.rows(), channels.rows());
    cov.sample_count = 0;
    for (Eigen::Index w = 0; w < channels.cols(); ++w)
        cov.matrix.selfadjointView<Eigen::Lower>().rankUpdate(channels.col(w), tx_powers_mw(w));
    cov.matrix = cov.matrix.selfadjointView<Eigen::Lower>();
    return cov;
}

/// Noise-free covariance from known channels: R = sum_w P_w g_w g_w^H.
/// An empty device list yields the all-zero matrix (no WLAN neighbours).
inline Covariance true_covariance(std::span<const Eigen::VectorXcd> wlan_channels,
                                  std::span<const double> tx_powers_mw, int n_antennas) {
    if (wlan_channels.size() != tx_powers_mw.size())
        throw std::invalid_argument("channel/power count mismatch");
    Eigen::MatrixXcd cols(n_antennas, static_cast<Eigen::Index>(wlan_channels.size()));
    Eigen::VectorXd powers(static_cast<Eigen::Index>(tx_powers_mw.size()));
    for (std::size_t w = 0; w < wlan_channels.size(); ++w) {
        if (wlan_channels[w].size() != n_antennas)
            throw std::invalid_argument("channel vector length != N_A");
        cols.col(static_cast<Eigen::Index>(w)) = wlan_channels[w];
        powers(static_cast<Eigen::Index>(w)) = tx_powers_mw[w];
    }
    return true_covariance_cols(cols, powers);
}

/// Sample covariance over S received symbols:
///   y_s = sum_w sqrt(P_w) g_w x_{w,s} + n_s,   R = (1/S) sum_s y_s y_s^H,
/// with unit-power i.i.d. CN(0,1) symbols and per-antenna noise power
/// noise_power_mw. This is what a silent-phase receiver can actually form.
inline Covariance sample_covariance_cols(const Eigen::MatrixXcd& channels,
                                         const Eigen::VectorXd& tx_powers_mw, long num_symbols,
                                         double noise_power_mw, RngStream& rng) {
    if (num_symbols < 1)
        throw std::invalid_argument("need at least one symbol");
    if (channels.cols() != tx_powers_mw.size())
        throw std::invalid_argument("channel/power count mismatch");
    const auto n_antennas = channels.rows();
    const auto n_dev = channels.cols();
    const double noise_amp = std::sqrt(noise_power_mw);

    // Y = G diag(sqrt(P)) X + N, accumulated blockwise so large S stays cheap.
    const Eigen::MatrixXcd weighted = channels * tx_powers_mw.cwiseSqrt().asDiagonal();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n_antennas, n_antennas);
    const long block = 256;
    Eigen::MatrixXcd symbols(n_dev, block);
    Eigen::MatrixXcd y(n_antennas, block);
    for (long s0 = 0; s0 < num_symbols; s0 += block) {
        const long cur = std::min(block, num_symbols - s0);
        for (long s = 0; s < cur; ++s) {
            for (Eigen::Index n = 0; n < n_antennas; ++n)
                y(n, s) = noise_amp * rng.cnormal();
            for (Eigen::Index w = 0; w < n_dev; ++w)
                symbols(w, s) = rng.cnormal();
        }
        y.leftCols(cur).noalias() += weighted * symbols.leftCols(cur);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(y.leftCols(cur), 1.0);
    }
    Covariance cov;
    cov.matrix = acc.selfadjointView<Eigen::Lower>();
    cov.matrix /= static_cast<double>(num_symbols);
    cov.sample_count = num_symbols;
    return cov;
}

inline Covariance sample_covariance(std::span<const Eigen::VectorXcd> wlan_channels,
                                    std::span<const double> tx_powers_mw, int n_antennas,
                                    long num_symbols, double noise_power_mw, RngStream& rng) {
    Eigen::MatrixXcd cols(n_antennas, static_cast<Eigen::Index>(wlan_channels.size()));
    Eigen::VectorXd powers(static_cast<Eigen::Index>(tx_powers_mw.size()));
    if (wlan_channels.size() != tx_powers_mw.size())
        throw std::invalid_argument("channel/power count mismatch");
    for (std::size_t w = 0; w < wlan_channels.size(); ++w) {
        if (wlan_channels[w].size() != n_antennas)
            throw std::invalid_argument("channel vector length != N_A");
        cols.col(static_cast<Eigen::Index>(w)) = wlan_channels[w];
        powers(static_cast<Eigen::Index>(w)) = tx_powers_mw[w];
    }
    return sample_covariance_cols(cols, powers, num_symbols, noise_power_mw, rng);
}

/// Dominant eigenspace of R: the eigenvectors of its n_nulls largest
/// eigenvalues. Degenerate spectra resolve deterministically through the
/// solver so repeated runs agree. n_nulls == 0 yields an empty basis.
inline NullBasis null_basis(const Covariance& cov, int n_nulls) {
    const auto n = cov.matrix.rows();
    if (cov.matrix.cols() != n)
        throw std::invalid_argument("covariance must be square");
    if (n_nulls < 0 || n_nulls > n)
        throw std::invalid_argument("n_nulls must lie in [0, N_A]");

    const double scale = cov.matrix.norm();
    if (scale > 0.0) {
        const double asym = (cov.matrix - cov.matrix.adjoint()).norm() / scale;
        if (asym > 1e-9)
            throw std::invalid_argument("covariance is not Hermitian");
    }

    NullBasis nb;
    if (n_nulls == 0) {
        nb.basis = Eigen::MatrixXcd::Zero(n, 0);
        nb.eigenvalues = Eigen::VectorXd::Zero(0);
        return nb;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    // Eigen returns ascending order; take the trailing n_nulls, reversed.
    nb.basis = es.eigenvectors().rightCols(n_nulls).rowwise().reverse();
    nb.eigenvalues = es.eigenvalues().tail(n_nulls).reverse();
    return nb;
}

/// (I - U U^H) v: projection onto the orthogonal complement of the nulled
/// subspace. An empty basis is the identity.
inline Eigen::VectorXcd project_complement(const NullBasis& nulls, const Eigen::VectorXcd& v) {
    if (nulls.basis.cols() == 0)
        return v;
    if (nulls.basis.rows() != v.size())
        throw std::invalid_argument("dimension mismatch in projection");
    return v - nulls.basis * (nulls.basis.adjoint() * v);
}

/// Column-wise complement projection of a channel matrix.
inline Eigen::MatrixXcd project_complement(const NullBasis& nulls, const Eigen::MatrixXcd& m) {
    if (nulls.basis.cols() == 0)
        return m;
    if (nulls.basis.rows() != m.rows())
        throw std::invalid_argument("dimension mismatch in projection");
    return m - nulls.basis * (nulls.basis.adjoint() * m);
}

/// Zero-forcing precoder on the complement-projected user channels:
///   W_raw = H~ (H~^H H~)^(-1),  H~ = (I - U U^H) H,
/// columns normalised to unit norm, total power split equally per stream.
/// Every column lies in the complement of U, so the radiation nulls hold
/// for the data transmission as well.
inline Precoder zf_precoder(const Eigen::MatrixXcd& ut_channels, const NullBasis& nulls,
                            double total_power_mw) {
    const auto n_a = ut_channels.rows();
    const auto n_u = ut_channels.cols();
    if (n_u < 1)
        throw std::invalid_argument("need at least one user channel");
    if (n_u > n_a - nulls.basis.cols())
        throw std::invalid_argument("N_U exceeds the spatial degrees of freedom N_A - N_N");

    const Eigen::MatrixXcd projected = project_complement(nulls, ut_channels);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(projected);
    if (qr.rank() < n_u)
        throw RankDeficientChannel();

    const Eigen::MatrixXcd gram = projected.adjoint() * projected;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw RankDeficientChannel();
    Eigen::MatrixXcd w = projected * llt.solve(Eigen::MatrixXcd::Identity(n_u, n_u));

    Precoder p;
    for (Eigen::Index k = 0; k < n_u; ++k) {
        const double nrm = w.col(k).norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm))
            throw RankDeficientChannel();
        w.col(k) /= nrm;
    }
    p.matrix = std::move(w);
    p.total_power_mw = total_power_mw;
    p.per_ut_power_mw = total_power_mw / static_cast<double>(n_u);
    return p;
}

/// Regulatory transmit power for a 20 MHz unlicensed channel: the 30 dBm
/// cap reduced by the per-stream beamforming gain,
///   total = 30 - 10 log10((N_A - N_N) / N_U) dBm,
/// so that per-stream power x (N_A - N_N) array gain = 30 dBm per beam.
inline double regulatory_power_dbm(int n_antennas, int n_nulls, int n_users) {
    if (n_users < 1)
        throw std::invalid_argument("need at least one user");
    if (n_antennas - n_nulls < n_users)
        throw std::invalid_argument("not enough spatial degrees of freedom: N_A - N_N < N_U");
    return 30.0 - 10.0 * std::log10(static_cast<double>(n_antennas - n_nulls) /
                                    static_cast<double>(n_users));
}

inline double per_stream_power_dbm(int n_antennas, int n_nulls, int n_users) {
    return regulatory_power_dbm(n_antennas, n_nulls, n_users) -
           10.0 * std::log10(static_cast<double>(n_users));
}

} // namespace umimo::spatial

#endif // UMIMO_SPATIAL_HPP
