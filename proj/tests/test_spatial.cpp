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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "test_util.hpp"
#include "umimo/spatial.hpp"

using namespace umimo;
using namespace umimo::spatial;

TEST_CASE("true_covariance: rank-one outer product and empty input") {
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(4);
    e1(0) = 1.0;
    const auto cov = true_covariance(std::vector<Eigen::VectorXcd>{e1}, std::vector<double>{1.0}, 4);
    CHECK((cov.matrix - Eigen::Vector4cd{1.0, 0.0, 0.0, 0.0}.asDiagonal().toDenseMatrix()).norm() <
          1e-15);
    CHECK(cov.sample_count == 0);

    const auto empty = true_covariance(std::vector<Eigen::VectorXcd>{}, std::vector<double>{}, 4);
    CHECK(empty.matrix.trace().real() == 0.0);
}

TEST_CASE("true_covariance: orthogonal devices give the analytic spectrum") {
    Eigen::VectorXcd g1 = Eigen::VectorXcd::Zero(6), g2 = Eigen::VectorXcd::Zero(6);
    g1(1) = 1.0;
    g2(4) = std::complex<double>(0.0, 1.0);
    const auto cov = true_covariance(std::vector<Eigen::VectorXcd>{g1, g2},
                                     std::vector<double>{2.0, 1.0}, 6);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
    Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev(5) == Catch::Approx(2.0).margin(1e-12));
    CHECK(ev(4) == Catch::Approx(1.0).margin(1e-12));
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(ev(i)) < 1e-12);
}

TEST_CASE("sample_covariance: converges to signal plus noise covariance") {
    RngStream rng{41};
    const int n = 8;
    const double noise_mw = 0.01;
    const Eigen::VectorXcd g = test_util::random_channel(n, rng);
    const auto r_true =
        true_covariance(std::vector<Eigen::VectorXcd>{g}, std::vector<double>{2.0}, n);
    const Eigen::MatrixXcd target =
        r_true.matrix + noise_mw * Eigen::MatrixXcd::Identity(n, n);

    RngStream sample_rng{42};
    const auto r_hat = sample_covariance(std::vector<Eigen::VectorXcd>{g}, std::vector<double>{2.0},
                                         n, 100000, noise_mw, sample_rng);
    CHECK(r_hat.sample_count == 100000);
    CHECK((r_hat.matrix - target).norm() / target.norm() < 0.05);
}

TEST_CASE("sample_covariance: single symbol has rank one") {
    RngStream rng{43};
    const int n = 6;
    const Eigen::VectorXcd g = test_util::random_channel(n, rng);
    const auto r1 = sample_covariance(std::vector<Eigen::VectorXcd>{g}, std::vector<double>{1.0}, n,
                                      1, 0.0, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r1.matrix);
    int significant = 0;
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 1e-12 * es.eigenvalues()(n - 1))
            ++significant;
    CHECK(significant == 1);
}

TEST_CASE("sample_covariance: estimation error shrinks with the symbol count") {
    const int n = 8;
    int improved = 0;
    for (int trial = 0; trial < 100; ++trial) {
        RngStream rng{static_cast<std::uint64_t>(500 + trial)};
        const Eigen::VectorXcd g = test_util::random_channel(n, rng);
        const double noise_mw = 0.05;
        const Eigen::MatrixXcd target =
            true_covariance(std::vector<Eigen::VectorXcd>{g}, std::vector<double>{1.0}, n).matrix +
            noise_mw * Eigen::MatrixXcd::Identity(n, n);
        const auto err = [&](long s) {
            RngStream srng{static_cast<std::uint64_t>(9000 + trial), static_cast<std::uint64_t>(s)};
            const auto r = sample_covariance(std::vector<Eigen::VectorXcd>{g},
                                             std::vector<double>{1.0}, n, s, noise_mw, srng);
            return (r.matrix - target).norm();
        };
        if (err(100) > err(10000))
            ++improved;
    }
    CHECK(improved >= 95);
}

TEST_CASE("null_basis: dominant eigenvector of a diagonal covariance") {
    Covariance cov;
    cov.matrix = Eigen::Vector2cd{4.0, 1.0}.asDiagonal();
    const auto nb = null_basis(cov, 1);
    REQUIRE(nb.basis.cols() == 1);
    CHECK(std::abs(nb.basis(0, 0)) == Catch::Approx(1.0).margin(1e-12)); // e1 up to phase
    CHECK(std::abs(nb.basis(1, 0)) < 1e-12);
    CHECK(nb.eigenvalues(0) == Catch::Approx(4.0));
}

TEST_CASE("null_basis: zero nulls yields the identity projection") {
    Covariance cov;
    cov.matrix = Eigen::MatrixXcd::Identity(5, 5);
    const auto nb = null_basis(cov, 0);
    CHECK(nb.basis.cols() == 0);
    RngStream rng{44};
    const auto v = test_util::random_channel(5, rng);
    CHECK((project_complement(nb, v) - v).norm() == 0.0);
}

TEST_CASE("null_basis: degenerate spectrum still yields an orthonormal basis") {
    Covariance cov;
    cov.matrix = Eigen::MatrixXcd::Identity(8, 8);
    const auto nb = null_basis(cov, 3);
    CHECK((nb.basis.adjoint() * nb.basis - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
    // Eigenvalues kept in descending order.
    for (int i = 1; i < nb.eigenvalues.size(); ++i)
        CHECK(nb.eigenvalues(i - 1) >= nb.eigenvalues(i) - 1e-12);
}

TEST_CASE("null_basis: rejects non-Hermitian input and bad null counts") {
    Covariance cov;
    cov.matrix = Eigen::MatrixXcd::Zero(3, 3);
    cov.matrix(0, 1) = 1.0; // asymmetric
    CHECK_THROWS_AS(null_basis(cov, 1), std::invalid_argument);

    Covariance ok;
    ok.matrix = Eigen::MatrixXcd::Identity(3, 3);
    CHECK_THROWS_AS(null_basis(ok, 4), std::invalid_argument);
    CHECK_THROWS_AS(null_basis(ok, -1), std::invalid_argument);
}

TEST_CASE("null_basis: eigen reconstruction of random PSD matrices") {
    RngStream rng{45};
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12;
        const Eigen::MatrixXcd a = test_util::random_channel_matrix(n, 2 * n, rng);
        Covariance cov;
        cov.matrix = a * a.adjoint() / static_cast<double>(n);
        const auto full = null_basis(cov, n);
        const Eigen::MatrixXcd rebuilt =
            full.basis * full.eigenvalues.asDiagonal() * full.basis.adjoint();
        CHECK((cov.matrix - rebuilt).norm() <= 1e-10 * cov.matrix.norm());
        // Positive semidefinite spectrum.
        CHECK(full.eigenvalues.minCoeff() >= -1e-10 * cov.matrix.trace().real());
    }
}

TEST_CASE("project_complement: coordinate projection, annihilation, idempotence") {
    NullBasis nb;
    nb.basis = Eigen::MatrixXcd::Zero(4, 1);
    nb.basis(0, 0) = 1.0;
    nb.eigenvalues = Eigen::VectorXd::Ones(1);

    Eigen::VectorXcd v(4);
    v << 1.0, 1.0, 0.0, 0.0;
    const auto p = project_complement(nb, v);
    CHECK(std::abs(p(0)) < 1e-15);
    CHECK(std::abs(p(1) - 1.0) < 1e-15);

    Eigen::VectorXcd in_span = Eigen::VectorXcd::Zero(4);
    in_span(0) = std::complex<double>(2.0, -3.0);
    CHECK(project_complement(nb, in_span).norm() < 1e-12 * in_span.norm());

    RngStream rng{46};
    const auto w = test_util::random_channel(4, rng);
    const auto once = project_complement(nb, w);
    const auto twice = project_complement(nb, once);
    CHECK((twice - once).norm() < 1e-12 * w.norm());
}

TEST_CASE("projector algebra: P = P^H = P^2 within 1e-12") {
    RngStream rng{47};
    const int n = 16;
    const Eigen::MatrixXcd g = test_util::random_channel_matrix(n, 5, rng);
    const auto cov = true_covariance_cols(g, Eigen::VectorXd::Ones(5));
    const auto nb = null_basis(cov, 5);
    const Eigen::MatrixXcd p =
        Eigen::MatrixXcd::Identity(n, n) - nb.basis * nb.basis.adjoint();
    CHECK((p - p.adjoint()).norm() < 1e-12 * n);
    CHECK((p * p - p).norm() < 1e-12 * n);
}

TEST_CASE("zf_precoder: orthogonal projected channels reduce to matched filtering") {
    const int n = 8;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, 2);
    h(2, 0) = std::complex<double>(2.0, 1.0);
    h(5, 1) = std::complex<double>(0.0, -3.0);
    NullBasis none;
    none.basis = Eigen::MatrixXcd::Zero(n, 0);
    const auto w = zf_precoder(h, none, 100.0);
    for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXcd expected = h.col(k) / h.col(k).norm();
        // Parallel up to phase: |<w, h_hat>| == 1.
        CHECK(std::abs(w.matrix.col(k).dot(expected)) == Catch::Approx(1.0).margin(1e-12));
        CHECK(w.matrix.col(k).norm() == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK(w.per_ut_power_mw == Catch::Approx(50.0));
    CHECK(w.total_power_mw == Catch::Approx(100.0));
}

TEST_CASE("zf_precoder: cross terms vanish on random full-rank instances") {
    RngStream rng{48};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 16, nu = 4, nn = 4;
        const Eigen::MatrixXcd dev = test_util::random_channel_matrix(n, nn, rng);
        const auto nb = null_basis(true_covariance_cols(dev, Eigen::VectorXd::Ones(nn)), nn);
        const Eigen::MatrixXcd h = test_util::random_channel_matrix(n, nu, rng);
        const auto w = zf_precoder(h, nb, 200.0);
        const Eigen::MatrixXcd ht = project_complement(nb, h);
        const Eigen::MatrixXcd cross = ht.adjoint() * w.matrix;
        for (int j = 0; j < nu; ++j)
            for (int k = 0; k < nu; ++k)
                if (j != k)
                    CHECK(std::abs(cross(j, k)) <= 1e-9 * ht.col(j).norm());
    }
}

TEST_CASE("zf_precoder: WLAN channels inside the nulled subspace stay dark") {
    RngStream rng{49};
    const int n = 8, k_dev = 3, nu = 4;
    const Eigen::MatrixXcd dev = test_util::random_channel_matrix(n, k_dev, rng);
    Eigen::VectorXd powers(k_dev);
    powers << 1.0, 2.5, 0.3;
    const auto nb = null_basis(true_covariance_cols(dev, powers), k_dev);
    const Eigen::MatrixXcd h = test_util::random_channel_matrix(n, nu, rng);
    const auto w = zf_precoder(h, nb, 100.0);
    for (int d = 0; d < k_dev; ++d) {
        // Brute-force inner products, independent of Eigen expressions.
        double leak = 0.0;
        for (int c = 0; c < nu; ++c) {
            std::complex<double> dot{0.0, 0.0};
            for (int i = 0; i < n; ++i)
                dot += std::conj(dev(i, d)) * w.matrix(i, c);
            leak += std::norm(dot);
        }
        CHECK(leak / dev.col(d).squaredNorm() < 1e-20);
    }
}

TEST_CASE("zf_precoder: rank-deficient projected channels raise the scheduling error") {
    RngStream rng{50};
    const int n = 8;
    Eigen::MatrixXcd h(n, 2);
    h.col(0) = test_util::random_channel(n, rng);
    h.col(1) = h.col(0) * std::complex<double>(0.5, 0.5); // colinear
    NullBasis none;
    none.basis = Eigen::MatrixXcd::Zero(n, 0);
    CHECK_THROWS_AS(zf_precoder(h, none, 10.0), RankDeficientChannel);

    // Too many users for the remaining degrees of freedom.
    const Eigen::MatrixXcd dev = test_util::random_channel_matrix(n, 6, rng);
    const auto nb = null_basis(true_covariance_cols(dev, Eigen::VectorXd::Ones(6)), 6);
    const Eigen::MatrixXcd h3 = test_util::random_channel_matrix(n, 3, rng);
    CHECK_THROWS_AS(zf_precoder(h3, nb, 10.0), std::invalid_argument);
}

TEST_CASE("zf_precoder: common phase rotation leaves powers unchanged") {
    RngStream rng{51};
    const int n = 12, nu = 3, nn = 2;
    const Eigen::MatrixXcd dev = test_util::random_channel_matrix(n, nn, rng);
    const auto nb = null_basis(true_covariance_cols(dev, Eigen::VectorXd::Ones(nn)), nn);
    const Eigen::MatrixXcd h = test_util::random_channel_matrix(n, nu, rng);
    const std::complex<double> phase = std::polar(1.0, 1.234);

    const auto w1 = zf_precoder(h, nb, 60.0);
    const auto w2 = zf_precoder((phase * h).eval(), nb, 60.0);
    for (int k = 0; k < nu; ++k) {
        const double s1 = std::norm(h.col(k).dot(w1.matrix.col(k)));
        const double s2 = std::norm((phase * h.col(k)).eval().dot(w2.matrix.col(k)));
        CHECK(s1 == Catch::Approx(s2).epsilon(1e-10));
    }
    for (int d = 0; d < nn; ++d) {
        const double l1 = (dev.col(d).adjoint() * w1.matrix).squaredNorm();
        const double l2 = (dev.col(d).adjoint() * w2.matrix).squaredNorm();
        CHECK(l1 == Catch::Approx(l2).margin(1e-25));
    }
}

TEST_CASE("null depth: 140 dB below the matched-filter reference") {
    RngStream rng{52};
    for (int n : {8, 16}) {
        const int k_dev = 3, nu = 4;
        const Eigen::MatrixXcd dev = test_util::random_channel_matrix(n, k_dev, rng);
        const auto nb = null_basis(true_covariance_cols(dev, Eigen::VectorXd::Ones(k_dev)), k_dev);
        const Eigen::MatrixXcd h = test_util::random_channel_matrix(n, nu, rng);
        const double total = 1000.0;
        const auto zf = zf_precoder(h, nb, total);
        const auto mf = test_util::matched_filter_reference(h, total);
        for (int d = 0; d < k_dev; ++d) {
            const double nulled = test_util::interference_mw_bruteforce(dev.col(d), zf);
            const double reference = test_util::interference_mw_bruteforce(dev.col(d), mf);
            CHECK(nulled <= reference * 1e-14);
        }
    }
}

TEST_CASE("regulatory_power: frozen values, identity, boundary, errors") {
    CHECK(regulatory_power_dbm(64, 42, 8) == Catch::Approx(25.6067).margin(0.01));
    CHECK(regulatory_power_dbm(16, 6, 8) == Catch::Approx(29.0309).margin(0.01));
    CHECK(regulatory_power_dbm(16, 8, 8) == Catch::Approx(30.0).margin(1e-12));
    CHECK_THROWS_AS(regulatory_power_dbm(16, 10, 8), std::invalid_argument);
    CHECK_THROWS_AS(regulatory_power_dbm(16, 0, 0), std::invalid_argument);

    // Per-beam EIRP identity: per-stream power plus array gain is 30 dBm.
    for (int na : {8, 16, 32, 64, 128})
        for (int nn = 0; nn < na; nn += 3)
            for (int nu : {1, 2, 4, 8}) {
                if (na - nn < nu)
                    continue;
                const double eirp = per_stream_power_dbm(na, nn, nu) +
                                    10.0 * std::log10(static_cast<double>(na - nn));
                CHECK(eirp == Catch::Approx(30.0).margin(1e-9));
            }
}
