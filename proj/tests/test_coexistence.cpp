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
#include <vector>

#include "test_util.hpp"
#include "umimo/coexistence.hpp"

using namespace umimo;
using namespace umimo::coexistence;

TEST_CASE("measure_filtered_power: empty set reports the sentinel and grants") {
    spatial::NullBasis none;
    none.basis = Eigen::MatrixXcd::Zero(8, 0);
    const double m = measure_filtered_power_dbm(none, std::vector<ActiveTransmitter>{}, 8);
    CHECK(m == kBelowFloorDbm);
    CHECK(elbt_decision(m, -72.0));
}

TEST_CASE("measure_filtered_power: channel inside the nulled subspace is invisible") {
    RngStream rng{61};
    const int n = 8;
    const Eigen::VectorXcd g = test_util::random_channel(n, rng);
    const auto cov =
        spatial::true_covariance(std::vector<Eigen::VectorXcd>{g}, std::vector<double>{1.0}, n);
    const auto nb = spatial::null_basis(cov, 1);
    std::vector<ActiveTransmitter> active{{&g, 100.0}};
    CHECK(measure_filtered_power_dbm(nb, active, n) == kBelowFloorDbm);
}

TEST_CASE("measure_filtered_power: unfiltered value matches the direct formula") {
    // One device, ||g||^2 P / N_A = 1e-7 mW -> -70 dBm.
    const int n = 4;
    Eigen::VectorXcd g(n);
    const double amp = std::sqrt(1e-7); // ||g||^2 = 4e-7 with P = 1 mW
    g << amp, amp, amp, amp;
    spatial::NullBasis none;
    none.basis = Eigen::MatrixXcd::Zero(n, 0);
    std::vector<ActiveTransmitter> active{{&g, 1.0}};
    CHECK(measure_filtered_power_dbm(none, active, n) == Catch::Approx(-70.0).margin(1e-9));
}

TEST_CASE("elbt_decision: strict threshold comparison") {
    CHECK(elbt_decision(-81.0, -72.0));
    CHECK_FALSE(elbt_decision(-71.9, -72.0));
    CHECK_FALSE(elbt_decision(-72.0, -72.0)); // tie resolves to denied
}

TEST_CASE("wlan_cca: strict threshold comparison") {
    CHECK(wlan_cca(-63.0, -62.0));
    CHECK_FALSE(wlan_cca(-61.0, -62.0));
    CHECK_FALSE(wlan_cca(-62.0, -62.0));
}

TEST_CASE("adapt_nulls: patience, step, reset and clamp") {
    NullAdaptState st;
    st.current_n_nulls = 16;
    st.step = 4;
    st.patience = 3;
    st.max_n_nulls = 24;

    ElbtOutcome fail;
    fail.granted = false;
    ElbtOutcome ok;
    ok.granted = true;

    auto s = st;
    s = adapt_nulls(s, fail);
    s = adapt_nulls(s, fail);
    CHECK(s.current_n_nulls == 16);
    s = adapt_nulls(s, fail); // third consecutive failure triggers the step
    CHECK(s.current_n_nulls == 20);
    CHECK(s.consecutive_failures == 0);

    // Success after two failures only resets the counter.
    s = st;
    s = adapt_nulls(s, fail);
    s = adapt_nulls(s, fail);
    s = adapt_nulls(s, ok);
    CHECK(s.current_n_nulls == 16);
    CHECK(s.consecutive_failures == 0);

    // Saturation at the maximum.
    s = st;
    s.current_n_nulls = 24;
    for (int i = 0; i < 10; ++i)
        s = adapt_nulls(s, fail);
    CHECK(s.current_n_nulls == 24);
}

TEST_CASE("adapt_nulls: trajectory is non-decreasing and bounded") {
    RngStream rng{62};
    NullAdaptState s;
    s.current_n_nulls = 0;
    s.step = 4;
    s.patience = 3;
    s.max_n_nulls = 20;
    int prev = 0;
    for (int i = 0; i < 500; ++i) {
        ElbtOutcome o;
        o.granted = rng.bernoulli(0.3);
        s = adapt_nulls(s, o);
        CHECK(s.current_n_nulls >= prev);
        CHECK(s.current_n_nulls <= s.max_n_nulls);
        prev = s.current_n_nulls;
    }
}

TEST_CASE("monotone suppression under nested null bases") {
    RngStream rng{63};
    const int n = 16, n_dev = 6;
    const Eigen::MatrixXcd g = test_util::random_channel_matrix(n, n_dev, rng);
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n_dev, 2.0);
    const auto cov = spatial::true_covariance_cols(g, p);

    double prev = 1e9;
    for (int nn = 0; nn <= n; nn += 2) {
        const auto nb = spatial::null_basis(cov, nn);
        const double m = measure_filtered_power_dbm(nb, g, p);
        CHECK(m <= prev + 1e-9);
        prev = m;
    }
}

TEST_CASE("elbt with zero nulls equals the conventional LBT verdict") {
    RngStream rng{64};
    const int n = 8;
    const Eigen::MatrixXcd g = test_util::random_channel_matrix(n, 3, rng);
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 1e-4);
    spatial::NullBasis none;
    none.basis = Eigen::MatrixXcd::Zero(n, 0);

    // Conventional LBT: the unfiltered per-antenna aggregate power.
    double sum = 0.0;
    for (int d = 0; d < 3; ++d)
        sum += p(d) * g.col(d).squaredNorm();
    const double direct = mw_to_dbm(sum / n);
    const double filtered = measure_filtered_power_dbm(none, g, p);
    CHECK(filtered == Catch::Approx(direct).margin(1e-12));
    CHECK(elbt_decision(filtered, -72.0) == elbt_decision(direct, -72.0));
}
