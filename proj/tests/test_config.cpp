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

#include "umimo/config.hpp"

using namespace umimo;

TEST_CASE("defaults validate and resolve the null policy") {
    ScenarioConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.resolved_n_n() == 42); // round(0.75 * (64 - 8))
    cfg.n_a = 16;
    CHECK(cfg.resolved_n_n() == 6);
    cfg.n_a = 32;
    CHECK(cfg.resolved_n_n() == 18);
    cfg.n_a = 128;
    CHECK(cfg.resolved_n_n() == 90);
}

TEST_CASE("round trip: serialize(parse(text)) is canonical and stable") {
    ScenarioConfig cfg;
    cfg.n_a = 32;
    cfg.null_policy = NullPolicy::kFixed;
    cfg.n_n_fixed = 12;
    cfg.hotspots_per_sector = 1.5;
    cfg.covariance_mode = CovarianceMode::kSamples;
    cfg.covariance_symbols = 400;
    cfg.master_seed = 987654321;

    const std::string canonical = cfg.serialize();
    const ScenarioConfig reparsed = ScenarioConfig::parse(canonical);
    CHECK(reparsed.serialize() == canonical);
    CHECK(reparsed.hash_hex() == cfg.hash_hex());
}

TEST_CASE("parse: comments, blank lines, spacing") {
    const ScenarioConfig cfg = ScenarioConfig::parse("# scenario\n"
                                                     "\n"
                                                     "n_a = 16   # antennas\n"
                                                     "  n_u=4\n"
                                                     "gamma_bs_dbm = -70.5\n");
    CHECK(cfg.n_a == 16);
    CHECK(cfg.n_u == 4);
    CHECK(cfg.gamma_bs_dbm == -70.5);
}

TEST_CASE("parse: unknown keys and malformed values fail fast") {
    CHECK_THROWS_AS(ScenarioConfig::parse("n_antennas = 64\n"), ConfigParseError);
    CHECK_THROWS_AS(ScenarioConfig::parse("n_a = many\n"), ConfigParseError);
    CHECK_THROWS_AS(ScenarioConfig::parse("n_a\n"), ConfigParseError);
    CHECK_THROWS_AS(ScenarioConfig::parse("covariance_mode = guess\n"), ConfigParseError);
    CHECK_THROWS_AS(ScenarioConfig::parse_file("/nonexistent/config"), ConfigParseError);
}

TEST_CASE("parse: null policy spellings") {
    CHECK(ScenarioConfig::parse("n_n = auto\n").null_policy == NullPolicy::kAuto);
    CHECK(ScenarioConfig::parse("n_n = adaptive\n").null_policy == NullPolicy::kAdaptive);
    const auto fixed = ScenarioConfig::parse("n_n = 24\n");
    CHECK(fixed.null_policy == NullPolicy::kFixed);
    CHECK(fixed.resolved_n_n() == 24);
}

TEST_CASE("validate: names the violated constraint") {
    ScenarioConfig cfg;
    cfg.null_policy = NullPolicy::kFixed;
    cfg.n_n_fixed = cfg.n_a; // no degrees of freedom left
    try {
        cfg.validate();
        FAIL("expected ConfigInvariantError");
    } catch (const ConfigInvariantError& e) {
        CHECK(std::string(e.what()).find("degrees of freedom") != std::string::npos);
    }

    ScenarioConfig bad_sites;
    bad_sites.sites = 4;
    CHECK_THROWS_AS(bad_sites.validate(), ConfigInvariantError);

    ScenarioConfig bad_hidden;
    bad_hidden.hidden_fraction = 1.5;
    CHECK_THROWS_AS(bad_hidden.validate(), ConfigInvariantError);

    ScenarioConfig few_uts;
    few_uts.uts_per_sector = 4;
    CHECK_THROWS_AS(few_uts.validate(), ConfigInvariantError);
}

TEST_CASE("hash: any field change moves it") {
    ScenarioConfig a;
    ScenarioConfig b;
    b.master_seed = 2;
    ScenarioConfig c;
    c.gamma_bs_dbm = -71.0;
    CHECK(a.hash_hex() != b.hash_hex());
    CHECK(a.hash_hex() != c.hash_hex());
    CHECK(a.hash_hex() == ScenarioConfig{}.hash_hex());
    CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("set: override mechanism used by the CLI") {
    ScenarioConfig cfg;
    cfg.set("n_a", "128");
    cfg.set("hotspots_per_sector", "4");
    cfg.set("elbt_include_noise", "true");
    CHECK(cfg.n_a == 128);
    CHECK(cfg.hotspots_per_sector == 4.0);
    CHECK(cfg.elbt_include_noise);
    CHECK_THROWS_AS(cfg.set("not_a_key", "1"), ConfigParseError);
}

TEST_CASE("path-loss model keys accept registry names only") {
    ScenarioConfig cfg;
    cfg.set("pathloss_bs", "umi");
    cfg.set("pathloss_d2d", "d2d");
    CHECK(cfg.pathloss_bs == "umi");
    CHECK(cfg.pathloss_d2d == "d2d");
    CHECK_THROWS_AS(cfg.set("pathloss_bs", "cost231"), ConfigParseError);
    const std::string canonical = cfg.serialize();
    CHECK(canonical.find("pathloss_bs = umi\n") != std::string::npos);
    CHECK(ScenarioConfig::parse(canonical).serialize() == canonical);
}
