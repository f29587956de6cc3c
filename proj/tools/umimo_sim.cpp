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
// Command-line front end: `run` executes one campaign, `sweep` one campaign
// per parameter value, `selftest` the module invariant suites. Exit codes:
// 0 success, 1 malformed input, 2 violated invariant or failed selftest,
// 3 I/O failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "umimo/umimo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file_or_throw(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out.flush())
        throw IoError("write failed: " + path.string());
}

/// Results and summary land first; the manifest is then written to a
/// temporary name and renamed into place so readers never see a torn file.
void write_manifest_atomically(const fs::path& path, const json& manifest) {
    const fs::path tmp = path.string() + ".tmp";
    write_file_or_throw(tmp, manifest.dump(2) + "\n");
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move manifest into place: " + ec.message());
}

fs::path prepare_out_dir(const std::string& out_dir) {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory: " + dir.string());
    return dir;
}

umimo::ScenarioConfig load_config(const std::string& config_path,
                                  const std::vector<std::string>& overrides) {
    umimo::ScenarioConfig cfg = umimo::ScenarioConfig::parse_file(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw umimo::ConfigParseError("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

json manifest_base(const umimo::ScenarioConfig& cfg, const std::string& command, double seconds) {
    json m;
    m["tool"] = "umimo_sim";
    m["version"] = umimo::kVersion;
    m["command"] = command;
    m["config_hash"] = cfg.hash_hex();
    m["master_seed"] = cfg.master_seed;
    m["config"] = cfg.serialize();
    m["duration_seconds"] = seconds;
    return m;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, std::uint64_t* seed_opt, int* drops_opt,
            int workers) {
    umimo::ScenarioConfig cfg = load_config(config_path, overrides);
    if (seed_opt)
        cfg.master_seed = *seed_opt;
    if (drops_opt)
        cfg.drops = *drops_opt;
    cfg.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const auto report = umimo::engine::run_campaign(cfg, workers);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = prepare_out_dir(out_dir);
    const fs::path results = dir / "results.csv";
    const fs::path summary = dir / "summary.txt";
    const fs::path manifest = dir / "manifest.json";

    write_file_or_throw(results, umimo::report::csv_header() + "\n" +
                                     umimo::report::csv_row(cfg, report) + "\n");
    write_file_or_throw(summary, umimo::report::text_summary(cfg, report));

    json m = manifest_base(cfg, "run", seconds);
    m["outputs"] = {results.string(), summary.string(), manifest.string()};
    write_manifest_atomically(manifest, m);

    std::cout << umimo::report::text_summary(cfg, report);
    std::cout << "results : " << results.string() << "\n";
    return 0;
}

std::vector<double> parse_values_csv(const std::string& values) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= values.size()) {
        const auto comma = values.find(',', pos);
        const std::string tok =
            values.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty())
            throw umimo::ConfigParseError("--values must be a non-empty comma-separated list");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw umimo::ConfigParseError("invalid sweep value: " + tok);
        }
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

int cmd_sweep(const std::string& config_path, const std::string& param, const std::string& values,
              const std::string& out_dir) {
    umimo::ScenarioConfig base = umimo::ScenarioConfig::parse_file(config_path);
    const auto axis = umimo::engine::sweep_axis_from_string(param);
    const auto vals = parse_values_csv(values);

    const auto t0 = std::chrono::steady_clock::now();
    const auto points = umimo::engine::sweep(base, axis, vals);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = prepare_out_dir(out_dir);
    const fs::path results = dir / "results.csv";
    const fs::path summary = dir / "summary.txt";
    const fs::path manifest = dir / "manifest.json";

    std::string csv = umimo::report::csv_header() + "\n";
    std::string text;
    for (const auto& p : points) {
        csv += umimo::report::csv_row(p.config, p.report) + "\n";
        text += umimo::report::text_summary(p.config, p.report) + "\n";
    }
    write_file_or_throw(results, csv);
    write_file_or_throw(summary, text);

    json m = manifest_base(base, "sweep", seconds);
    m["sweep_param"] = param;
    m["sweep_values"] = vals;
    m["outputs"] = {results.string(), summary.string(), manifest.string()};
    write_manifest_atomically(manifest, m);

    std::cout << csv;
    std::cout << "results : " << results.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// selftest: fast invariant suites over all modules at small dimensions.

struct SelftestContext {
    bool inject_projector_error = false;
    int failures = 0;

    void check(const char* suite, bool ok, const std::string& detail = {}) {
        if (ok) {
            std::cout << "PASS " << suite << "\n";
        } else {
            ++failures;
            std::cout << "FAIL " << suite << (detail.empty() ? "" : ": " + detail) << "\n";
        }
    }
};

void selftest_projector(SelftestContext& ctx) {
    umimo::RngStream rng{42};
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        const int n = 8, k = 3;
        std::vector<Eigen::VectorXcd> chans;
        std::vector<double> powers;
        for (int d = 0; d < k; ++d) {
            Eigen::VectorXcd g(n);
            for (int i = 0; i < n; ++i)
                g(i) = rng.cnormal();
            chans.push_back(g);
            powers.push_back(1.0 + rng.uniform());
        }
        const auto cov = umimo::spatial::true_covariance(chans, powers, n);
        auto basis = umimo::spatial::null_basis(cov, k);
        if (ctx.inject_projector_error)
            basis.basis(0, 0) += 0.001; // test hook: break orthonormality
        const Eigen::MatrixXcd u = basis.basis;
        const Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(n, n) - u * u.adjoint();
        ok = ok && (p - p.adjoint()).norm() < 1e-10;
        ok = ok && (p * p - p).norm() < 1e-10;
        ok = ok && (u.adjoint() * u - Eigen::MatrixXcd::Identity(k, k)).norm() < 1e-10;
    }
    ctx.check("projector-algebra", ok);
}

void selftest_zf(SelftestContext& ctx) {
    umimo::RngStream rng{7};
    bool ok = true;
    for (int trial = 0; trial < 20 && ok; ++trial) {
        const int n = 16, k = 4, nu = 4;
        std::vector<Eigen::VectorXcd> dev;
        std::vector<double> powers;
        for (int d = 0; d < k; ++d) {
            Eigen::VectorXcd g(n);
            for (int i = 0; i < n; ++i)
                g(i) = rng.cnormal();
            dev.push_back(g);
            powers.push_back(1.0);
        }
        const auto cov = umimo::spatial::true_covariance(dev, powers, n);
        const auto basis = umimo::spatial::null_basis(cov, k);
        Eigen::MatrixXcd h(n, nu);
        for (int u = 0; u < nu; ++u)
            for (int i = 0; i < n; ++i)
                h(i, u) = rng.cnormal();
        const auto w = umimo::spatial::zf_precoder(h, basis, 1000.0);
        const Eigen::MatrixXcd ht = umimo::spatial::project_complement(basis, h);
        const Eigen::MatrixXcd cross = ht.adjoint() * w.matrix;
        for (int j = 0; j < nu && ok; ++j)
            for (int c = 0; c < nu && ok; ++c)
                if (j != c)
                    ok = std::abs(cross(j, c)) <= 1e-9 * ht.col(j).norm();
        for (const auto& g : dev)
            ok = ok && (g.adjoint() * w.matrix).squaredNorm() / g.squaredNorm() < 1e-20;
    }
    ctx.check("zf-null-containment", ok);
}

void selftest_power(SelftestContext& ctx) {
    using umimo::spatial::per_stream_power_dbm;
    using umimo::spatial::regulatory_power_dbm;
    bool ok = std::abs(regulatory_power_dbm(64, 42, 8) - 25.6067) < 0.01;
    ok = ok && std::abs(regulatory_power_dbm(16, 6, 8) - 29.0309) < 0.01;
    for (int na : {8, 16, 64, 128})
        for (int nn : {0, 2, 6})
            for (int nu : {1, 2, 8}) {
                if (na - nn < nu)
                    continue;
                const double eirp = per_stream_power_dbm(na, nn, nu) +
                                    10.0 * std::log10(static_cast<double>(na - nn));
                ok = ok && std::abs(eirp - 30.0) < 1e-9;
            }
    ctx.check("regulatory-power", ok);
}

void selftest_geometry(SelftestContext& ctx) {
    const auto lay = umimo::geometry::build_layout(19, 150.0, 10.0, 1.5);
    bool ok = lay.sites.size() == 19 && lay.sectors.size() == 57;
    for (std::size_t a = 0; a < lay.sites.size() && ok; ++a) {
        std::vector<double> dists;
        for (std::size_t b = 0; b < lay.sites.size(); ++b)
            if (a != b)
                dists.push_back(umimo::geometry::wrap_distance(lay.sites[a], lay.sites[b], lay));
        std::sort(dists.begin(), dists.end());
        for (int k = 0; k < 6; ++k)
            ok = ok && std::abs(dists[static_cast<std::size_t>(k)] - 150.0) < 1e-6;
    }
    umimo::RngStream rng{3};
    for (int i = 0; i < 200 && ok; ++i) {
        const umimo::geometry::Vec2 a{rng.uniform(-300, 300), rng.uniform(-300, 300)};
        const umimo::geometry::Vec2 b{rng.uniform(-300, 300), rng.uniform(-300, 300)};
        ok = std::abs(umimo::geometry::wrap_distance(a, b, lay) -
                      umimo::geometry::wrap_distance(b, a, lay)) < 1e-9;
    }
    ctx.check("wrap-geometry", ok);
}

void selftest_percentile(SelftestContext& ctx) {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i)
        v.push_back(i);
    bool ok = umimo::metrics::percentile(v, 95.0) == 95.0;
    ok = ok && umimo::metrics::percentile(std::vector<double>{1, 2, 3, 4}, 50.0) == 2.0;
    ok = ok && umimo::metrics::percentile(std::vector<double>{7.5}, 99.0) == 7.5;
    ctx.check("percentile", ok);
}

void selftest_determinism(SelftestContext& ctx) {
    umimo::ScenarioConfig cfg;
    cfg.sites = 1;
    cfg.n_a = 8;
    cfg.n_u = 2;
    cfg.uts_per_sector = 4;
    cfg.hotspots_per_sector = 1;
    cfg.num_channels = 1;
    cfg.drops = 4;
    cfg.intervals_per_drop = 2;
    cfg.master_seed = 99;
    const auto r1 = umimo::engine::run_campaign(cfg, 1);
    const auto r2 = umimo::engine::run_campaign(cfg, 2);
    ctx.check("campaign-determinism",
              umimo::report::csv_row(cfg, r1) == umimo::report::csv_row(cfg, r2));
}

int cmd_selftest(bool inject_projector_error) {
    SelftestContext ctx;
    ctx.inject_projector_error = inject_projector_error;
    selftest_projector(ctx);
    selftest_zf(ctx);
    selftest_power(ctx);
    selftest_geometry(ctx);
    selftest_percentile(ctx);
    selftest_determinism(ctx);
    if (ctx.failures > 0) {
        std::cout << ctx.failures << " suite(s) failed\n";
        return 2;
    }
    std::cout << "all suites passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"umimo_sim - massive-MIMO / WLAN unlicensed coexistence simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "umimo_out", param, values;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    int drops = 0, workers = 0;
    bool inject_projector_error = false;

    auto* run = app.add_subcommand("run", "run one campaign from a config file");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory");
    auto* seed_opt = run->add_option("--seed", seed, "override master_seed");
    auto* drops_opt = run->add_option("--drops", drops, "override drop count");
    run->add_option("--workers", workers, "worker thread hint (results identical for any value)");
    run->add_option("--set", overrides, "override config entries, key=value");

    auto* sweep = app.add_subcommand("sweep", "run one campaign per parameter value");
    sweep->add_option("--config", config_path, "scenario config file")->required();
    sweep->add_option("--param", param, "sweep axis: na, nn or hotspots")->required();
    sweep->add_option("--values", values, "comma-separated axis values")->required();
    sweep->add_option("--out", out_dir, "output directory");

    auto* selftest = app.add_subcommand("selftest", "run the module invariant suites");
    selftest->add_flag("--inject-projector-error", inject_projector_error,
                       "test hook: perturb the projector to prove failure detection");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed())
            return cmd_run(config_path, out_dir, overrides, seed_opt->count() ? &seed : nullptr,
                           drops_opt->count() ? &drops : nullptr, workers);
        if (sweep->parsed())
            return cmd_sweep(config_path, param, values, out_dir);
        if (selftest->parsed())
            return cmd_selftest(inject_projector_error);
    } catch (const umimo::ConfigParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const umimo::ConfigInvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
