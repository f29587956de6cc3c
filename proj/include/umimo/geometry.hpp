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

#ifndef UMIMO_GEOMETRY_HPP
#define UMIMO_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "umimo/rng.hpp"

namespace umimo::geometry {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle in degrees to (-180, 180].
inline double wrap_angle_deg(double deg) {
    double a = std::fmod(deg, 360.0);
    if (a <= -180.0)
        a += 360.0;
    else if (a > 180.0)
        a -= 360.0;
    return a;
}

struct Sector {
    int site = 0;
    double azimuth_deg = 0.0; // boresight, CCW from +x
};

struct Hotspot {
    Vec2 center;
    Vec2 ap;
    std::vector<Vec2> stas;
    int channel = 0;
    int sector = 0; // sector whose wedge the center was drawn in
};

/// Wrapped-around hexagonal deployment. Distances and angles between any
/// two points must go through wrap_displacement()/wrap_distance(), which
/// pick the closest of the 7 lattice images.
struct Layout {
    std::vector<Vec2> sites;
    std::vector<Sector> sectors;
    std::vector<Vec2> wrap_offsets; // identity + 6 cluster translations
    double isd_m = 0.0;
    double hex_circumradius_m = 0.0; // site-centred hexagonal cell
    double bs_height_m = 0.0;
    double device_height_m = 0.0;
};

struct Deployment {
    Layout layout;
    std::vector<std::vector<Vec2>> ut_positions; // [sector][ut]
    std::vector<Hotspot> hotspots;
};

namespace detail {

// Cluster shift parameters (i,j) with N = i^2 + i*j + j^2.
inline void cluster_shift(int sites, int& i, int& j) {
    switch (sites) {
    case 1: i = 1; j = 0; break;
    case 7: i = 2; j = 1; break;
    case 19: i = 3; j = 2; break;
    default: throw std::invalid_argument("site count must be 1, 7 or 19 (hex rings 0..2)");
    }
}

inline int hex_ring(int q, int r) { return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2; }

} // namespace detail

inline Layout build_layout(int sites, double isd_m, double bs_height_m, double device_height_m) {
    if (isd_m <= 0.0)
        throw std::invalid_argument("inter-site distance must be positive");
    int ci = 0, cj = 0;
    detail::cluster_shift(sites, ci, cj);

    Layout lay;
    lay.isd_m = isd_m;
    lay.hex_circumradius_m = isd_m / std::sqrt(3.0);
    lay.bs_height_m = bs_height_m;
    lay.device_height_m = device_height_m;

    const Vec2 a1{isd_m, 0.0};
    const Vec2 a2{isd_m * 0.5, isd_m * std::sqrt(3.0) * 0.5};

    const int max_ring = (sites == 1) ? 0 : (sites == 7 ? 1 : 2);
    for (int q = -max_ring; q <= max_ring; ++q)
        for (int r = -max_ring; r <= max_ring; ++r)
            if (detail::hex_ring(q, r) <= max_ring)
                lay.sites.push_back(a1 * q + a2 * r);

    for (int s = 0; s < static_cast<int>(lay.sites.size()); ++s)
        for (double az : {30.0, 150.0, 270.0})
            lay.sectors.push_back({s, az});

    // The N-cell cluster tiles the plane under t = ci*a1 + cj*a2 and its
    // 60-degree rotations.
    const Vec2 t{ci * a1.x + cj * a2.x, ci * a1.y + cj * a2.y};
    lay.wrap_offsets.push_back({0.0, 0.0});
    for (int k = 0; k < 6; ++k) {
        const double ang = deg_to_rad(60.0 * k);
        lay.wrap_offsets.push_back({t.x * std::cos(ang) - t.y * std::sin(ang),
                                    t.x * std::sin(ang) + t.y * std::cos(ang)});
    }
    return lay;
}

/// Displacement from `from` to the nearest wrap image of `to`.
inline Vec2 wrap_displacement(const Vec2& from, const Vec2& to, const Layout& lay) {
    Vec2 best = to - from;
    double best_sq = best.x * best.x + best.y * best.y;
    for (std::size_t k = 1; k < lay.wrap_offsets.size(); ++k) {
        const Vec2 d = to + lay.wrap_offsets[k] - from;
        const double sq = d.x * d.x + d.y * d.y;
        if (sq < best_sq) {
            best_sq = sq;
            best = d;
        }
    }
    return best;
}

inline double wrap_distance(const Vec2& a, const Vec2& b, const Layout& lay) {
    return wrap_displacement(a, b, lay).norm();
}

/// True if p lies in the hexagonal cell centred at `c` (flat sides facing
/// the six lattice neighbours).
inline bool in_hex_cell(const Vec2& p, const Vec2& c, double isd_m) {
    const double apothem = isd_m * 0.5 + 1e-9;
    const Vec2 d = p - c;
    for (double ang : {0.0, 60.0, 120.0}) {
        const double ux = std::cos(deg_to_rad(ang));
        const double uy = std::sin(deg_to_rad(ang));
        if (std::abs(d.x * ux + d.y * uy) > apothem)
            return false;
    }
    return true;
}

namespace detail {

inline Vec2 hex_vertex(const Vec2& c, double circumradius, double angle_deg) {
    return {c.x + circumradius * std::cos(deg_to_rad(angle_deg)),
            c.y + circumradius * std::sin(deg_to_rad(angle_deg))};
}

inline Vec2 sample_triangle(const Vec2& a, const Vec2& b, const Vec2& c, RngStream& rng) {
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    return a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2);
}

} // namespace detail

/// Uniform point in a sector's wedge: the two equilateral triangles of the
/// site's hexagon that span (azimuth - 60, azimuth + 60).
inline Vec2 sample_in_sector(const Layout& lay, int sector_idx, RngStream& rng) {
    const Sector& sec = lay.sectors.at(static_cast<std::size_t>(sector_idx));
    const Vec2& c = lay.sites[static_cast<std::size_t>(sec.site)];
    const double R = lay.hex_circumradius_m;
    const Vec2 v0 = detail::hex_vertex(c, R, sec.azimuth_deg - 60.0);
    const Vec2 v1 = detail::hex_vertex(c, R, sec.azimuth_deg);
    const Vec2 v2 = detail::hex_vertex(c, R, sec.azimuth_deg + 60.0);
    return rng.next_u64() & 1 ? detail::sample_triangle(c, v1, v2, rng)
                              : detail::sample_triangle(c, v0, v1, rng);
}

inline std::vector<std::vector<Vec2>> drop_users(const Layout& lay, int uts_per_sector, int n_u,
                                                 RngStream& rng) {
    if (uts_per_sector < n_u)
        throw std::invalid_argument("uts_per_sector smaller than the number of served UTs");
    std::vector<std::vector<Vec2>> out(lay.sectors.size());
    for (std::size_t s = 0; s < lay.sectors.size(); ++s) {
        out[s].reserve(static_cast<std::size_t>(uts_per_sector));
        for (int u = 0; u < uts_per_sector; ++u)
            out[s].push_back(sample_in_sector(lay, static_cast<int>(s), rng));
    }
    return out;
}

struct HotspotParams {
    double radius_m = 10.0;
    int stas_per_hotspot = 8;
    int num_channels = 4;
    bool poisson_counts = false;
};

inline std::vector<Hotspot> drop_hotspots(const Layout& lay, double density_per_sector,
                                          const HotspotParams& hp, RngStream& rng) {
    if (density_per_sector < 0.0)
        throw std::invalid_argument("hotspot density must be non-negative");
    std::vector<Hotspot> out;
    for (std::size_t s = 0; s < lay.sectors.size(); ++s) {
        std::uint64_t count;
        if (hp.poisson_counts) {
            count = rng.poisson(density_per_sector);
        } else {
            // Deterministic count when the density is an integer; otherwise
            // floor plus a Bernoulli trial on the fractional part so the
            // average still matches.
            const double fl = std::floor(density_per_sector);
            double frac = density_per_sector - fl;
            count = static_cast<std::uint64_t>(fl);
            if (frac > 1e-12 && rng.bernoulli(frac))
                ++count;
        }
        for (std::uint64_t h = 0; h < count; ++h) {
            Hotspot hs;
            hs.sector = static_cast<int>(s);
            hs.center = sample_in_sector(lay, static_cast<int>(s), rng);
            hs.ap = hs.center;
            hs.stas.reserve(static_cast<std::size_t>(hp.stas_per_hotspot));
            for (int k = 0; k < hp.stas_per_hotspot; ++k) {
                const double r = hp.radius_m * std::sqrt(rng.uniform());
                const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
                hs.stas.push_back({hs.center.x + r * std::cos(th), hs.center.y + r * std::sin(th)});
            }
            hs.channel = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(hp.num_channels)));
            out.push_back(std::move(hs));
        }
    }
    return out;
}

} // namespace umimo::geometry

#endif // UMIMO_GEOMETRY_HPP
