// SPDX-License-Identifier: Apache-2.0
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

#include "sectormimo/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <tuple>

namespace sectormimo {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

// Flat-topped axial coordinates: x = 3/2 q R, y = sqrt(3) (r + q/2) R.
Point axial_to_point(int q, int r, double R)
{
    return {1.5 * q * R, kSqrt3 * (r + 0.5 * q) * R};
}

int hex_distance(int q, int r)
{
    return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2;
}

Point rotate(Point p, double angle)
{
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

constexpr int kImageSpan = 1;

}  // namespace

std::optional<int> rings_for_cluster(int L)
{
    for (int n = 0; 3 * n * n + 3 * n + 1 <= L; ++n)
        if (3 * n * n + 3 * n + 1 == L)
            return n;
    return std::nullopt;
}

Point CellLayout::nearest_image(Point p, Point ref) const
{
    if (wrap_translations.empty())
        return p;
    const Point t1 = wrap_translations[0];
    const Point t2 = wrap_translations[1];
    // Round the offset to the nearest lattice point first so inputs far
    // outside the cluster still land in the search window.
    const Point d = ref - p;
    const double det = t1.x * t2.y - t1.y * t2.x;
    const int i0 = static_cast<int>(std::lround((d.x * t2.y - d.y * t2.x) / det));
    const int j0 = static_cast<int>(std::lround((t1.x * d.y - t1.y * d.x) / det));
    Point best = p;
    double best_d = norm(p - ref);
    for (int i = i0 - kImageSpan; i <= i0 + kImageSpan; ++i) {
        for (int j = j0 - kImageSpan; j <= j0 + kImageSpan; ++j) {
            if (i == 0 && j == 0)
                continue;
            const Point img = p + static_cast<double>(i) * t1 + static_cast<double>(j) * t2;
            const double d = norm(img - ref);
            if (d < best_d) {
                best_d = d;
                best = img;
            }
        }
    }
    return best;
}

std::vector<int> CellLayout::neighbors(int cell) const
{
    std::vector<int> out;
    const double spacing = kSqrt3 * radius;
    for (int c = 0; c < n_cells(); ++c) {
        if (c == cell)
            continue;
        const double d = wrapped_distance(cell_centers[static_cast<size_t>(c)],
                                          cell_centers[static_cast<size_t>(cell)], *this);
        if (d <= spacing * (1.0 + 1e-9))
            out.push_back(c);
    }
    return out;
}

CellLayout build_layout(const NetworkConfig &config)
{
    config.validate();
    const auto rings = rings_for_cluster(config.L);
    if (!rings)
        throw UnsupportedClusterSize("no hexagonal wrap for L = " + std::to_string(config.L) +
                                     " (need L = 3n^2 + 3n + 1)");
    const int n = *rings;
    const double R = config.R;

    CellLayout layout;
    layout.mode = config.mode;
    layout.radius = R;
    layout.rings = n;

    // Cells ordered by ring, then counter-clockwise from the +x axis.
    std::vector<std::tuple<int, double, int, int>> cells;
    for (int q = -n; q <= n; ++q)
        for (int r = -n; r <= n; ++r)
            if (hex_distance(q, r) <= n) {
                const Point c = axial_to_point(q, r, R);
                double ang = std::atan2(c.y, c.x);
                if (ang < 0.0)
                    ang += 2.0 * std::numbers::pi;
                cells.emplace_back(hex_distance(q, r), ang, q, r);
            }
    std::sort(cells.begin(), cells.end());
    for (const auto &[ring, ang, q, r] : cells)
        layout.cell_centers.push_back(axial_to_point(q, r, R));

    // Cluster translation (2n+1, -n) in axial coordinates and its rotations.
    if (n > 0) {
        const Point t = axial_to_point(2 * n + 1, -n, R);
        for (int m = 0; m < 6; ++m)
            layout.wrap_translations.push_back(rotate(t, m * std::numbers::pi / 3.0));
    }

    const int apc = config.arrays_per_cell();
    for (int j = 0; j < layout.n_cells(); ++j) {
        const Point center = layout.cell_centers[static_cast<size_t>(j)];
        for (int i = 0; i < apc; ++i) {
            ArrayDescriptor a;
            a.array_id = j * apc + i;
            a.serving_cell = j;
            if (config.mode == AntennaMode::directional) {
                const double corner = 2.0 * i * std::numbers::pi / 3.0;
                a.position = center + R * Point{std::cos(corner), std::sin(corner)};
                a.boresight = Point{-std::cos(corner), -std::sin(corner)};
                a.elements = config.M;
                a.budget = config.rho_f / 3.0;
            } else {
                a.position = center;
                a.elements = 3.0 * config.M;
                a.budget = config.rho_f;
            }
            layout.arrays.push_back(a);
        }
    }
    return layout;
}

double wrapped_distance(Point p, Point q, const CellLayout &layout)
{
    return norm(layout.nearest_image(q, p) - p);
}

double angle_to_boresight(const ArrayDescriptor &array, Point p, const CellLayout &layout)
{
    if (!array.boresight)
        throw std::invalid_argument("angle_to_boresight: omni array has no boresight");
    const Point d = layout.nearest_image(p, array.position) - array.position;
    const double len = norm(d);
    if (len < 1e-12)
        throw DegeneratePosition("user coincides with array position");
    const double c = std::clamp(dot(d, *array.boresight) / len, -1.0, 1.0);
    return std::acos(c);
}

bool inside_hexagon(Point p, Point center, double radius)
{
    const double x = std::abs(p.x - center.x);
    const double y = std::abs(p.y - center.y);
    const double h = 0.5 * kSqrt3 * radius;
    return y <= h && kSqrt3 * x + y <= kSqrt3 * radius;
}

UserDrop drop_users(const NetworkConfig &config, const CellLayout &layout, std::mt19937_64 &rng)
{
    constexpr int kMaxAttempts = 100000;
    const double R = layout.radius;
    const double h = 0.5 * kSqrt3 * R;
    std::uniform_real_distribution<double> ux(-R, R);
    std::uniform_real_distribution<double> uy(-h, h);

    // Distinct base-station sites; co-located arrays share a position.
    std::vector<Point> sites;
    for (const auto &a : layout.arrays) {
        const bool seen = std::any_of(sites.begin(), sites.end(), [&](Point s) {
            return wrapped_distance(s, a.position, layout) < 1e-9;
        });
        if (!seen)
            sites.push_back(a.position);
    }

    UserDrop drop;
    drop.K = config.K;
    drop.positions.reserve(static_cast<size_t>(layout.n_cells() * config.K));
    for (int j = 0; j < layout.n_cells(); ++j) {
        const Point center = layout.cell_centers[static_cast<size_t>(j)];
        for (int k = 0; k < config.K; ++k) {
            int attempts = 0;
            for (;;) {
                if (++attempts > kMaxAttempts)
                    throw ExclusionTooLarge("could not place a user outside the exclusion disks");
                const Point p = center + Point{ux(rng), uy(rng)};
                if (!inside_hexagon(p, center, R))
                    continue;
                const bool clear = std::all_of(sites.begin(), sites.end(), [&](Point s) {
                    return wrapped_distance(p, s, layout) >= config.r_excl;
                });
                if (clear) {
                    drop.positions.push_back(p);
                    break;
                }
            }
        }
    }
    return drop;
}

}  // namespace sectormimo
