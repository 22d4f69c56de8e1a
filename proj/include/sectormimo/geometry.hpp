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

#ifndef SECTORMIMO_GEOMETRY_HPP
#define SECTORMIMO_GEOMETRY_HPP

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "sectormimo/config.hpp"

namespace sectormimo {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

struct ArrayDescriptor {
    int array_id = 0;
    int serving_cell = 0;
    Point position{};
    std::optional<Point> boresight;  ///< unit vector; empty for omni arrays
    double elements = 0.0;           ///< M (directional) or 3M (omni)
    double budget = 0.0;             ///< watts
};

/// Flat-topped hexagonal cluster of L = 3n^2 + 3n + 1 cells wrapped onto a
/// torus. Directional arrays sit on corners 0, 2, 4 (at 0, 120 and 240 deg
/// from the cell center) and look back at the center.
struct CellLayout {
    AntennaMode mode = AntennaMode::directional;
    double radius = 1.0;
    int rings = 0;
    std::vector<Point> cell_centers;
    std::vector<Point> wrap_translations;  ///< six generators (+/-T1, +/-T2, +/-T3); empty for L=1
    std::vector<ArrayDescriptor> arrays;   ///< index a = cell * arrays_per_cell + i

    int n_cells() const { return static_cast<int>(cell_centers.size()); }
    int arrays_per_cell() const { return mode == AntennaMode::directional ? 3 : 1; }

    /// Image of p (over the wrap lattice) closest to ref.
    Point nearest_image(Point p, Point ref) const;

    /// Cells adjacent to `cell` under the wrap (excluding itself).
    std::vector<int> neighbors(int cell) const;
};

/// User positions, index u = cell * K + k.
struct UserDrop {
    int K = 0;
    std::vector<Point> positions;

    Point at(int k, int cell) const { return positions[static_cast<size_t>(cell * K + k)]; }
    int n_users() const { return static_cast<int>(positions.size()); }
};

/// Number of hexagonal rings n with 3n^2 + 3n + 1 == L, if any.
std::optional<int> rings_for_cluster(int L);

CellLayout build_layout(const NetworkConfig &config);

double wrapped_distance(Point p, Point q, const CellLayout &layout);

/// Angle in [0, pi] between the array boresight and the direction to the
/// nearest wrapped image of p.
double angle_to_boresight(const ArrayDescriptor &array, Point p, const CellLayout &layout);

bool inside_hexagon(Point p, Point center, double radius);

UserDrop drop_users(const NetworkConfig &config, const CellLayout &layout, std::mt19937_64 &rng);

}  // namespace sectormimo

#endif
