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

#include "sectormimo/propagation.hpp"

#include <cmath>

namespace sectormimo {

double directivity_gain(double phi, const NetworkConfig &config)
{
    if (config.mode == AntennaMode::omni)
        return 1.0;
    // Wedge-edge users land on theta/2 up to rounding in acos.
    return phi <= 0.5 * config.theta_bw + 1e-12 ? config.G_Q : config.G_q;
}

double pathloss_beta(double d_km, double shadow_db, const NetworkConfig &config)
{
    if (!(d_km > 0.0))
        throw NonpositiveDistance("pathloss_beta: distance must be positive");
    const double db = config.pathloss.intercept_db -
                      config.pathloss.slope_db_per_decade * std::log10(d_km) + shadow_db;
    return std::pow(10.0, db / 10.0);
}

CouplingMatrix build_coupling(const CellLayout &layout, const UserDrop &drop,
                              const NetworkConfig &config, std::mt19937_64 &rng)
{
    const int U = drop.n_users();
    const int A = static_cast<int>(layout.arrays.size());
    if (U != layout.n_cells() * config.K || drop.K != config.K)
        throw DimensionMismatch("build_coupling: drop does not match layout and config");

    CouplingMatrix c;
    c.L = layout.n_cells();
    c.K = config.K;
    c.arrays_per_cell = layout.arrays_per_cell();
    c.gain = Grid<double>(U, A);
    c.beta = Grid<double>(U, A);
    for (const auto &a : layout.arrays) {
        c.serving.push_back(a.serving_cell);
        c.elements.push_back(a.elements);
        c.budget.push_back(a.budget);
    }

    std::normal_distribution<double> shadow(0.0, 1.0);
    for (int u = 0; u < U; ++u) {
        const Point p = drop.positions[static_cast<size_t>(u)];
        for (int a = 0; a < A; ++a) {
            const auto &arr = layout.arrays[static_cast<size_t>(a)];
            const double d = wrapped_distance(arr.position, p, layout);
            // Draw unconditionally so the stream layout does not depend on std.
            const double psi = config.shadow_std_db * shadow(rng);
            c.beta(u, a) = pathloss_beta(d, psi, config);
            c.gain(u, a) = arr.boresight ? directivity_gain(angle_to_boresight(arr, p, layout), config)
                                         : 1.0;
        }
    }
    return c;
}

SmallScaleBlock sample_small_scale(int n_users, int n_arrays, int M, std::mt19937_64 &rng)
{
    if (M < 1)
        throw std::invalid_argument("sample_small_scale: M must be >= 1");
    SmallScaleBlock b;
    b.n_users = n_users;
    b.n_arrays = n_arrays;
    b.M = M;
    b.h.resize(static_cast<size_t>(n_users) * n_arrays * M);
    std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
    for (auto &x : b.h) {
        const double re = n01(rng);
        const double im = n01(rng);
        x = {re, im};
    }
    return b;
}

}  // namespace sectormimo
