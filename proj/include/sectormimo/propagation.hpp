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

#ifndef SECTORMIMO_PROPAGATION_HPP
#define SECTORMIMO_PROPAGATION_HPP

#include <complex>
#include <random>
#include <vector>

#include "sectormimo/config.hpp"
#include "sectormimo/geometry.hpp"

namespace sectormimo {

/// Dense row-major matrix; rows are users, columns arrays unless noted.
template <typename T>
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int r, int c, T fill = T{}) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    T &operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const T &operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    friend bool operator==(const Grid &, const Grid &) = default;
};

/// Large-scale description of one network realization. User u = cell * K + k,
/// array a = cell * arrays_per_cell + i.
struct CouplingMatrix {
    int L = 0;
    int K = 0;
    int arrays_per_cell = 3;
    Grid<double> gain;              ///< G_a^{[u]}
    Grid<double> beta;              ///< beta_a^{[u]}
    std::vector<int> serving;       ///< serving[a] = cell served by array a
    std::vector<double> elements;   ///< antenna elements per array
    std::vector<double> budget;     ///< forward-link budget per array, watts

    int n_users() const { return L * K; }
    int n_arrays() const { return L * arrays_per_cell; }
    int cell_of(int u) const { return u / K; }
    int pilot_of(int u) const { return u % K; }
    int user(int k, int cell) const { return cell * K + k; }
    int array(int cell, int i) const { return cell * arrays_per_cell + i; }
};

/// Per (user, array) i.i.d. CN(0, 1) element vectors, flat index ((u * A) + a) * M + m.
struct SmallScaleBlock {
    int n_users = 0;
    int n_arrays = 0;
    int M = 0;
    std::vector<std::complex<double>> h;

    const std::complex<double> *vec(int u, int a) const
    {
        return h.data() + (static_cast<size_t>(u) * n_arrays + a) * M;
    }
};

/// Lobe gain of the simplified pattern; the main-lobe boundary is inclusive.
double directivity_gain(double phi, const NetworkConfig &config);

/// 10 log10(beta) = intercept - slope log10(d) + shadow.
double pathloss_beta(double d_km, double shadow_db, const NetworkConfig &config);

CouplingMatrix build_coupling(const CellLayout &layout, const UserDrop &drop,
                              const NetworkConfig &config, std::mt19937_64 &rng);

SmallScaleBlock sample_small_scale(int n_users, int n_arrays, int M, std::mt19937_64 &rng);

}  // namespace sectormimo

#endif
