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

#ifndef SECTORMIMO_CONFIG_HPP
#define SECTORMIMO_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sectormimo {

// ---- error types -------------------------------------------------------

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnsupportedClusterSize : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegeneratePosition : std::domain_error {
    using std::domain_error::domain_error;
};
struct ExclusionTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonpositiveDistance : std::domain_error {
    using std::domain_error::domain_error;
};
struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NumericalBreakdown : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- unit conversion ---------------------------------------------------

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// ---- configuration -----------------------------------------------------

enum class AntennaMode { directional, omni };

std::string_view to_string(AntennaMode mode);
AntennaMode antenna_mode_from_string(std::string_view s);

struct PathlossModel {
    double intercept_db = -140.0;
    double slope_db_per_decade = 35.2;
};

struct SolverOptions {
    double delta_rel = 1e-3;     // bisection stops when gmax - gmin <= delta_rel * gmax
    double feas_tol = 1e-9;      // constraint residual accepted as feasible (noise-normalized units)
    int max_bisection = 200;
    int max_newton = 600;        // per feasibility check
    int dpa_rings = 1;
};

/// All scenario parameters. Powers and noise are linear watts; distances km.
struct NetworkConfig {
    int L = 19;                   ///< cells
    int K = 9;                    ///< users per cell
    double M = 100.0 / 3.0;       ///< elements per directional array (omni arrays get 3M)
    AntennaMode mode = AntennaMode::directional;
    double R = 1.0;               ///< cell radius, center to vertex
    double r_excl = 0.06;         ///< exclusion radius around every base station
    double G_Q = 2.98;
    double G_q = 0.01;
    double theta_bw = 2.0 * std::numbers::pi / 3.0;
    double rho_r = dbm_to_watts(23.0);
    double rho_f = dbm_to_watts(30.0);
    double sigma2_r = dbm_to_watts(-92.0);
    double sigma2_f = dbm_to_watts(-92.0);
    int tau = 9;
    PathlossModel pathloss{};
    double shadow_std_db = std::numbers::sqrt2 * 2.0;  ///< dB; N(0, 8) read as variance 8 dB^2
    std::uint64_t seed = 1;
    SolverOptions solver{};

    int arrays_per_cell() const { return mode == AntennaMode::directional ? 3 : 1; }
    int n_users() const { return L * K; }
    int n_arrays() const { return L * arrays_per_cell(); }

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

}  // namespace sectormimo

#endif
