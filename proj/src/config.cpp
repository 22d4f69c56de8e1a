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

#include "sectormimo/config.hpp"

namespace sectormimo {

std::string_view to_string(AntennaMode mode)
{
    return mode == AntennaMode::directional ? "directional" : "omni";
}

AntennaMode antenna_mode_from_string(std::string_view s)
{
    if (s == "directional" || s == "dir")
        return AntennaMode::directional;
    if (s == "omni" || s == "omnidirectional")
        return AntennaMode::omni;
    throw ConfigError("unknown antenna mode '" + std::string(s) + "'");
}

void NetworkConfig::validate() const
{
    auto require = [](bool ok, const char *what) {
        if (!ok)
            throw ConfigError(what);
    };
    require(L >= 1, "L must be >= 1");
    require(K >= 1, "K must be >= 1");
    require(M >= 1.0, "M must be >= 1");
    require(tau >= K, "pilot length tau must be >= K");
    require(R > 0.0, "cell radius must be positive");
    require(r_excl >= 0.0 && r_excl < R, "exclusion radius must lie in [0, R)");
    require(rho_r > 0.0 && rho_f > 0.0, "transmit powers must be positive");
    require(sigma2_r > 0.0 && sigma2_f > 0.0, "noise powers must be positive");
    require(shadow_std_db >= 0.0, "shadowing std must be nonnegative");
    require(theta_bw > 0.0 && theta_bw <= 2.0 * std::numbers::pi, "beamwidth must be in (0, 2pi]");
    require(G_Q > 0.0 && G_q >= 0.0, "antenna gains must be nonnegative");
    if (mode == AntennaMode::directional)
        require(std::abs(G_Q + 2.0 * G_q - 3.0) <= 1e-9, "lossless antenna requires G_Q + 2 G_q = 3");
    else
        require(G_Q == 1.0 && G_q == 1.0, "omni mode requires G_Q = G_q = 1");
    require(solver.delta_rel > 0.0 && solver.delta_rel < 1.0, "solver.delta_rel must be in (0, 1)");
    require(solver.feas_tol >= 0.0, "solver.feas_tol must be nonnegative");
    require(solver.max_bisection >= 1 && solver.max_newton >= 1, "solver iteration caps must be positive");
    require(solver.dpa_rings >= 1, "solver.dpa_rings must be >= 1");
}

}  // namespace sectormimo
