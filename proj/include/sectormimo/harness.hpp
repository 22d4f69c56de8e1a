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

#ifndef SECTORMIMO_HARNESS_HPP
#define SECTORMIMO_HARNESS_HPP

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sectormimo/allocation.hpp"
#include "sectormimo/config.hpp"
#include "sectormimo/performance.hpp"

namespace sectormimo {

enum class Scheme { upa, cpa, dpa };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view s);

struct ScenarioSpec {
    NetworkConfig base{};
    AntennaMode antenna_mode = AntennaMode::directional;
    Scheme scheme = Scheme::upa;
    std::vector<double> mb_sweep{100.0};   ///< elements per base station
    int n_drops = 1;
    std::filesystem::path out_dir = "results";

    void validate() const;
};

struct UserRow {
    int drop = 0;
    int cell = 0;
    int user = 0;
    double P = 0.0, I1 = 0.0, I2 = 0.0, sinr = 0.0, rate = 0.0;
};

struct PowerRow {
    int drop = 0;
    int array = 0;
    int user = 0;
    double rho = 0.0;
};

struct RunResult {
    Scheme scheme = Scheme::upa;
    AntennaMode antenna_mode = AntennaMode::directional;
    double mb = 0.0;
    int n_drops = 0;
    NetworkConfig config{};                ///< effective configuration of this run
    std::vector<UserRow> rows;             ///< ordered by (drop, cell, user)
    std::vector<PowerRow> powers;
    std::vector<SolverReport> solver_reports;
    std::vector<int> failed_drops;

    RateCdf cdf() const;
};

/// Configuration actually simulated for one M_B value of the sweep.
NetworkConfig effective_config(const ScenarioSpec &spec, double mb);

/// One RunResult per M_B. Drops run in parallel; each drop draws from its own
/// (seed, drop) streams so results do not depend on the thread count.
std::vector<RunResult> run_scenario(const ScenarioSpec &spec);

std::string csv_text(const RunResult &result);
nlohmann::json summary_json(const RunResult &result);

/// Writes <dir>/<stem>.csv, <dir>/<stem>_powers.csv and <dir>/<stem>_summary.json.
/// Files are staged and renamed so no partial output is left on failure.
void export_result(const RunResult &result, const std::filesystem::path &dir, const std::string &stem);
std::string default_stem(const RunResult &result);

nlohmann::json config_to_json(const NetworkConfig &config);
NetworkConfig config_from_json(const nlohmann::json &j, NetworkConfig base = {});
ScenarioSpec scenario_from_json(const nlohmann::json &j);
ScenarioSpec load_scenario(const std::filesystem::path &path);

}  // namespace sectormimo

#endif
