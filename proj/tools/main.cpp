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
//
// sectormimo: run one setting (antenna mode x scheme) over an M_B sweep and
// write per-user CSV rows plus a JSON summary for each M_B.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "sectormimo/harness.hpp"
#include "sectormimo/rng.hpp"
#include "sectormimo/verification.hpp"

using namespace sectormimo;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kAllDropsFailed = 2, kIoError = 3 };

// Monte Carlo check of the bound on drop 0 with a small integral array size.
nlohmann::json verification_report(const ScenarioSpec &spec, int elements, int trials)
{
    NetworkConfig cfg = effective_config(spec, 3.0 * elements);
    const CellLayout layout = build_layout(cfg);
    auto drop_rng = make_stream(cfg.seed, 0, kStreamDrop);
    auto shadow_rng = make_stream(cfg.seed, 0, kStreamShadow);
    const UserDrop users = drop_users(cfg, layout, drop_rng);
    CouplingMatrix c = build_coupling(layout, users, cfg, shadow_rng);
    if (cfg.mode == AntennaMode::omni)
        throw ConfigError("--verify needs directional mode (equal element count on every array)");

    const PowerAllocation alloc = upa(c);
    const BoundReport rep = validate_bound(c, alloc, cfg, {trials, cfg.seed, true});

    nlohmann::json users_json = nlohmann::json::array();
    double worst_t2 = 0.0, worst_und = 0.0, worst_corr = 0.0;
    for (size_t u = 0; u < rep.users.size(); ++u) {
        const auto &r = rep.users[u];
        const double e_t2 = r.I1 > 0 ? std::abs(r.var[2] / r.I1 - 1.0) : 0.0;
        const double e_und = std::abs(r.undirected_sum / r.I2 - 1.0);
        worst_t2 = std::max(worst_t2, e_t2);
        worst_und = std::max(worst_und, e_und);
        worst_corr = std::max(worst_corr, r.max_abs_corr);
        users_json.push_back({{"user", u},
                              {"var_T", r.var},
                              {"P", r.P},
                              {"I1", r.I1},
                              {"I2", r.I2},
                              {"var_T2_over_I1", r.I1 > 0 ? r.var[2] / r.I1 : 0.0},
                              {"undirected_over_I2", r.undirected_sum / r.I2},
                              {"max_abs_corr", r.max_abs_corr},
                              {"empirical_sinr", r.empirical_sinr},
                              {"analytic_sinr", r.analytic_sinr}});
    }
    return {{"trials", rep.trials},
            {"M", rep.M},
            {"max_rel_error_T2_vs_I1", worst_t2},
            {"max_rel_error_undirected_vs_I2", worst_und},
            {"max_abs_corr", worst_corr},
            {"users", users_json}};
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Sectorized multi-cell massive MIMO downlink simulator"};

    std::string config_path;
    std::optional<std::string> scheme, antenna_mode, out_dir;
    std::vector<double> mb;
    std::optional<int> drops;
    std::optional<std::uint64_t> seed;
    bool verify = false;
    int trials = 2000;
    int verify_m = 16;
    int threads = 0;

    app.add_option("--config", config_path, "JSON scenario file");
    app.add_option("--scheme", scheme, "upa | cpa | dpa");
    app.add_option("--antenna-mode", antenna_mode, "directional | omni");
    app.add_option("--mb", mb, "elements per base station (repeatable)");
    app.add_option("--drops", drops, "number of random drops");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--verify", verify, "also run the Monte Carlo bound check on drop 0");
    app.add_option("--trials", trials, "Monte Carlo trials for --verify")->check(CLI::PositiveNumber);
    app.add_option("--verify-m", verify_m, "elements per array for --verify")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");
    CLI11_PARSE(app, argc, argv);

    if (threads > 0)
        omp_set_num_threads(threads);

    ScenarioSpec spec;
    try {
        if (!config_path.empty())
            spec = load_scenario(config_path);
        if (scheme)
            spec.scheme = scheme_from_string(*scheme);
        if (antenna_mode)
            spec.antenna_mode = antenna_mode_from_string(*antenna_mode);
        if (!mb.empty())
            spec.mb_sweep = mb;
        if (drops)
            spec.n_drops = *drops;
        if (seed)
            spec.base.seed = *seed;
        if (out_dir)
            spec.out_dir = *out_dir;
        spec.validate();
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    std::vector<RunResult> results;
    try {
        results = run_scenario(spec);
    } catch (const std::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    int exit_code = kOk;
    try {
        for (const auto &r : results) {
            if (r.rows.empty()) {
                std::cerr << "M_B=" << r.mb << ": every drop failed\n";
                exit_code = kAllDropsFailed;
                continue;
            }
            const std::string stem = default_stem(r);
            export_result(r, spec.out_dir, stem);
            const RateCdf cdf = r.cdf();
            std::printf("%-22s rows=%zu failed=%zu  p5=%.4f  p50=%.4f  bits/s/Hz\n", stem.c_str(), r.rows.size(),
                        r.failed_drops.size(), cdf.likely_rate(0.95), cdf.percentile(50));
        }
        if (verify) {
            const auto report = verification_report(spec, verify_m, trials);
            std::filesystem::create_directories(spec.out_dir);
            const auto path = spec.out_dir / "verify_report.json";
            std::ofstream f(path);
            if (!f || !(f << report.dump(2) << '\n'))
                throw IoError("cannot write '" + path.string() + "'");
            std::printf("verify: T2/I1 max err %.3g, undirected/I2 max err %.3g, max |corr| %.3g\n",
                        report["max_rel_error_T2_vs_I1"].get<double>(),
                        report["max_rel_error_undirected_vs_I2"].get<double>(),
                        report["max_abs_corr"].get<double>());
        }
    } catch (const IoError &e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIoError;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return exit_code;
}
