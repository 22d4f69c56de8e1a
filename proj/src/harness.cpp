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

#include "sectormimo/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sectormimo/geometry.hpp"
#include "sectormimo/propagation.hpp"
#include "sectormimo/rng.hpp"

namespace sectormimo {

using nlohmann::json;

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::upa: return "upa";
    case Scheme::cpa: return "cpa";
    case Scheme::dpa: return "dpa";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view s)
{
    if (s == "upa")
        return Scheme::upa;
    if (s == "cpa")
        return Scheme::cpa;
    if (s == "dpa")
        return Scheme::dpa;
    throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

void ScenarioSpec::validate() const
{
    if (n_drops < 1)
        throw ConfigError("n_drops must be >= 1");
    if (mb_sweep.empty())
        throw ConfigError("M_B sweep is empty");
    for (double mb : mb_sweep)
        if (!(mb >= 3.0))
            throw ConfigError("M_B must be >= 3");
    // Validate every effective configuration up front so a bad value fails
    // before any drop is simulated.
    for (double mb : mb_sweep)
        effective_config(*this, mb).validate();
}

NetworkConfig effective_config(const ScenarioSpec &spec, double mb)
{
    NetworkConfig c = spec.base;
    c.mode = spec.antenna_mode;
    // NetworkConfig::M counts elements per directional array; an omni site
    // carries 3M, so both modes put M_B elements on each base station.
    c.M = mb / 3.0;
    if (c.mode == AntennaMode::omni) {
        c.G_Q = 1.0;
        c.G_q = 1.0;
    }
    return c;
}

RateCdf RunResult::cdf() const
{
    std::vector<double> r;
    r.reserve(rows.size());
    for (const auto &row : rows)
        r.push_back(row.rate);
    return RateCdf(std::move(r));
}

namespace {

struct DropSlot {
    bool ok = false;
    std::string error;
    std::vector<UserRow> rows;
    std::vector<PowerRow> powers;
    std::vector<SolverReport> reports;
};

// Simulates one drop for every M_B of the sweep. Large-scale quantities do
// not depend on M, so geometry and shadowing are drawn once.
std::vector<DropSlot> simulate_drop(const ScenarioSpec &spec, const CellLayout &layout, int drop)
{
    const size_t n_mb = spec.mb_sweep.size();
    std::vector<DropSlot> out(n_mb);

    const NetworkConfig first = effective_config(spec, spec.mb_sweep.front());
    CouplingMatrix base;
    try {
        auto drop_rng = make_stream(first.seed, static_cast<std::uint64_t>(drop), kStreamDrop);
        auto shadow_rng = make_stream(first.seed, static_cast<std::uint64_t>(drop), kStreamShadow);
        UserDrop users = drop_users(first, layout, drop_rng);
        base = build_coupling(layout, users, first, shadow_rng);
    } catch (const std::exception &e) {
        for (auto &slot : out)
            slot.error = e.what();
        return out;
    }

    for (size_t m = 0; m < n_mb; ++m) {
        DropSlot &slot = out[m];
        const NetworkConfig cfg = effective_config(spec, spec.mb_sweep[m]);
        CouplingMatrix c = base;
        for (auto &e : c.elements)
            e = spec.mb_sweep[m] / static_cast<double>(c.arrays_per_cell);
        try {
            PowerAllocation alloc;
            switch (spec.scheme) {
            case Scheme::upa:
                alloc = upa(c);
                break;
            case Scheme::cpa: {
                CpaResult r = cpa(c, cfg);
                alloc = std::move(r.allocation);
                slot.reports.push_back(std::move(r.report));
                break;
            }
            case Scheme::dpa: {
                DpaResult r = dpa(c, layout, cfg);
                alloc = std::move(r.allocation);
                slot.reports = std::move(r.local_reports);
                break;
            }
            }
            // Drops already run in parallel; keep the per-drop evaluation serial.
            SinrBreakdown b = evaluate_sinr_serial(c, alloc, cfg);
            for (int u = 0; u < c.n_users(); ++u)
                slot.rows.push_back({drop, c.cell_of(u), c.pilot_of(u), b.P[u], b.I1[u], b.I2[u], b.sinr[u],
                                     b.rate[u]});
            for (int a = 0; a < c.n_arrays(); ++a)
                for (int k = 0; k < c.K; ++k)
                    slot.powers.push_back({drop, a, k, alloc.rho(a, k)});
            slot.ok = true;
        } catch (const std::exception &e) {
            slot.error = e.what();
            slot.rows.clear();
            slot.powers.clear();
        }
    }
    return out;
}

}  // namespace

std::vector<RunResult> run_scenario(const ScenarioSpec &spec)
{
    spec.validate();
    const NetworkConfig layout_cfg = effective_config(spec, spec.mb_sweep.front());
    const CellLayout layout = build_layout(layout_cfg);

    std::vector<std::vector<DropSlot>> slots(static_cast<size_t>(spec.n_drops));
#pragma omp parallel for schedule(dynamic, 1)
    for (int d = 0; d < spec.n_drops; ++d)
        slots[static_cast<size_t>(d)] = simulate_drop(spec, layout, d);

    std::vector<RunResult> results;
    for (size_t m = 0; m < spec.mb_sweep.size(); ++m) {
        RunResult r;
        r.scheme = spec.scheme;
        r.antenna_mode = spec.antenna_mode;
        r.mb = spec.mb_sweep[m];
        r.n_drops = spec.n_drops;
        r.config = effective_config(spec, r.mb);
        for (int d = 0; d < spec.n_drops; ++d) {
            DropSlot &s = slots[static_cast<size_t>(d)][m];
            if (!s.ok) {
                r.failed_drops.push_back(d);
                continue;
            }
            r.rows.insert(r.rows.end(), s.rows.begin(), s.rows.end());
            r.powers.insert(r.powers.end(), s.powers.begin(), s.powers.end());
            for (auto &rep : s.reports)
                r.solver_reports.push_back(std::move(rep));
        }
        results.push_back(std::move(r));
    }
    return results;
}

// ---- export --------------------------------------------------------------

namespace {

std::string fmt12(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_atomically(const std::filesystem::path &path, const std::string &text)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        f << text;
        f.flush();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into '" + path.string() + "': " + ec.message());
    }
}

}  // namespace

std::string csv_text(const RunResult &result)
{
    std::string out = "drop,cell,user,P,I1,I2,sinr,rate\n";
    out.reserve(out.size() + result.rows.size() * 96);
    for (const auto &r : result.rows) {
        out += std::to_string(r.drop) + ',' + std::to_string(r.cell) + ',' + std::to_string(r.user) + ',';
        out += fmt12(r.P) + ',' + fmt12(r.I1) + ',' + fmt12(r.I2) + ',' + fmt12(r.sinr) + ',' + fmt12(r.rate);
        out += '\n';
    }
    return out;
}

static std::string powers_csv_text(const RunResult &result)
{
    std::string out = "drop,array,user,rho\n";
    for (const auto &p : result.powers)
        out += std::to_string(p.drop) + ',' + std::to_string(p.array) + ',' + std::to_string(p.user) + ',' +
               fmt12(p.rho) + '\n';
    return out;
}

json summary_json(const RunResult &result)
{
    if (result.rows.empty())
        throw EmptyInput("run produced no rows");
    const RateCdf cdf = result.cdf();

    json pct = json::object();
    for (int p : {1, 5, 25, 50, 75, 95, 99})
        pct["p" + std::to_string(p)] = cdf.percentile(p);

    double mean = 0.0;
    for (double r : cdf.sorted())
        mean += r;
    mean /= static_cast<double>(cdf.sorted().size());

    json solver = json::object();
    solver["solves"] = result.solver_reports.size();
    if (!result.solver_reports.empty()) {
        long bis = 0, newton = 0;
        double resid = 0.0, wall = 0.0;
        for (const auto &r : result.solver_reports) {
            bis += r.bisection_iterations;
            newton += r.subproblem_iterations;
            resid = std::max(resid, r.feasibility_residual);
            wall += r.wall_time;
        }
        const double n = static_cast<double>(result.solver_reports.size());
        solver["bisection_iterations_mean"] = static_cast<double>(bis) / n;
        solver["newton_iterations_total"] = newton;
        solver["max_feasibility_residual"] = resid;
        solver["wall_time_s"] = wall;
    }

    json j;
    j["scheme"] = std::string(to_string(result.scheme));
    j["antenna_mode"] = std::string(to_string(result.antenna_mode));
    j["mb"] = result.mb;
    j["seed"] = result.config.seed;
    j["n_drops"] = result.n_drops;
    j["drops_failed"] = result.failed_drops.size();
    j["failed_drops"] = result.failed_drops;
    j["rows"] = result.rows.size();
    j["rate_percentiles"] = pct;
    j["likely_095"] = cdf.likely_rate(0.95);
    j["mean_rate"] = mean;
    j["min_rate"] = cdf.sorted().front();
    j["solver"] = solver;
    j["config"] = config_to_json(result.config);
    return j;
}

std::string default_stem(const RunResult &result)
{
    std::ostringstream s;
    s << (result.antenna_mode == AntennaMode::directional ? "dir" : "omni") << '_' << to_string(result.scheme)
      << "_mb" << fmt12(result.mb);
    return s.str();
}

void export_result(const RunResult &result, const std::filesystem::path &dir, const std::string &stem)
{
    if (result.rows.empty())
        throw EmptyInput("refusing to export an empty result to '" + (dir / stem).string() + "'");
    // Render everything before touching the filesystem.
    const std::string csv = csv_text(result);
    const std::string powers = powers_csv_text(result);
    const std::string summary = summary_json(result).dump(2) + "\n";

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
    write_atomically(dir / (stem + ".csv"), csv);
    write_atomically(dir / (stem + "_powers.csv"), powers);
    write_atomically(dir / (stem + "_summary.json"), summary);
}

// ---- config documents ------------------------------------------------------

json config_to_json(const NetworkConfig &c)
{
    json j;
    j["L"] = c.L;
    j["K"] = c.K;
    j["M"] = c.M;
    j["antenna_mode"] = std::string(to_string(c.mode));
    j["R"] = c.R;
    j["r_excl"] = c.r_excl;
    j["G_Q"] = c.G_Q;
    j["G_q"] = c.G_q;
    j["theta_bw"] = c.theta_bw;
    j["rho_r"] = c.rho_r;
    j["rho_f"] = c.rho_f;
    j["sigma2_r"] = c.sigma2_r;
    j["sigma2_f"] = c.sigma2_f;
    j["tau"] = c.tau;
    j["pathloss"] = {{"intercept_db", c.pathloss.intercept_db},
                     {"slope_db_per_decade", c.pathloss.slope_db_per_decade}};
    j["shadow_std_db"] = c.shadow_std_db;
    j["seed"] = c.seed;
    j["solver"] = {{"delta_rel", c.solver.delta_rel},
                   {"feas_tol", c.solver.feas_tol},
                   {"max_bisection", c.solver.max_bisection},
                   {"max_newton", c.solver.max_newton},
                   {"dpa_rings", c.solver.dpa_rings}};
    return j;
}

namespace {

template <typename T>
T get_as(const json &j, const std::string &key)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

// Linear key or its "_dbm" variant; both present is ambiguous.
void read_power(const json &j, const std::string &key, double &dst, std::set<std::string> &seen)
{
    const bool lin = j.contains(key), db = j.contains(key + "_dbm");
    if (lin && db)
        throw ConfigError("config sets both '" + key + "' and '" + key + "_dbm'");
    if (lin) {
        dst = get_as<double>(j, key);
        seen.insert(key);
    } else if (db) {
        dst = dbm_to_watts(get_as<double>(j, key + "_dbm"));
        seen.insert(key + "_dbm");
    }
}

}  // namespace

NetworkConfig config_from_json(const json &j, NetworkConfig c)
{
    if (!j.is_object())
        throw ConfigError("config document must be an object");
    std::set<std::string> seen;
    auto take = [&](const char *key, auto &dst) {
        if (j.contains(key)) {
            dst = get_as<std::decay_t<decltype(dst)>>(j, key);
            seen.insert(key);
        }
    };
    take("L", c.L);
    take("K", c.K);
    take("M", c.M);
    if (j.contains("antenna_mode")) {
        c.mode = antenna_mode_from_string(get_as<std::string>(j, "antenna_mode"));
        seen.insert("antenna_mode");
    }
    take("R", c.R);
    take("r_excl", c.r_excl);
    take("G_Q", c.G_Q);
    take("G_q", c.G_q);
    take("theta_bw", c.theta_bw);
    if (j.contains("theta_bw_deg")) {
        c.theta_bw = get_as<double>(j, "theta_bw_deg") * std::numbers::pi / 180.0;
        seen.insert("theta_bw_deg");
    }
    if (j.contains("G_Q_db")) {
        c.G_Q = db_to_linear(get_as<double>(j, "G_Q_db"));
        seen.insert("G_Q_db");
    }
    if (j.contains("G_q_db")) {
        c.G_q = db_to_linear(get_as<double>(j, "G_q_db"));
        seen.insert("G_q_db");
    }
    read_power(j, "rho_r", c.rho_r, seen);
    read_power(j, "rho_f", c.rho_f, seen);
    read_power(j, "sigma2_r", c.sigma2_r, seen);
    read_power(j, "sigma2_f", c.sigma2_f, seen);
    take("tau", c.tau);
    take("shadow_std_db", c.shadow_std_db);
    take("seed", c.seed);
    if (j.contains("pathloss")) {
        const json &p = j.at("pathloss");
        if (!p.is_object())
            throw ConfigError("config key 'pathloss' must be an object");
        for (auto it = p.begin(); it != p.end(); ++it)
            if (it.key() != "intercept_db" && it.key() != "slope_db_per_decade")
                throw ConfigError("unknown key 'pathloss." + it.key() + "'");
        if (p.contains("intercept_db"))
            c.pathloss.intercept_db = get_as<double>(p, "intercept_db");
        if (p.contains("slope_db_per_decade"))
            c.pathloss.slope_db_per_decade = get_as<double>(p, "slope_db_per_decade");
        seen.insert("pathloss");
    }
    if (j.contains("solver")) {
        const json &s = j.at("solver");
        if (!s.is_object())
            throw ConfigError("config key 'solver' must be an object");
        static const std::set<std::string> keys{"delta_rel", "feas_tol", "max_bisection", "max_newton",
                                                "dpa_rings"};
        for (auto it = s.begin(); it != s.end(); ++it)
            if (!keys.contains(it.key()))
                throw ConfigError("unknown key 'solver." + it.key() + "'");
        if (s.contains("delta_rel"))
            c.solver.delta_rel = get_as<double>(s, "delta_rel");
        if (s.contains("feas_tol"))
            c.solver.feas_tol = get_as<double>(s, "feas_tol");
        if (s.contains("max_bisection"))
            c.solver.max_bisection = get_as<int>(s, "max_bisection");
        if (s.contains("max_newton"))
            c.solver.max_newton = get_as<int>(s, "max_newton");
        if (s.contains("dpa_rings"))
            c.solver.dpa_rings = get_as<int>(s, "dpa_rings");
        seen.insert("solver");
    }

    static const std::set<std::string> scenario_keys{"scheme", "mb", "drops", "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!seen.contains(it.key()) && !scenario_keys.contains(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "'");
    return c;
}

ScenarioSpec scenario_from_json(const json &j)
{
    ScenarioSpec spec;
    spec.base = config_from_json(j);
    spec.antenna_mode = spec.base.mode;
    if (j.contains("scheme"))
        spec.scheme = scheme_from_string(get_as<std::string>(j, "scheme"));
    if (j.contains("mb")) {
        const json &mb = j.at("mb");
        spec.mb_sweep.clear();
        if (mb.is_array()) {
            for (const auto &v : mb) {
                if (!v.is_number())
                    throw ConfigError("config key 'mb' must hold numbers");
                spec.mb_sweep.push_back(v.get<double>());
            }
        } else {
            spec.mb_sweep.push_back(get_as<double>(j, "mb"));
        }
    } else {
        spec.mb_sweep = {3.0 * spec.base.M};
    }
    if (j.contains("drops"))
        spec.n_drops = get_as<int>(j, "drops");
    if (j.contains("out"))
        spec.out_dir = get_as<std::string>(j, "out");
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path &path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(f, nullptr, true, true);
    } catch (const json::parse_error &e) {
        throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace sectormimo
