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

#ifndef SECTORMIMO_ALLOCATION_HPP
#define SECTORMIMO_ALLOCATION_HPP

#include <optional>
#include <utility>
#include <vector>

#include "sectormimo/config.hpp"
#include "sectormimo/geometry.hpp"
#include "sectormimo/performance.hpp"
#include "sectormimo/propagation.hpp"

namespace sectormimo {

/// Max-min SINR >= gamma as a cone feasibility problem in psi = sqrt(rho).
///
/// All coefficients are divided by sigma_f so that the noise entry of the
/// cone vector [X, Y, 1] is one; X and Y are then in units of the noise
/// standard deviation. Variable psi(a, n) lives at index a * K + n.
///
/// For user u = (k, j):
///   ||[X_u, Y_u, 1]|| <= (1/sqrt(gamma)) sum_i signal(u, i) psi(array(j, i), k)
///   sum_{l != j} (sum_i contamination(u, array(l, i)) psi(array(l, i), k))^2 <= X_u^2
///   sum_a undirected(u, a) sum_n psi(a, n)^2 <= Y_u^2
/// and per array sum_n psi(a, n)^2 <= budget(a), psi >= 0.
struct FeasibilityProblem {
    double gamma = 0.0;
    int L = 0;
    int K = 0;
    int arrays_per_cell = 3;
    double noise_std = 1.0;          ///< sigma_f, for converting X and Y back to sqrt(watts)
    std::vector<double> budget;      ///< per array, watts
    Grid<double> signal;             ///< (user, serving slot i)
    Grid<double> contamination;      ///< (user, array); zero on the user's own arrays
    Grid<double> undirected;         ///< (user, array)

    int n_arrays() const { return L * arrays_per_cell; }
    int n_users() const { return L * K; }
    int n_psi() const { return n_arrays() * K; }
    int variable_count() const { return n_psi() + 2 * n_users(); }
    /// Contamination and undirected bounds, per-array budgets, nonnegativity.
    int constraint_count() const { return 2 * n_users() + n_arrays() + n_psi(); }
    int cone_count() const { return n_users(); }
};

struct FeasiblePoint {
    std::vector<double> psi;
    std::vector<double> X;
    std::vector<double> Y;
};

struct FeasibilityResult {
    std::optional<FeasiblePoint> point;  ///< set iff feasible
    double residual = 0.0;               ///< of the returned point
    int newton_iterations = 0;
    bool certified = false;              ///< infeasibility proven by the duality gap (not capped)

    bool feasible() const { return point.has_value(); }
};

/// Completes psi with the tightest auxiliary X and Y.
FeasiblePoint make_feasible_point(const FeasibilityProblem &problem, std::vector<double> psi);

/// Largest constraint violation of `point` (0 when every constraint holds),
/// evaluated directly from the problem data.
double constraint_residual(const FeasibilityProblem &problem, const FeasiblePoint &point);

/// SINR of every user at psi, straight from the problem data.
std::vector<double> problem_sinr(const FeasibilityProblem &problem, const std::vector<double> &psi);

FeasibilityProblem build_feasibility(double gamma, const CouplingMatrix &c, const NetworkConfig &config);

/// Primal-dual interior point method (Nesterov-Todd scaling, Mehrotra
/// corrector) on max_{psi,s} s subject to the normalized cone margins
/// exceeding s. Returns as soon as an iterate passes direct substitution, or
/// when the dual bound proves s < 0. `warm_start`, when strictly interior
/// (psi > 0, budgets strict), is the primal starting point.
FeasibilityResult check_feasibility(const FeasibilityProblem &problem, const SolverOptions &opts,
                                    const std::vector<double> *warm_start = nullptr);

/// Primal log-barrier method on the same system. Slower; kept as an
/// independent reference for the primal-dual solver.
FeasibilityResult check_feasibility_barrier(const FeasibilityProblem &problem, const SolverOptions &opts);

struct SolverReport {
    double gamma_star = 0.0;
    std::vector<std::pair<double, double>> bracket_history;  ///< (gamma_min, gamma_max) after each step
    double feasibility_residual = 0.0;
    int bisection_iterations = 0;
    int subproblem_iterations = 0;   ///< Newton steps over all feasibility checks
    double wall_time = 0.0;          ///< seconds
};

struct CpaResult {
    PowerAllocation allocation;
    SolverReport report;
};

PowerAllocation upa(const NetworkConfig &config, const CellLayout &layout);
PowerAllocation upa(const CouplingMatrix &c);

/// Interference-free full-power bound on the network min-SINR.
double min_sinr_upper_bound(const CouplingMatrix &c, const NetworkConfig &config);

CpaResult cpa(const CouplingMatrix &c, const NetworkConfig &config);

struct Subnetwork {
    std::vector<int> cells;   ///< ascending
    std::vector<int> arrays;
    std::vector<int> users;
};

/// Cell plus every cell within `solver.dpa_rings` wrapped hops.
Subnetwork local_subnetwork(const CellLayout &layout, int cell, const NetworkConfig &config);

/// Coupling of the subnetwork treated as a standalone network.
CouplingMatrix restrict_coupling(const CouplingMatrix &c, const Subnetwork &sub);

struct DpaResult {
    PowerAllocation allocation;
    std::vector<SolverReport> local_reports;  ///< one per cell
};

/// Each cell's arrays solve CPA on their local subnetwork and keep their own rows.
/// Cells run concurrently.
DpaResult dpa(const CouplingMatrix &c, const CellLayout &layout, const NetworkConfig &config);

}  // namespace sectormimo

#endif
