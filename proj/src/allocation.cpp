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

#include "sectormimo/allocation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace sectormimo {

namespace {

struct QuadraticTerms {
    double signal = 0.0;         // sum_i c psi
    double contamination = 0.0;  // ||A psi||^2
    double undirected = 0.0;     // ||B psi||^2
};

QuadraticTerms user_terms(const FeasibilityProblem &p, const std::vector<double> &psi,
                          const std::vector<double> &array_sumsq, int u)
{
    const int K = p.K, apc = p.arrays_per_cell;
    const int j = u / K, k = u % K;
    QuadraticTerms t;
    for (int i = 0; i < apc; ++i)
        t.signal += p.signal(u, i) * psi[static_cast<size_t>((j * apc + i) * K + k)];
    for (int l = 0; l < p.L; ++l) {
        if (l == j)
            continue;
        double s = 0.0;
        for (int i = 0; i < apc; ++i) {
            const int a = l * apc + i;
            s += p.contamination(u, a) * psi[static_cast<size_t>(a * K + k)];
        }
        t.contamination += s * s;
    }
    for (int a = 0; a < p.n_arrays(); ++a)
        t.undirected += p.undirected(u, a) * array_sumsq[static_cast<size_t>(a)];
    return t;
}

std::vector<double> array_sumsq(const FeasibilityProblem &p, const std::vector<double> &psi)
{
    std::vector<double> s(static_cast<size_t>(p.n_arrays()), 0.0);
    for (int a = 0; a < p.n_arrays(); ++a)
        for (int n = 0; n < p.K; ++n) {
            const double v = psi[static_cast<size_t>(a * p.K + n)];
            s[static_cast<size_t>(a)] += v * v;
        }
    return s;
}

PowerAllocation psi_to_allocation(const std::vector<double> &psi, int n_arrays, int K)
{
    PowerAllocation alloc(n_arrays, K);
    for (int a = 0; a < n_arrays; ++a)
        for (int k = 0; k < K; ++k) {
            const double v = psi[static_cast<size_t>(a * K + k)];
            alloc.rho(a, k) = v * v;
        }
    return alloc;
}

}  // namespace

PowerAllocation upa(const NetworkConfig &config, const CellLayout &layout)
{
    PowerAllocation alloc(static_cast<int>(layout.arrays.size()), config.K);
    for (const auto &a : layout.arrays)
        for (int k = 0; k < config.K; ++k)
            alloc.rho(a.array_id, k) = a.budget / config.K;
    return alloc;
}

PowerAllocation upa(const CouplingMatrix &c)
{
    PowerAllocation alloc(c.n_arrays(), c.K);
    for (int a = 0; a < c.n_arrays(); ++a)
        for (int k = 0; k < c.K; ++k)
            alloc.rho(a, k) = c.budget[static_cast<size_t>(a)] / c.K;
    return alloc;
}

double min_sinr_upper_bound(const CouplingMatrix &c, const NetworkConfig &config)
{
    // Cauchy-Schwarz: each serving array gives the user at most its whole budget.
    const auto lam = lambda_matrix(c, config);
    double bound = std::numeric_limits<double>::infinity();
    for (int u = 0; u < c.n_users(); ++u) {
        const int j = c.cell_of(u);
        double s = 0.0;
        for (int i = 0; i < c.arrays_per_cell; ++i) {
            const int a = c.array(j, i);
            s += std::sqrt(c.budget[static_cast<size_t>(a)] * c.gain(u, a)) * lam(u, a);
        }
        bound = std::min(bound, s * s / config.sigma2_f);
    }
    return bound;
}

FeasibilityProblem build_feasibility(double gamma, const CouplingMatrix &c, const NetworkConfig &config)
{
    if (gamma < 0.0)
        throw std::invalid_argument("build_feasibility: gamma must be nonnegative");
    const int U = c.n_users(), A = c.n_arrays(), apc = c.arrays_per_cell;
    const auto lam = lambda_matrix(c, config);
    const double sigma = std::sqrt(config.sigma2_f);

    FeasibilityProblem p;
    p.gamma = gamma;
    p.L = c.L;
    p.K = c.K;
    p.arrays_per_cell = apc;
    p.noise_std = sigma;
    p.budget = c.budget;
    p.signal = Grid<double>(U, apc);
    p.contamination = Grid<double>(U, A, 0.0);
    p.undirected = Grid<double>(U, A);
    for (int u = 0; u < U; ++u) {
        const int j = c.cell_of(u);
        for (int a = 0; a < A; ++a) {
            const double coherent = std::sqrt(c.gain(u, a)) * lam(u, a) / sigma;
            if (c.serving[static_cast<size_t>(a)] == j)
                p.signal(u, a - j * apc) = coherent;
            else
                p.contamination(u, a) = coherent;
            p.undirected(u, a) = c.gain(u, a) * c.beta(u, a) / config.sigma2_f;
        }
    }
    return p;
}

FeasiblePoint make_feasible_point(const FeasibilityProblem &problem, std::vector<double> psi)
{
    if (static_cast<int>(psi.size()) != problem.n_psi())
        throw DimensionMismatch("make_feasible_point: psi has the wrong length");
    const auto sumsq = array_sumsq(problem, psi);
    FeasiblePoint pt;
    pt.X.resize(static_cast<size_t>(problem.n_users()));
    pt.Y.resize(static_cast<size_t>(problem.n_users()));
    for (int u = 0; u < problem.n_users(); ++u) {
        const auto t = user_terms(problem, psi, sumsq, u);
        pt.X[static_cast<size_t>(u)] = std::sqrt(t.contamination);
        pt.Y[static_cast<size_t>(u)] = std::sqrt(t.undirected);
    }
    pt.psi = std::move(psi);
    return pt;
}

std::vector<double> problem_sinr(const FeasibilityProblem &problem, const std::vector<double> &psi)
{
    const auto sumsq = array_sumsq(problem, psi);
    std::vector<double> out(static_cast<size_t>(problem.n_users()));
    for (int u = 0; u < problem.n_users(); ++u) {
        const auto t = user_terms(problem, psi, sumsq, u);
        out[static_cast<size_t>(u)] = t.signal * t.signal / (t.contamination + t.undirected + 1.0);
    }
    return out;
}

double constraint_residual(const FeasibilityProblem &problem, const FeasiblePoint &point)
{
    const auto &psi = point.psi;
    if (static_cast<int>(psi.size()) != problem.n_psi() ||
        static_cast<int>(point.X.size()) != problem.n_users() ||
        static_cast<int>(point.Y.size()) != problem.n_users())
        throw DimensionMismatch("constraint_residual: point shape does not match problem");

    const auto sumsq = array_sumsq(problem, psi);
    double worst = 0.0;
    for (int u = 0; u < problem.n_users(); ++u) {
        const auto su = static_cast<size_t>(u);
        const auto t = user_terms(problem, psi, sumsq, u);
        const double X = point.X[su], Y = point.Y[su];
        if (problem.gamma > 0.0) {
            const double cone = std::sqrt(X * X + Y * Y + 1.0) - t.signal / std::sqrt(problem.gamma);
            worst = std::max(worst, cone);
        }
        worst = std::max(worst, std::sqrt(t.contamination) - std::abs(X));
        worst = std::max(worst, std::sqrt(t.undirected) - std::abs(Y));
    }
    for (int a = 0; a < problem.n_arrays(); ++a)
        worst = std::max(worst, sumsq[static_cast<size_t>(a)] - problem.budget[static_cast<size_t>(a)]);
    for (double v : psi)
        worst = std::max(worst, -v);
    return worst;
}

CpaResult cpa(const CouplingMatrix &c, const NetworkConfig &config)
{
    const auto start = std::chrono::steady_clock::now();
    const auto &opts = config.solver;

    CpaResult out;
    auto &rep = out.report;
    FeasibilityProblem problem = build_feasibility(0.0, c, config);

    double gmax = min_sinr_upper_bound(c, config);
    // Uniform power scaled just inside the budgets is an interior point with a
    // known min-SINR; it opens the bracket and seeds the first warm start.
    std::vector<double> best_psi(static_cast<size_t>(problem.n_psi()));
    for (int a = 0; a < problem.n_arrays(); ++a)
        for (int k = 0; k < problem.K; ++k)
            best_psi[static_cast<size_t>(a * problem.K + k)] =
                std::sqrt(0.99 * problem.budget[static_cast<size_t>(a)] / problem.K);
    double gmin = 0.0;
    {
        const auto s = problem_sinr(problem, best_psi);
        gmin = std::min(*std::min_element(s.begin(), s.end()), gmax);
    }
    double best_residual = 0.0;
    rep.bracket_history.emplace_back(gmin, gmax);

    while (gmax - gmin > opts.delta_rel * gmax && rep.bisection_iterations < opts.max_bisection) {
        const double gamma = 0.5 * (gmin + gmax);
        problem.gamma = gamma;
        const auto res = check_feasibility(problem, opts, &best_psi);
        rep.subproblem_iterations += res.newton_iterations;
        ++rep.bisection_iterations;
        if (res.feasible()) {
            // The witness may clear gamma by a margin; its own min-SINR is attained.
            const auto s = problem_sinr(problem, res.point->psi);
            const double achieved = *std::min_element(s.begin(), s.end());
            gmin = std::min(std::max(gamma, achieved), gmax);
            best_psi = res.point->psi;
            best_residual = res.residual;
        } else {
            gmax = gamma;
        }
        rep.bracket_history.emplace_back(gmin, gmax);
    }

    out.allocation = psi_to_allocation(best_psi, c.n_arrays(), c.K);
    rep.gamma_star = gmin;
    rep.feasibility_residual = best_residual;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

Subnetwork local_subnetwork(const CellLayout &layout, int cell, const NetworkConfig &config)
{
    const int L = layout.n_cells();
    std::vector<int> depth(static_cast<size_t>(L), -1);
    std::vector<int> frontier{cell};
    depth[static_cast<size_t>(cell)] = 0;
    for (int ring = 1; ring <= config.solver.dpa_rings && !frontier.empty(); ++ring) {
        std::vector<int> next;
        for (int c : frontier)
            for (int nb : layout.neighbors(c))
                if (depth[static_cast<size_t>(nb)] < 0) {
                    depth[static_cast<size_t>(nb)] = ring;
                    next.push_back(nb);
                }
        frontier = std::move(next);
    }

    Subnetwork sub;
    const int apc = layout.arrays_per_cell();
    for (int c = 0; c < L; ++c)
        if (depth[static_cast<size_t>(c)] >= 0)
            sub.cells.push_back(c);
    for (int c : sub.cells)
        for (int i = 0; i < apc; ++i)
            sub.arrays.push_back(c * apc + i);
    for (int c : sub.cells)
        for (int k = 0; k < config.K; ++k)
            sub.users.push_back(c * config.K + k);
    return sub;
}

CouplingMatrix restrict_coupling(const CouplingMatrix &c, const Subnetwork &sub)
{
    CouplingMatrix r;
    r.L = static_cast<int>(sub.cells.size());
    r.K = c.K;
    r.arrays_per_cell = c.arrays_per_cell;
    const int U = static_cast<int>(sub.users.size()), A = static_cast<int>(sub.arrays.size());
    if (U != r.L * r.K || A != r.L * r.arrays_per_cell)
        throw DimensionMismatch("restrict_coupling: subnetwork index sets are inconsistent");
    r.gain = Grid<double>(U, A);
    r.beta = Grid<double>(U, A);
    for (int u = 0; u < U; ++u)
        for (int a = 0; a < A; ++a) {
            r.gain(u, a) = c.gain(sub.users[static_cast<size_t>(u)], sub.arrays[static_cast<size_t>(a)]);
            r.beta(u, a) = c.beta(sub.users[static_cast<size_t>(u)], sub.arrays[static_cast<size_t>(a)]);
        }
    for (int a = 0; a < A; ++a) {
        const auto src = static_cast<size_t>(sub.arrays[static_cast<size_t>(a)]);
        r.serving.push_back(a / r.arrays_per_cell);
        r.elements.push_back(c.elements[src]);
        r.budget.push_back(c.budget[src]);
    }
    return r;
}

DpaResult dpa(const CouplingMatrix &c, const CellLayout &layout, const NetworkConfig &config)
{
    if (layout.n_cells() != c.L)
        throw DimensionMismatch("dpa: layout and coupling disagree on cell count");
    DpaResult out;
    out.allocation = PowerAllocation(c.n_arrays(), c.K);
    out.local_reports.resize(static_cast<size_t>(c.L));
    const int apc = c.arrays_per_cell;

    // All arrays of a cell share the same local network, so one solve per cell
    // yields each of their rows.
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < c.L; ++j) {
        const auto sub = local_subnetwork(layout, j, config);
        const auto local = cpa(restrict_coupling(c, sub), config);
        const auto pos = std::find(sub.cells.begin(), sub.cells.end(), j) - sub.cells.begin();
        for (int i = 0; i < apc; ++i)
            for (int k = 0; k < c.K; ++k)
                out.allocation.rho(j * apc + i, k) = local.allocation.rho(static_cast<int>(pos) * apc + i, k);
        out.local_reports[static_cast<size_t>(j)] = local.report;
    }
    return out;
}

}  // namespace sectormimo
