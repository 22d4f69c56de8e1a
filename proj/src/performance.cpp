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

#include "sectormimo/performance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sectormimo {

double PowerAllocation::total(int a) const
{
    double s = 0.0;
    for (int k = 0; k < rho.cols; ++k)
        s += rho(a, k);
    return s;
}

std::vector<double> PowerAllocation::totals() const
{
    std::vector<double> t(static_cast<size_t>(rho.rows));
    for (int a = 0; a < rho.rows; ++a)
        t[static_cast<size_t>(a)] = total(a);
    return t;
}

double PowerAllocation::max_budget_excess(const CouplingMatrix &c) const
{
    double worst = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < rho.rows; ++a)
        worst = std::max(worst, total(a) - c.budget[static_cast<size_t>(a)]);
    return worst;
}

double SinrBreakdown::min_sinr() const
{
    return sinr.empty() ? 0.0 : *std::min_element(sinr.begin(), sinr.end());
}

Grid<double> contamination_denominators(const CouplingMatrix &c, const NetworkConfig &config)
{
    const double pilot_energy = config.rho_r * config.tau;
    Grid<double> den(c.n_arrays(), c.K, config.sigma2_r);
    for (int a = 0; a < c.n_arrays(); ++a)
        for (int k = 0; k < c.K; ++k) {
            double s = 0.0;
            for (int v = 0; v < c.L; ++v) {
                const int u = c.user(k, v);
                s += c.gain(u, a) * c.beta(u, a);
            }
            den(a, k) += pilot_energy * s;
        }
    return den;
}

double lambda_coeff(const CouplingMatrix &c, int u, int a, const NetworkConfig &config)
{
    const double pilot_energy = config.rho_r * config.tau;
    const int k = c.pilot_of(u);
    double s = 0.0;
    for (int v = 0; v < c.L; ++v) {
        const int w = c.user(k, v);
        s += c.gain(w, a) * c.beta(w, a);
    }
    const double b = c.beta(u, a);
    return std::sqrt(c.elements[static_cast<size_t>(a)] * pilot_energy * c.gain(u, a) * b * b /
                     (config.sigma2_r + pilot_energy * s));
}

Grid<double> lambda_matrix(const CouplingMatrix &c, const NetworkConfig &config)
{
    const auto den = contamination_denominators(c, config);
    const double pilot_energy = config.rho_r * config.tau;
    Grid<double> lam(c.n_users(), c.n_arrays());
    for (int u = 0; u < c.n_users(); ++u)
        for (int a = 0; a < c.n_arrays(); ++a) {
            const double b = c.beta(u, a);
            lam(u, a) = std::sqrt(c.elements[static_cast<size_t>(a)] * pilot_energy * c.gain(u, a) * b *
                                  b / den(a, c.pilot_of(u)));
        }
    return lam;
}

Grid<double> decoding_coefficients(const CouplingMatrix &c, const PowerAllocation &alloc,
                                   const NetworkConfig &config)
{
    if (alloc.rho.rows != c.n_arrays() || alloc.rho.cols != c.K)
        throw DimensionMismatch("decoding_coefficients: allocation shape does not match network");
    const auto den = contamination_denominators(c, config);
    const double pilot_energy = config.rho_r * config.tau;
    Grid<double> eps(c.n_users(), c.arrays_per_cell);
    for (int u = 0; u < c.n_users(); ++u) {
        const int j = c.cell_of(u), k = c.pilot_of(u);
        for (int i = 0; i < c.arrays_per_cell; ++i) {
            const int a = c.array(j, i);
            eps(u, i) = std::sqrt(c.elements[static_cast<size_t>(a)] * pilot_energy * alloc.rho(a, k)) *
                        c.gain(u, a) * c.beta(u, a) / std::sqrt(den(a, k));
        }
    }
    return eps;
}

namespace {

SinrBreakdown evaluate_impl(const CouplingMatrix &c, const PowerAllocation &alloc,
                            const NetworkConfig &config, bool parallel)
{
    const int U = c.n_users(), A = c.n_arrays(), apc = c.arrays_per_cell;
    if (alloc.rho.rows != A || alloc.rho.cols != c.K || c.gain.rows != U || c.gain.cols != A ||
        c.beta.rows != U || c.beta.cols != A)
        throw DimensionMismatch("evaluate_sinr: allocation or coupling shape mismatch");

    SinrBreakdown out;
    out.lambda = lambda_matrix(c, config);
    out.P.assign(static_cast<size_t>(U), 0.0);
    out.I1.assign(static_cast<size_t>(U), 0.0);
    out.I2.assign(static_cast<size_t>(U), 0.0);
    out.sinr.assign(static_cast<size_t>(U), 0.0);
    out.rate.assign(static_cast<size_t>(U), 0.0);
    out.epsilon = Grid<double>(U, apc);
    const auto totals = alloc.totals();
    const auto &lam = out.lambda;

#pragma omp parallel for schedule(static) if (parallel)
    for (int u = 0; u < U; ++u) {
        const int j = c.cell_of(u), k = c.pilot_of(u);
        double coherent = 0.0;
        for (int i = 0; i < apc; ++i) {
            const int a = c.array(j, i);
            const double e = std::sqrt(alloc.rho(a, k) * c.gain(u, a)) * lam(u, a);
            out.epsilon(u, i) = e;
            coherent += e;
        }
        double contamination = 0.0;
        for (int l = 0; l < c.L; ++l) {
            if (l == j)
                continue;
            double s = 0.0;
            for (int i = 0; i < apc; ++i) {
                const int a = c.array(l, i);
                s += std::sqrt(alloc.rho(a, k) * c.gain(u, a)) * lam(u, a);
            }
            contamination += s * s;
        }
        double undirected = 0.0;
        for (int a = 0; a < A; ++a)
            undirected += totals[static_cast<size_t>(a)] * c.gain(u, a) * c.beta(u, a);

        const auto su = static_cast<size_t>(u);
        out.P[su] = coherent * coherent;
        out.I1[su] = contamination;
        out.I2[su] = undirected;
        out.sinr[su] = out.P[su] / (contamination + undirected + config.sigma2_f);
        out.rate[su] = std::log2(1.0 + out.sinr[su]);
    }
    return out;
}

}  // namespace

SinrBreakdown evaluate_sinr(const CouplingMatrix &c, const PowerAllocation &alloc,
                            const NetworkConfig &config)
{
    return evaluate_impl(c, alloc, config, true);
}

SinrBreakdown evaluate_sinr_serial(const CouplingMatrix &c, const PowerAllocation &alloc,
                                   const NetworkConfig &config)
{
    return evaluate_impl(c, alloc, config, false);
}

std::vector<double> asymptotic_sinr(const CouplingMatrix &c, const PowerAllocation &alloc,
                                    const NetworkConfig &config)
{
    // lambda / sqrt(M) is the M-free part; P and I1 scale with M, I2 and noise do not.
    const auto lam = lambda_matrix(c, config);
    std::vector<double> out(static_cast<size_t>(c.n_users()));
    for (int u = 0; u < c.n_users(); ++u) {
        const int j = c.cell_of(u), k = c.pilot_of(u);
        double signal = 0.0, contamination = 0.0;
        for (int l = 0; l < c.L; ++l) {
            double s = 0.0;
            for (int i = 0; i < c.arrays_per_cell; ++i) {
                const int a = c.array(l, i);
                s += std::sqrt(alloc.rho(a, k) * c.gain(u, a)) * lam(u, a) /
                     std::sqrt(c.elements[static_cast<size_t>(a)]);
            }
            if (l == j)
                signal = s * s;
            else
                contamination += s * s;
        }
        out[static_cast<size_t>(u)] =
            contamination > 0.0 ? signal / contamination : std::numeric_limits<double>::infinity();
    }
    return out;
}

RateCdf::RateCdf(std::vector<double> samples) : sorted_(std::move(samples))
{
    if (sorted_.empty())
        throw EmptyInput("rate_cdf: no samples");
    std::sort(sorted_.begin(), sorted_.end());
}

double RateCdf::percentile(double p) const
{
    const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted_.size() - 1);
    const auto idx = static_cast<size_t>(std::floor(pos + 1e-9));
    return sorted_[std::min(idx, sorted_.size() - 1)];
}

double RateCdf::cdf(double x) const
{
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

RateCdf rate_cdf(std::span<const SinrBreakdown> breakdowns)
{
    std::vector<double> all;
    for (const auto &b : breakdowns)
        all.insert(all.end(), b.rate.begin(), b.rate.end());
    return RateCdf(std::move(all));
}

}  // namespace sectormimo
