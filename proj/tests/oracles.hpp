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
// Reference implementations written from the model equations with plain
// loops over nested vectors. They share no code with the library apart from
// the input containers, so agreement between the two is meaningful.

#ifndef SECTORMIMO_TESTS_ORACLES_HPP
#define SECTORMIMO_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sectormimo/geometry.hpp"
#include "sectormimo/performance.hpp"
#include "sectormimo/propagation.hpp"
#include "sectormimo/rng.hpp"

namespace oracle {

using sectormimo::CouplingMatrix;
using sectormimo::NetworkConfig;
using sectormimo::PowerAllocation;

using Table = std::vector<std::vector<double>>;

struct Link {
    double P = 0.0, I1 = 0.0, I2 = 0.0, sinr = 0.0;
};

// Copies the coupling into [user][array] tables indexed by (k, cell) and
// (cell, slot) so the formulas below read like the model.
struct Net {
    int L, K, S;                                         // cells, users, arrays per cell
    std::vector<std::vector<std::vector<std::vector<double>>>> G, B;  // [k][cell_u][cell_a][slot]
    std::vector<std::vector<double>> Mel;                // [cell][slot]
    std::vector<std::vector<std::vector<double>>> rho;   // [cell][slot][k]

    Net(const CouplingMatrix &c, const PowerAllocation &p) : L(c.L), K(c.K), S(c.arrays_per_cell)
    {
        G.assign(K, std::vector(L, std::vector(L, std::vector<double>(S))));
        B = G;
        Mel.assign(L, std::vector<double>(S));
        rho.assign(L, std::vector(S, std::vector<double>(K)));
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l)
                for (int j = 0; j < L; ++j)
                    for (int i = 0; i < S; ++i) {
                        G[k][l][j][i] = c.gain(l * K + k, j * S + i);
                        B[k][l][j][i] = c.beta(l * K + k, j * S + i);
                    }
        for (int j = 0; j < L; ++j)
            for (int i = 0; i < S; ++i) {
                Mel[j][i] = c.elements[j * S + i];
                for (int k = 0; k < K; ++k)
                    rho[j][i][k] = p.rho(j * S + i, k);
            }
    }

    // lambda of user (k, l) at array (j, i).
    double lambda(int k, int l, int j, int i, const NetworkConfig &cfg) const
    {
        double den = cfg.sigma2_r;
        for (int v = 0; v < L; ++v)
            den += cfg.rho_r * cfg.tau * G[k][v][j][i] * B[k][v][j][i];
        const double b = B[k][l][j][i];
        return std::sqrt(Mel[j][i] * cfg.rho_r * cfg.tau * G[k][l][j][i] * b * b / den);
    }

    // Decoding coefficient written in its own closed form, not via lambda.
    double epsilon(int k, int j, int i, const NetworkConfig &cfg) const
    {
        double den = cfg.sigma2_r;
        for (int l = 0; l < L; ++l)
            den += cfg.rho_r * cfg.tau * G[k][l][j][i] * B[k][l][j][i];
        return std::sqrt(Mel[j][i] * cfg.rho_r * cfg.tau * rho[j][i][k]) * G[k][j][j][i] * B[k][j][j][i] /
               std::sqrt(den);
    }

    Link link(int k, int j, const NetworkConfig &cfg) const
    {
        Link out;
        double coh = 0.0;
        for (int i = 0; i < S; ++i)
            coh += std::sqrt(rho[j][i][k] * G[k][j][j][i]) * lambda(k, j, j, i, cfg);
        out.P = coh * coh;
        for (int l = 0; l < L; ++l) {
            if (l == j)
                continue;
            double s = 0.0;
            for (int i = 0; i < S; ++i)
                s += std::sqrt(rho[l][i][k] * G[k][j][l][i]) * lambda(k, j, l, i, cfg);
            out.I1 += s * s;
        }
        for (int l = 0; l < L; ++l)
            for (int i = 0; i < S; ++i) {
                double total = 0.0;
                for (int n = 0; n < K; ++n)
                    total += rho[l][i][n];
                out.I2 += total * G[k][j][l][i] * B[k][j][l][i];
            }
        out.sinr = out.P / (out.I1 + out.I2 + cfg.sigma2_f);
        return out;
    }

    // Users in library order u = cell * K + k.
    std::vector<Link> all(const NetworkConfig &cfg) const
    {
        std::vector<Link> v;
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k)
                v.push_back(link(k, j, cfg));
        return v;
    }
};

inline double rel_err(double a, double b)
{
    const double s = std::max(std::abs(a), std::abs(b));
    return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Coupling for arbitrary L (not restricted to hexagonal clusters): own-cell
// gains G_Q, other gains drawn from {G_Q, G_q}, beta log-uniform.
inline CouplingMatrix random_coupling(int L, int K, int S, double M, const NetworkConfig &cfg, std::mt19937_64 &rng)
{
    CouplingMatrix c;
    c.L = L;
    c.K = K;
    c.arrays_per_cell = S;
    c.gain = sectormimo::Grid<double>(L * K, L * S);
    c.beta = sectormimo::Grid<double>(L * K, L * S);
    std::uniform_real_distribution<double> lg(-15.0, -10.0);
    std::bernoulli_distribution main_lobe(1.0 / 3.0);
    for (int u = 0; u < L * K; ++u)
        for (int a = 0; a < L * S; ++a) {
            const bool own = u / K == a / S;
            c.gain(u, a) = S == 1 ? 1.0 : (own || main_lobe(rng) ? cfg.G_Q : cfg.G_q);
            c.beta(u, a) = std::pow(10.0, lg(rng));
        }
    for (int a = 0; a < L * S; ++a) {
        c.serving.push_back(a / S);
        c.elements.push_back(M);
        c.budget.push_back(cfg.rho_f / S);
    }
    return c;
}

inline PowerAllocation random_allocation(const CouplingMatrix &c, std::mt19937_64 &rng)
{
    PowerAllocation p(c.n_arrays(), c.K);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int a = 0; a < c.n_arrays(); ++a) {
        std::vector<double> w(static_cast<size_t>(c.K));
        double s = 0.0;
        for (auto &x : w)
            s += (x = u(rng));
        const double scale = c.budget[static_cast<size_t>(a)] * u(rng) / s;
        for (int k = 0; k < c.K; ++k)
            p.rho(a, k) = w[static_cast<size_t>(k)] * scale;
    }
    return p;
}

// Coupling from the full geometry pipeline.
inline CouplingMatrix network_coupling(const NetworkConfig &cfg, std::uint64_t drop)
{
    const auto layout = sectormimo::build_layout(cfg);
    auto r1 = sectormimo::make_stream(cfg.seed, drop, sectormimo::kStreamDrop);
    auto r2 = sectormimo::make_stream(cfg.seed, drop, sectormimo::kStreamShadow);
    const auto users = sectormimo::drop_users(cfg, layout, r1);
    return sectormimo::build_coupling(layout, users, cfg, r2);
}

// Lower-interpolated percentile for an integral p, by sorting a copy and
// indexing with exact integer arithmetic.
inline double percentile_lower(std::vector<double> v, int p)
{
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<size_t>(p) * (v.size() - 1) / 100;
    return v[idx];
}

// Interference-free SINR with every serving array at full budget on one user.
inline double single_user_bound(const Net &n, int k, int j, const NetworkConfig &cfg,
                                const std::vector<double> &budget)
{
    double coh = 0.0;
    for (int i = 0; i < n.S; ++i)
        coh += std::sqrt(budget[static_cast<size_t>(j * n.S + i)] * n.G[k][j][j][i]) * n.lambda(k, j, j, i, cfg);
    return coh * coh / cfg.sigma2_f;
}

// True when p is a cell center of the infinite flat-topped grid through the origin.
inline bool on_hex_grid(sectormimo::Point p, double R, double tol = 1e-9)
{
    const double q = p.x / (1.5 * R);
    const double r = p.y / (std::sqrt(3.0) * R) - 0.5 * std::round(q);
    return std::abs(q - std::round(q)) < tol && std::abs(r - std::round(r)) < tol;
}

}  // namespace oracle

#endif
