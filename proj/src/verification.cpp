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

#include "sectormimo/verification.hpp"

#include <algorithm>
#include <cmath>

#include "sectormimo/rng.hpp"

namespace sectormimo {

namespace {

cplx complex_normal(std::mt19937_64 &rng, double variance)
{
    std::normal_distribution<double> n01(0.0, std::sqrt(0.5 * variance));
    const double re = n01(rng);
    const double im = n01(rng);
    return {re, im};
}

// sum_m conj(a[m]) b[m]
cplx inner(const cplx *a, const cplx *b, int M)
{
    cplx acc{0.0, 0.0};
    for (int m = 0; m < M; ++m)
        acc += std::conj(a[m]) * b[m];
    return acc;
}

struct TrialSample {
    std::vector<std::array<cplx, 5>> T;
    std::vector<cplx> T2_coherent;
    std::vector<cplx> y;
    std::vector<cplx> s;
};

TrialSample run_trial(const CouplingMatrix &c, const PowerAllocation &alloc, const NetworkConfig &config,
                      int M, std::uint64_t seed, int trial)
{
    auto rng = make_stream(seed, static_cast<std::uint64_t>(trial), kStreamTrial);
    const auto small = sample_small_scale(c.n_users(), c.n_arrays(), M, rng);
    const auto est = pilot_phase(c, small, config, rng);
    std::vector<cplx> s(static_cast<size_t>(c.n_users()));
    for (auto &v : s)
        v = complex_normal(rng, 1.0);
    auto d = beamform_and_receive(est, alloc, s, c, config, rng);
    return {std::move(d.T), std::move(d.T2_coherent), std::move(d.y), std::move(d.s)};
}

}  // namespace

int common_element_count(const CouplingMatrix &c)
{
    if (c.elements.empty())
        throw DimensionMismatch("network has no arrays");
    const double m = c.elements.front();
    for (double e : c.elements)
        if (e != m)
            throw DimensionMismatch("Monte Carlo needs the same element count on every array");
    if (m < 1.0 || m != std::floor(m))
        throw DimensionMismatch("Monte Carlo needs an integral element count");
    return static_cast<int>(m);
}

EstimationModel pilot_phase(const CouplingMatrix &c, const SmallScaleBlock &small,
                            const NetworkConfig &config, std::mt19937_64 &rng)
{
    const int U = c.n_users(), A = c.n_arrays(), M = small.M;
    if (small.n_users != U || small.n_arrays != A)
        throw DimensionMismatch("pilot_phase: small-scale block does not match network");

    EstimationModel est;
    est.n_users = U;
    est.n_arrays = A;
    est.M = M;
    est.theta = Grid<double>(U, A);
    est.mean_gram = Grid<double>(U, A);
    est.ghat.resize(static_cast<size_t>(U) * A * M);
    est.gtilde.resize(static_cast<size_t>(U) * A * M);

    const double pilot_energy = config.rho_r * config.tau;
    const double amp = std::sqrt(pilot_energy);
    std::vector<cplx> received(static_cast<size_t>(M));

    for (int a = 0; a < A; ++a) {
        for (int k = 0; k < c.K; ++k) {
            // Despread pilot k at array a: every copilot user plus noise.
            double D = config.sigma2_r;
            for (int v = 0; v < c.L; ++v) {
                const int w = c.user(k, v);
                D += pilot_energy * c.gain(w, a) * c.beta(w, a);
            }
            for (int m = 0; m < M; ++m)
                received[static_cast<size_t>(m)] = complex_normal(rng, config.sigma2_r);
            for (int v = 0; v < c.L; ++v) {
                const int w = c.user(k, v);
                const double scale = amp * std::sqrt(c.gain(w, a) * c.beta(w, a));
                const cplx *h = small.vec(w, a);
                for (int m = 0; m < M; ++m)
                    received[static_cast<size_t>(m)] += scale * h[m];
            }
            for (int v = 0; v < c.L; ++v) {
                const int w = c.user(k, v);
                const double theta = std::sqrt(pilot_energy * c.gain(w, a)) * c.beta(w, a) / D;
                est.theta(w, a) = theta;
                est.mean_gram(w, a) = M * theta * theta * D;
                const double sb = std::sqrt(c.beta(w, a));
                const cplx *h = small.vec(w, a);
                const size_t off = (static_cast<size_t>(w) * A + a) * M;
                for (int m = 0; m < M; ++m) {
                    const cplx gh = theta * received[static_cast<size_t>(m)];
                    est.ghat[off + m] = gh;
                    est.gtilde[off + m] = sb * h[m] - gh;
                }
            }
        }
    }
    return est;
}

TermDecomposition beamform_and_receive(const EstimationModel &est, const PowerAllocation &alloc,
                                       std::span<const cplx> symbols, const CouplingMatrix &c,
                                       const NetworkConfig &config, std::mt19937_64 &rng)
{
    const int U = c.n_users(), A = c.n_arrays(), K = c.K, M = est.M;
    if (static_cast<int>(symbols.size()) != U || est.n_users != U || est.n_arrays != A ||
        alloc.rho.rows != A || alloc.rho.cols != K)
        throw DimensionMismatch("beamform_and_receive: inputs disagree on network shape");

    // Conjugate beamformer per array: x_a = sum_n sqrt(rho)/lambda ghat^H s.
    std::vector<cplx> x(static_cast<size_t>(A) * M, cplx{0.0, 0.0});
    for (int a = 0; a < A; ++a) {
        const int l = c.serving[static_cast<size_t>(a)];
        for (int n = 0; n < K; ++n) {
            const int owner = c.user(n, l);
            const double coef = std::sqrt(alloc.rho(a, n) / est.mean_gram(owner, a));
            const cplx *gh = est.ghat_vec(owner, a);
            const cplx sn = symbols[static_cast<size_t>(owner)];
            for (int m = 0; m < M; ++m)
                x[static_cast<size_t>(a) * M + m] += coef * std::conj(gh[m]) * sn;
        }
    }

    TermDecomposition out;
    out.T.assign(static_cast<size_t>(U), {});
    out.T2_coherent.assign(static_cast<size_t>(U), cplx{0.0, 0.0});
    out.y.assign(static_cast<size_t>(U), cplx{0.0, 0.0});
    out.s.assign(symbols.begin(), symbols.end());

    for (int u = 0; u < U; ++u) {
        const int k = c.pilot_of(u);
        auto &T = out.T[static_cast<size_t>(u)];
        T.fill(cplx{0.0, 0.0});
        const cplx w = complex_normal(rng, config.sigma2_f);
        cplx y = w;

        for (int a = 0; a < A; ++a) {
            const int l = c.serving[static_cast<size_t>(a)];
            const double sg = std::sqrt(c.gain(u, a));
            const cplx *gh_u = est.ghat_vec(u, a);
            const cplx *gt_u = est.gtilde_vec(u, a);
            for (int m = 0; m < M; ++m)
                y += sg * x[static_cast<size_t>(a) * M + m] * (gh_u[m] + gt_u[m]);

            for (int n = 0; n < K; ++n) {
                const int owner = c.user(n, l);
                const cplx sn = symbols[static_cast<size_t>(owner)];
                const double b = std::sqrt(alloc.rho(a, n) * c.gain(u, a) / est.mean_gram(owner, a));
                const cplx *gh_n = est.ghat_vec(owner, a);
                T[4] += b * inner(gh_n, gt_u, M) * sn;
                const cplx ip = inner(gh_n, gh_u, M);
                if (owner == u) {
                    const double mean = est.mean_gram(u, a);
                    T[0] += b * mean * sn;
                    T[1] += b * (ip - mean) * sn;
                } else if (n == k) {
                    // Copilot estimates are collinear: E[ghat_n^H ghat_u] = M theta_n theta_u D.
                    const double mean = est.mean_gram(owner, a) * est.theta(u, a) / est.theta(owner, a);
                    T[2] += b * ip * sn;
                    out.T2_coherent[static_cast<size_t>(u)] += b * mean * sn;
                } else {
                    T[3] += b * ip * sn;
                }
            }
        }
        T[4] += w;
        out.y[static_cast<size_t>(u)] = y;
    }
    return out;
}

std::vector<TermVariances> analytic_term_variances(const CouplingMatrix &c, const PowerAllocation &alloc,
                                                   const NetworkConfig &config)
{
    const auto br = evaluate_sinr_serial(c, alloc, config);
    const auto totals = alloc.totals();
    std::vector<TermVariances> out(static_cast<size_t>(c.n_users()));
    for (int u = 0; u < c.n_users(); ++u) {
        const int j = c.cell_of(u), k = c.pilot_of(u);
        auto &tv = out[static_cast<size_t>(u)];
        tv.var[0] = br.P[static_cast<size_t>(u)];
        tv.var[4] = config.sigma2_f;
        for (int a = 0; a < c.n_arrays(); ++a) {
            const int l = c.serving[static_cast<size_t>(a)];
            const double G = c.gain(u, a);
            const double lam2_per_el = br.lambda(u, a) * br.lambda(u, a) / c.elements[static_cast<size_t>(a)];
            for (int n = 0; n < c.K; ++n) {
                const double part = alloc.rho(a, n) * G * lam2_per_el;
                if (n != k)
                    tv.var[3] += part;
                else if (l == j)
                    tv.var[1] += part;
                else
                    tv.T2_fluctuation += part;
            }
            tv.var[4] += totals[static_cast<size_t>(a)] * G * (c.beta(u, a) - lam2_per_el);
        }
        tv.var[2] = br.I1[static_cast<size_t>(u)] + tv.T2_fluctuation;
    }
    return out;
}

BoundReport validate_bound(const CouplingMatrix &c, const PowerAllocation &alloc,
                           const NetworkConfig &config, const MonteCarloOptions &opts)
{
    if (opts.trials < 2)
        throw std::invalid_argument("validate_bound: need at least two trials");
    const int M = common_element_count(c);
    const int U = c.n_users();
    const int N = opts.trials;

    std::vector<TrialSample> samples(static_cast<size_t>(N));
#pragma omp parallel for schedule(static) if (opts.parallel)
    for (int t = 0; t < N; ++t)
        samples[static_cast<size_t>(t)] = run_trial(c, alloc, config, M, opts.seed, t);

    const auto eps = decoding_coefficients(c, alloc, config);
    const auto br = evaluate_sinr_serial(c, alloc, config);

    BoundReport rep;
    rep.trials = N;
    rep.M = M;
    rep.users.resize(static_cast<size_t>(U));
    for (int u = 0; u < U; ++u) {
        const auto su = static_cast<size_t>(u);
        double eps_sum = 0.0;
        for (int i = 0; i < c.arrays_per_cell; ++i)
            eps_sum += eps(u, i);

        // Columns 0..4: T0..T4, 5: coherent T2, 6: T2 fluctuation.
        constexpr int kCols = 7;
        std::array<cplx, kCols> mean{};
        auto &r = rep.users[su];
        for (const auto &smp : samples) {
            const auto &T = smp.T[su];
            for (int i = 0; i < 5; ++i)
                mean[static_cast<size_t>(i)] += T[static_cast<size_t>(i)];
            mean[5] += smp.T2_coherent[su];
            mean[6] += T[2] - smp.T2_coherent[su];

            const cplx expected = smp.s[su] * eps_sum;
            if (std::abs(expected) > 0.0)
                r.t0_max_rel_error = std::max(r.t0_max_rel_error, std::abs(T[0] - expected) / std::abs(expected));
            const cplx total = T[0] + T[1] + T[2] + T[3] + T[4];
            if (std::abs(smp.y[su]) > 0.0)
                r.reconstruction_max_rel_error =
                    std::max(r.reconstruction_max_rel_error, std::abs(total - smp.y[su]) / std::abs(smp.y[su]));
        }
        for (auto &m : mean)
            m /= static_cast<double>(N);

        std::array<std::array<cplx, kCols>, kCols> cov{};
        for (const auto &smp : samples) {
            const auto &T = smp.T[su];
            std::array<cplx, kCols> d{};
            for (int i = 0; i < 5; ++i)
                d[static_cast<size_t>(i)] = T[static_cast<size_t>(i)] - mean[static_cast<size_t>(i)];
            d[5] = smp.T2_coherent[su] - mean[5];
            d[6] = T[2] - smp.T2_coherent[su] - mean[6];
            for (size_t i = 0; i < kCols; ++i)
                for (size_t k = 0; k <= i; ++k)
                    cov[i][k] += d[i] * std::conj(d[k]);
        }
        const double norm = 1.0 / static_cast<double>(N - 1);
        for (size_t i = 0; i < 5; ++i)
            r.var[i] = cov[i][i].real() * norm;
        r.var_T2_coherent = cov[5][5].real() * norm;
        r.var_T2_fluctuation = cov[6][6].real() * norm;
        for (size_t i = 0; i < 5; ++i)
            for (size_t k = 0; k < i; ++k) {
                const double den = std::sqrt(cov[i][i].real() * cov[k][k].real());
                const double rho = den > 0.0 ? std::abs(cov[i][k]) / den : 0.0;
                r.corr[i][k] = r.corr[k][i] = rho;
                r.max_abs_corr = std::max(r.max_abs_corr, rho);
            }
        for (size_t i = 0; i < 5; ++i)
            r.corr[i][i] = 1.0;

        const double interference = r.var[1] + r.var[2] + r.var[3] + r.var[4];
        r.empirical_sinr = r.var[0] / interference;
        r.analytic_sinr = br.sinr[su];
        r.P = br.P[su];
        r.I1 = br.I1[su];
        r.I2 = br.I2[su];
        r.undirected_sum = r.var[1] + r.var_T2_fluctuation + r.var[3] + r.var[4] - config.sigma2_f;
    }
    return rep;
}

EstimationMoments estimation_moments(const CouplingMatrix &c, const NetworkConfig &config, int u, int a,
                                     int trials, std::uint64_t seed)
{
    const int M = common_element_count(c);
    double sh = 0.0, st = 0.0;
    cplx cross{0.0, 0.0};
    for (int t = 0; t < trials; ++t) {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(t), kStreamTrial);
        const auto small = sample_small_scale(c.n_users(), c.n_arrays(), M, rng);
        const auto est = pilot_phase(c, small, config, rng);
        const cplx *gh = est.ghat_vec(u, a);
        const cplx *gt = est.gtilde_vec(u, a);
        for (int m = 0; m < M; ++m) {
            sh += std::norm(gh[m]);
            st += std::norm(gt[m]);
            cross += gh[m] * std::conj(gt[m]);
        }
    }
    const double n = static_cast<double>(trials) * M;
    EstimationMoments mo;
    mo.var_ghat = sh / n;
    mo.var_gtilde = st / n;
    mo.cross = std::abs(cross / n) / std::sqrt(mo.var_ghat * mo.var_gtilde);
    return mo;
}

}  // namespace sectormimo
