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

#ifndef SECTORMIMO_VERIFICATION_HPP
#define SECTORMIMO_VERIFICATION_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sectormimo/config.hpp"
#include "sectormimo/performance.hpp"
#include "sectormimo/propagation.hpp"

namespace sectormimo {

using cplx = std::complex<double>;

/// Simulated MMSE channel estimates for every (user, array) pair.
struct EstimationModel {
    int n_users = 0;
    int n_arrays = 0;
    int M = 0;
    Grid<double> theta;          ///< MMSE scaling, (user, array)
    Grid<double> mean_gram;      ///< E[ghat^H ghat] = M theta^2 D, (user, array)
    std::vector<cplx> ghat;      ///< flat ((u * A) + a) * M + m
    std::vector<cplx> gtilde;

    const cplx *ghat_vec(int u, int a) const { return ghat.data() + offset(u, a); }
    const cplx *gtilde_vec(int u, int a) const { return gtilde.data() + offset(u, a); }

private:
    size_t offset(int u, int a) const { return (static_cast<size_t>(u) * n_arrays + a) * M; }
};

/// One received sample per user split into the five analysis terms.
/// `T2_coherent` is the part of T2 that survives averaging over the
/// channel (the pilot-contamination beam); `y` is the directly simulated
/// received signal, so sum(T) == y.
struct TermDecomposition {
    std::vector<std::array<cplx, 5>> T;
    std::vector<cplx> T2_coherent;
    std::vector<cplx> y;
    std::vector<cplx> s;
};

/// Integral element count shared by every array; throws otherwise.
int common_element_count(const CouplingMatrix &c);

EstimationModel pilot_phase(const CouplingMatrix &c, const SmallScaleBlock &small,
                            const NetworkConfig &config, std::mt19937_64 &rng);

TermDecomposition beamform_and_receive(const EstimationModel &est, const PowerAllocation &alloc,
                                       std::span<const cplx> symbols, const CouplingMatrix &c,
                                       const NetworkConfig &config, std::mt19937_64 &rng);

/// Closed-form variances of T0..T4 implied by the channel statistics.
struct TermVariances {
    std::array<double, 5> var{};
    double T2_fluctuation = 0.0;
};
std::vector<TermVariances> analytic_term_variances(const CouplingMatrix &c, const PowerAllocation &alloc,
                                                   const NetworkConfig &config);

struct UserBoundReport {
    std::array<double, 5> var{};       ///< empirical Var[T0..T4]
    double var_T2_coherent = 0.0;
    double var_T2_fluctuation = 0.0;
    double max_abs_corr = 0.0;         ///< over pairs i != j
    std::array<std::array<double, 5>, 5> corr{};
    double empirical_sinr = 0.0;       ///< Var[T0] / sum Var[T1..T4]
    double analytic_sinr = 0.0;
    double P = 0.0, I1 = 0.0, I2 = 0.0;
    double undirected_sum = 0.0;       ///< Var[T1] + fluct(T2) + Var[T3] + Var[T4] - sigma_f^2
    double t0_max_rel_error = 0.0;     ///< max |T0 - s sum eps| / |s sum eps|
    double reconstruction_max_rel_error = 0.0;
};

struct BoundReport {
    int trials = 0;
    int M = 0;
    std::vector<UserBoundReport> users;
};

struct MonteCarloOptions {
    int trials = 10000;
    std::uint64_t seed = 1;
    bool parallel = true;   ///< false runs the single-threaded reference loop
};

BoundReport validate_bound(const CouplingMatrix &c, const PowerAllocation &alloc,
                           const NetworkConfig &config, const MonteCarloOptions &opts);

/// Empirical per-entry moments of the estimates for one (user, array) pair.
struct EstimationMoments {
    double var_ghat = 0.0;
    double var_gtilde = 0.0;
    double cross = 0.0;   ///< |E[ghat gtilde^*]| / sqrt(var_ghat var_gtilde)
};
EstimationMoments estimation_moments(const CouplingMatrix &c, const NetworkConfig &config, int u, int a,
                                     int trials, std::uint64_t seed);

}  // namespace sectormimo

#endif
