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

#ifndef SECTORMIMO_PERFORMANCE_HPP
#define SECTORMIMO_PERFORMANCE_HPP

#include <span>
#include <vector>

#include "sectormimo/config.hpp"
#include "sectormimo/propagation.hpp"

namespace sectormimo {

/// Forward-link powers: rho(a, k) is what array a gives user k of its own cell.
struct PowerAllocation {
    Grid<double> rho;

    PowerAllocation() = default;
    PowerAllocation(int n_arrays, int K) : rho(n_arrays, K, 0.0) {}

    double total(int a) const;
    std::vector<double> totals() const;
    /// Largest per-array budget overshoot (<= 0 when every budget holds).
    double max_budget_excess(const CouplingMatrix &c) const;
};

/// Downlink SINR lower bound, per user.
struct SinrBreakdown {
    std::vector<double> P;
    std::vector<double> I1;
    std::vector<double> I2;
    std::vector<double> sinr;
    std::vector<double> rate;      ///< log2(1 + sinr), bits/s/Hz
    Grid<double> epsilon;          ///< (user, serving-array slot i)
    Grid<double> lambda;           ///< (user, array), every pair

    double min_sinr() const;
};

/// Pilot-contamination denominator sigma_r^2 + rho_r tau sum_v G beta over
/// the copilot users of every cell, shape (array, pilot).
Grid<double> contamination_denominators(const CouplingMatrix &c, const NetworkConfig &config);

double lambda_coeff(const CouplingMatrix &c, int u, int a, const NetworkConfig &config);
Grid<double> lambda_matrix(const CouplingMatrix &c, const NetworkConfig &config);

/// Decoding coefficients sent by the serving arrays, shape (user, slot i).
Grid<double> decoding_coefficients(const CouplingMatrix &c, const PowerAllocation &alloc,
                                   const NetworkConfig &config);

/// OpenMP over users.
SinrBreakdown evaluate_sinr(const CouplingMatrix &c, const PowerAllocation &alloc,
                            const NetworkConfig &config);
/// Single-threaded reference for evaluate_sinr; results are bit-identical.
SinrBreakdown evaluate_sinr_serial(const CouplingMatrix &c, const PowerAllocation &alloc,
                                   const NetworkConfig &config);

/// M -> infinity limit of the SINR per user; +inf when no pilot contamination.
std::vector<double> asymptotic_sinr(const CouplingMatrix &c, const PowerAllocation &alloc,
                                    const NetworkConfig &config);

/// Empirical CDF over pooled user rates.
class RateCdf {
public:
    explicit RateCdf(std::vector<double> samples);

    /// Lower-interpolated percentile, p in [0, 100].
    double percentile(double p) const;
    /// Rate achieved by the given fraction of users (0.95 -> 5th percentile).
    double likely_rate(double fraction = 0.95) const { return percentile(100.0 * (1.0 - fraction)); }
    /// Fraction of samples <= x.
    double cdf(double x) const;
    const std::vector<double> &sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

RateCdf rate_cdf(std::span<const SinrBreakdown> breakdowns);

}  // namespace sectormimo

#endif
