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
// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "sectormimo/allocation.hpp"
#include "sectormimo/geometry.hpp"
#include "sectormimo/propagation.hpp"
#include "sectormimo/rng.hpp"
#include "sectormimo/verification.hpp"

using namespace sectormimo;

namespace {

struct Instance {
    NetworkConfig config;
    CouplingMatrix coupling;
    PowerAllocation alloc;
};

Instance make_instance(int L, int K, double M)
{
    Instance in;
    in.config.L = L;
    in.config.K = K;
    in.config.tau = K;
    in.config.M = M;
    const CellLayout layout = build_layout(in.config);
    auto drop_rng = make_stream(7, 0, kStreamDrop);
    auto shadow_rng = make_stream(7, 0, kStreamShadow);
    const UserDrop users = drop_users(in.config, layout, drop_rng);
    in.coupling = build_coupling(layout, users, in.config, shadow_rng);
    in.alloc = upa(in.coupling);
    return in;
}

void BM_EvaluateSinrSerial(benchmark::State &state)
{
    const Instance in = make_instance(19, static_cast<int>(state.range(0)), 100.0 / 3.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_sinr_serial(in.coupling, in.alloc, in.config));
}

void BM_EvaluateSinrParallel(benchmark::State &state)
{
    const Instance in = make_instance(19, static_cast<int>(state.range(0)), 100.0 / 3.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate_sinr(in.coupling, in.alloc, in.config));
}

void BM_ValidateBound(benchmark::State &state)
{
    const Instance in = make_instance(7, 3, 16.0);
    const bool parallel = state.range(0) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(validate_bound(in.coupling, in.alloc, in.config, {200, 1, parallel}));
    state.SetLabel(parallel ? "parallel" : "serial");
}

void BM_Cpa(benchmark::State &state)
{
    const Instance in = make_instance(7, 3, 100.0 / 3.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(cpa(in.coupling, in.config));
}

}  // namespace

BENCHMARK(BM_EvaluateSinrSerial)->Arg(3)->Arg(9);
BENCHMARK(BM_EvaluateSinrParallel)->Arg(3)->Arg(9);
BENCHMARK(BM_ValidateBound)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cpa)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
