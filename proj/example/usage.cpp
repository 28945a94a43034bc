// SPDX-License-Identifier: Apache-2.0
//
// harqfbl: finite-blocklength HARQ analysis toolkit
// Copyright (C) 2026 The harqfbl Authors
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

// Minimal tour: AWGN PER and throughput, a fading model, and a tau1 sweep.

#include "harq/harq.hpp"

#include <cstdio>

int main()
{
    using namespace harq;
    const PerOptions opt{CcDenominator::normalized, DispersionUnit::nats};

    const auto cfg = HarqConfig::incremental(CodeParams{100, 100}, {1.0, 0.58}, opt);
    const auto awgn = outcomes_awgn(cfg, SnrLinear::from_db(-1.0));
    std::printf("AWGN -1 dB, tau1 = 0.58: PER %.3g, throughput %.4f\n", awgn.p_e, throughput(cfg, awgn));

    const auto model = build_for_target_c(3.0446, DopplerSpec{241.43, 0.00014}, SnrLinear::from_db(11.5));
    std::printf("FSMC: L = %zu, c = %.3f\n", model.states(), model.c);

    OptimizationProblem problem;
    problem.base = HarqConfig::incremental(CodeParams{100, 70}, {1.0, 1.0}, opt);
    problem.channel = model;
    problem.per_ceiling = 1e-4;
    const auto report = optimize_tau1(problem);
    std::printf("optimum tau1 = %.1f: PER %.3g, throughput %.4f%s\n", report.tau_hat[0], report.achieved_per,
                report.achieved_throughput, report.feasible ? "" : " (infeasible)");

    const auto stream = stream_delay(single_packet_delay(cfg, awgn), 1000);
    std::printf("1000-packet stream: mean delay %.2f slots\n", stream.mean());
}
