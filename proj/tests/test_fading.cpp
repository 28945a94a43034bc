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

#include "harq/fading.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace harq;

namespace {

const DopplerSpec fig4{0.0338 / 0.00014, 0.00014};
const PerOptions nats{CcDenominator::normalized, DispersionUnit::nats};

FsmcModel single_state(SnrLinear avg) { return build_from_thresholds({0.0, infinite_amplitude}, fig4, avg); }

double eps_ir(const HarqConfig& cfg, std::vector<SnrLinear> snrs)
{
    const auto len = cfg.round_lengths();
    return per_ir(cfg.code, TransmissionRecord{snrs, {len.begin(), len.begin() + static_cast<std::ptrdiff_t>(snrs.size())}}, cfg.per);
}

} // namespace

TEST(FadingOutcomes, SingleStateEqualsAwgn)
{
    for (double db : {-2.0, 3.0, 10.0}) {
        const SnrLinear g = SnrLinear::from_db(db);
        for (const auto& cfg : {HarqConfig::incremental(CodeParams{100, 70}, {1.0, 0.4, 0.3}), HarqConfig::chase(CodeParams{100, 50}, 3)}) {
            const auto a = outcomes_awgn(cfg, g);
            const auto f = outcomes_fading(cfg, single_state(g));
            for (std::size_t i = 0; i < a.p.size(); ++i) EXPECT_NEAR(f.p[i], a.p[i], 1e-14);
            EXPECT_NEAR(f.p_e, a.p_e, 1e-14);
        }
    }
}

TEST(FadingOutcomes, SingleRoundIsStateAverage)
{
    const auto model = build_equal_duration(13, fig4, SnrLinear::from_db(8.0));
    const auto cfg = HarqConfig::incremental(CodeParams{100, 70}, {1.0});
    double p0 = 0.0;
    for (std::size_t l = 0; l < model.states(); ++l) p0 += model.q[l] * (1.0 - eps_ir(cfg, {model.state_snrs[l]}));
    const auto o = outcomes_fading(cfg, model);
    EXPECT_NEAR(o.p[0], p0, 1e-13);
    EXPECT_NEAR(o.p_e, 1.0 - p0, 1e-13);
}

TEST(FadingOutcomes, TwoRoundHandSum)
{
    const auto model = build_equal_duration(8, fig4, SnrLinear::from_db(11.5));
    const auto cfg = HarqConfig::incremental(CodeParams{100, 70}, {1.0, 0.6}, nats);
    double p0 = 0.0;
    double pe = 0.0;
    for (std::size_t i = 0; i < model.states(); ++i) {
        p0 += model.q[i] * (1.0 - eps_ir(cfg, {model.state_snrs[i]}));
        for (std::size_t j = 0; j < model.states(); ++j)
            pe += model.q[i] * model.P(i, j) * eps_ir(cfg, {model.state_snrs[i], model.state_snrs[j]});
    }
    const auto o = outcomes_fading(cfg, model);
    EXPECT_NEAR(o.p[0], p0, 1e-12);
    EXPECT_NEAR(o.p_e, pe, 1e-15);
    EXPECT_NEAR(o.p[1], 1.0 - p0 - pe, 1e-12);
}

TEST(FadingOutcomes, EnginesAgree)
{
    const auto model = build_equal_duration(6, fig4, SnrLinear::from_db(6.0));
    for (const auto& cfg : {HarqConfig::incremental(CodeParams{100, 70}, {1.0, 0.5, 0.3, 0.3}),
                            HarqConfig::incremental(CodeParams{120, 90}, {1.0, 0.7, 0.7}), HarqConfig::chase(CodeParams{100, 100}, 4)}) {
        const auto e = outcomes_fading(cfg, model, FadingOptions{10'000'000, FadingEngine::enumerate});
        const auto d = outcomes_fading(cfg, model, FadingOptions{10'000'000, FadingEngine::dynamic_programming});
        for (std::size_t i = 0; i < e.p.size(); ++i) EXPECT_NEAR(e.p[i], d.p[i], 1e-12);
        EXPECT_NEAR(e.p_e, d.p_e, 1e-12);
    }
}

TEST(FadingOutcomes, BudgetExceeded)
{
    const auto model = build_equal_duration(13, fig4, SnrLinear::from_db(6.0));
    const auto cfg = HarqConfig::incremental(CodeParams{100, 70}, {1.0, 0.5, 0.3, 0.2, 0.1});
    EXPECT_THROW(outcomes_fading(cfg, model, FadingOptions{10, FadingEngine::enumerate}), resource_error);
    EXPECT_THROW(outcomes_fading(cfg, model, FadingOptions{10, FadingEngine::dynamic_programming}), resource_error);
}

TEST(FadingOutcomes, AutomaticFallsBackToMergedPaths)
{
    // 7761 paths, but equal retransmission lengths merge into < 3000 entries.
    const auto model = build_equal_duration(13, fig4, SnrLinear::from_db(6.0));
    const auto cfg = HarqConfig::incremental(CodeParams{100, 70}, {1.0, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3});
    ASSERT_GT(detail::count_paths(model, cfg.m), 3000u);
    const auto merged = outcomes_fading(cfg, model, FadingOptions{3000, FadingEngine::automatic});
    const auto full = outcomes_fading(cfg, model, FadingOptions{100'000, FadingEngine::enumerate});
    for (std::size_t i = 0; i < full.p.size(); ++i) EXPECT_NEAR(merged.p[i], full.p[i], 1e-12);
    EXPECT_NEAR(merged.p_e, full.p_e, 1e-15);
}

TEST(FadingOutcomes, CountPaths)
{
    const auto model = build_equal_duration(4, fig4, SnrLinear{1.0});
    EXPECT_EQ(detail::count_paths(model, 1), 4u);
    EXPECT_EQ(detail::count_paths(model, 2), 10u); // 4 + 2 * 3 tridiagonal entries
}

TEST(FadingOutcomes, ProbabilityAxiomsOnRandomModels)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> db(-5.0, 20.0);
    std::uniform_real_distribution<double> tau(0.05, 1.0);
    for (int i = 0; i < 40; ++i) {
        const auto model = build_equal_duration(2 + static_cast<int>(rng() % 12), fig4, SnrLinear::from_db(db(rng)));
        const int m = 1 + static_cast<int>(rng() % 3);
        std::vector<double> taus{1.0};
        for (int r = 1; r < m; ++r) taus.push_back(tau(rng));
        const auto o = outcomes_fading(HarqConfig::incremental(CodeParams{100, 1 + static_cast<std::int64_t>(rng() % 120)}, taus), model);
        EXPECT_NEAR(o.total(), 1.0, 1e-9);
        EXPECT_NO_THROW(o.validate());
    }
}

TEST(FadingMonteCarlo, ErrorFreeChannel)
{
    const auto cfg = HarqConfig::incremental(CodeParams{100, 10}, {1.0, 0.5});
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto e = outcomes_fading_mc_check(cfg, single_state(SnrLinear{1e9}), 10'000, seed);
        EXPECT_EQ(e.frequencies.p[0], 1.0);
        EXPECT_EQ(e.frequencies.p_e, 0.0);
    }
}

TEST(FadingMonteCarlo, AgreesWithAnalytic)
{
    const auto model = build_equal_duration(13, fig4, SnrLinear::from_db(8.0));
    const auto cfg = HarqConfig::incremental(CodeParams{100, 70}, {1.0, 0.6}, nats);
    const auto analytic = outcomes_fading(cfg, model);
    const auto e = outcomes_fading_mc_check(cfg, model, 200'000, 42);
    EXPECT_TRUE(e.agrees_with(analytic));
    EXPECT_NEAR(e.frequencies.total(), 1.0, 1e-12);
}

TEST(FadingMonteCarlo, Deterministic)
{
    const auto model = build_equal_duration(4, fig4, SnrLinear::from_db(5.0));
    const auto cfg = HarqConfig::chase(CodeParams{100, 70}, 2);
    const auto a = outcomes_fading_mc_check(cfg, model, 20'000, 7);
    const auto b = outcomes_fading_mc_check(cfg, model, 20'000, 7);
    EXPECT_EQ(a.frequencies.p, b.frequencies.p);
    EXPECT_THROW(outcomes_fading_mc_check(cfg, model, 100, 7), domain_error);
}
