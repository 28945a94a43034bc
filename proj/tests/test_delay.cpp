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

#include "harq/delay.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace harq;

namespace {

// C(N, i) (1 - eps)^i eps^(N - i), in log space.
double binomial_atom(int N, int i, double eps)
{
    const long double lg = std::lgamma(N + 1.0L) - std::lgamma(i + 1.0L) - std::lgamma(N - i + 1.0L);
    return static_cast<double>(std::exp(lg + i * std::log1p(-static_cast<long double>(eps)) + (N - i) * std::log(static_cast<long double>(eps))));
}

DelayPmf naive_power(const DelayPmf& pmf, int packets)
{
    DelayPmf acc = pmf;
    for (int i = 1; i < packets; ++i) acc = convolve(acc, pmf);
    return acc;
}

void expect_ccdf_axioms(const std::vector<std::pair<double, double>>& ccdf)
{
    ASSERT_GE(ccdf.size(), 2u);
    EXPECT_NEAR(ccdf.front().second, 1.0, 1e-12);
    EXPECT_EQ(ccdf.back().second, 0.0);
    for (std::size_t i = 1; i < ccdf.size(); ++i) {
        EXPECT_GT(ccdf[i].first, ccdf[i - 1].first);
        EXPECT_LE(ccdf[i].second, ccdf[i - 1].second + 1e-15);
    }
}

// P(X >= x): the CCDF value at the first support point not below x.
double ccdf_at(const std::vector<std::pair<double, double>>& ccdf, double x)
{
    for (const auto& [xi, pi] : ccdf)
        if (xi >= x - 1e-12) return pi;
    return 0.0;
}

} // namespace

TEST(SinglePacket, OneRound)
{
    const auto pmf = single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0}), OutcomeDistribution{{0.7}, 0.3});
    ASSERT_EQ(pmf.size(), 1u);
    EXPECT_EQ(pmf.support(0), 1.0);
    EXPECT_EQ(pmf.mass[0], 1.0);
}

TEST(SinglePacket, ChaseTwoRounds)
{
    const auto pmf = single_packet_delay(HarqConfig::chase(CodeParams{100, 50}, 2), OutcomeDistribution{{0.9, 0.07}, 0.03});
    ASSERT_EQ(pmf.size(), 2u);
    EXPECT_EQ(pmf.support(0), 1.0);
    EXPECT_EQ(pmf.support(1), 2.0);
    EXPECT_DOUBLE_EQ(pmf.mass[0], 0.9);
    EXPECT_DOUBLE_EQ(pmf.mass[1], 0.1);
}

TEST(SinglePacket, ThreeRoundSupport)
{
    const OutcomeDistribution o{{0.6, 0.3, 0.08}, 0.02};
    const auto pmf = single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.7, 0.6}), o);
    ASSERT_EQ(pmf.size(), 3u);
    EXPECT_DOUBLE_EQ(pmf.support(0), 1.0);
    EXPECT_DOUBLE_EQ(pmf.support(1), 1.7);
    EXPECT_DOUBLE_EQ(pmf.support(2), 2.3);
    EXPECT_DOUBLE_EQ(pmf.mass[2], 0.1);
    EXPECT_NEAR(pmf.total(), 1.0, 1e-15);
}

TEST(Stream, SinglePacketIsIdentity)
{
    const auto pmf = single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.3}), OutcomeDistribution{{0.6, 0.3}, 0.1});
    const auto s = stream_delay(pmf, 1);
    EXPECT_EQ(s.numerators, pmf.numerators);
    EXPECT_EQ(s.mass, pmf.mass);
}

TEST(Stream, BinomialClosedForm)
{
    const double eps = 0.137;
    for (double tau1 : {1.0, 0.58, 0.3}) {
        const auto cfg = tau1 == 1.0 ? HarqConfig::chase(CodeParams{100, 100}, 2) : HarqConfig::incremental(CodeParams{100, 100}, {1.0, tau1});
        const auto pmf = single_packet_delay(cfg, OutcomeDistribution{{1.0 - eps, eps * 0.6}, eps * 0.4});
        const std::int64_t step = cfg.round_lengths()[1];
        for (int N : {1, 5, 50}) {
            const auto s = stream_delay(pmf, N);
            double sum = 0.0;
            for (int i = 0; i <= N; ++i) {
                // i first-round successes: N + (N - i) tau1 slots.
                const std::int64_t num = 100LL * N + static_cast<std::int64_t>(N - i) * step;
                EXPECT_NEAR(s.at(num), binomial_atom(N, i, eps), 1e-12) << "N=" << N << " i=" << i;
                sum += s.at(num);
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(Stream, SquaringMatchesNaiveConvolution)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng) * 0.1;
        const double s = a + b + c + d;
        const OutcomeDistribution o{{a / s, b / s, c / s}, d / s};
        const auto cfg = HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.01 + 0.99 * u(rng), 0.01 + 0.99 * u(rng)});
        const auto pmf = single_packet_delay(cfg, o);
        for (int N : {2, 3, 7, 16, 33, 64}) {
            const auto fast = stream_delay(pmf, N);
            const auto slow = naive_power(pmf, N);
            ASSERT_EQ(fast.numerators, slow.numerators);
            for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_NEAR(fast.mass[i], slow.mass[i], 1e-12);
            EXPECT_NEAR(fast.mean(), N * pmf.mean(), 1e-9 * N);
        }
    }
}

TEST(Stream, BudgetExceeded)
{
    const auto pmf = single_packet_delay(HarqConfig::incremental(CodeParams{1000, 50}, {1.0, 0.377, 0.211}), OutcomeDistribution{{0.4, 0.3, 0.2}, 0.1});
    EXPECT_THROW(stream_delay(pmf, 1000, DelayOptions{100, 0.0}), resource_error);
    EXPECT_THROW(stream_delay(pmf, 0), domain_error);
}

TEST(Ccdf, ErrorFreeChannelStepsAtZero)
{
    const auto pmf = single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.5}), OutcomeDistribution{{1.0, 0.0}, 0.0});
    const auto ccdf = overhead_ccdf(stream_delay(pmf, 1000), 1000);
    EXPECT_EQ(ccdf.front().first, 0.0);
    EXPECT_EQ(ccdf.front().second, 1.0);
    EXPECT_EQ(ccdf.back().second, 0.0);
    EXPECT_LT(ccdf.back().first, 1e-4);
}

TEST(Ccdf, Axioms)
{
    const auto pmf = single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.4, 0.2}), OutcomeDistribution{{0.7, 0.2, 0.05}, 0.05});
    expect_ccdf_axioms(delay_ccdf(pmf));
    expect_ccdf_axioms(overhead_ccdf(stream_delay(pmf, 200), 200));
}

TEST(Ccdf, ShorterRetransmissionDominates)
{
    const OutcomeDistribution o{{0.8, 0.1999}, 1e-4};
    const auto a = overhead_ccdf(stream_delay(single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.4}), o), 1000), 1000);
    const auto b = overhead_ccdf(stream_delay(single_packet_delay(HarqConfig::incremental(CodeParams{100, 50}, {1.0, 0.9}), o), 1000), 1000);
    for (double x = 0.0; x <= 0.3; x += 0.005) EXPECT_LE(ccdf_at(a, x), ccdf_at(b, x) + 1e-12) << x;
}

TEST(Ccdf, HigherRateLargerOverhead)
{
    // Stream of 1000 packets at -4 dB, n = 100.
    const SnrLinear g = SnrLinear::from_db(-4.0);
    const PerOptions nats{CcDenominator::normalized, DispersionUnit::nats};
    std::vector<std::vector<std::pair<double, double>>> curves;
    for (std::int64_t k : {30, 50, 70}) {
        const auto cfg = HarqConfig::chase(CodeParams{100, k}, 2, nats);
        curves.push_back(overhead_ccdf(stream_delay(single_packet_delay(cfg, outcomes_awgn(cfg, g)), 1000), 1000));
    }
    for (std::size_t c = 1; c < curves.size(); ++c)
        for (double x = 0.0; x <= 1.0; x += 0.002) EXPECT_LE(ccdf_at(curves[c - 1], x), ccdf_at(curves[c], x) + 1e-12) << c << ' ' << x;
}
