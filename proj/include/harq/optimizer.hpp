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

#ifndef HARQ_OPTIMIZER_HPP
#define HARQ_OPTIMIZER_HPP

// Grid search over IR-HARQ retransmission coefficients: maximize throughput
// subject to a packet-error-rate ceiling.

#include "harq/error.hpp"
#include "harq/fading.hpp"
#include "harq/fsmc.hpp"
#include "harq/outcomes.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace harq {

/// `ceiling` accepts PER <= zeta_0; `floor` accepts PER >= zeta_0.
enum class ConstraintMode { ceiling, floor };

using Channel = std::variant<SnrLinear, FsmcModel>;

/// {0.1, 0.2, ..., 1.0}
inline std::vector<double> coarse_tau_grid()
{
    std::vector<double> g;
    for (int i = 1; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

/// {0.01, 0.02, ..., 1.00}
inline std::vector<double> fine_tau_grid()
{
    std::vector<double> g;
    for (int i = 1; i <= 100; ++i) g.push_back(i / 100.0);
    return g;
}

struct OptimizationProblem {
    HarqConfig base; // scheme and m are used; coefficients are searched
    Channel channel = SnrLinear{1.0};
    double per_ceiling = 1e-4;
    std::vector<double> tau_grid = coarse_tau_grid();
    ConstraintMode constraint = ConstraintMode::ceiling;
    FadingOptions fading{};

    void validate() const
    {
        base.code.validate();
        if (!(per_ceiling > 0.0 && per_ceiling <= 1.0)) throw domain_error("optimizer: PER ceiling must lie in (0, 1]");
        if (tau_grid.empty()) throw domain_error("optimizer: empty coefficient grid");
        for (std::size_t i = 0; i < tau_grid.size(); ++i) {
            if (!(tau_grid[i] > 0.0 && tau_grid[i] <= 1.0)) throw domain_error("optimizer: grid values must lie in (0, 1]");
            if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) throw domain_error("optimizer: grid must be strictly increasing");
        }
    }
};

struct FrontierPoint {
    std::vector<double> taus; // retransmission coefficients tau_1 ... tau_{m-1}
    double per = 1.0;
    double throughput = 0.0;
    bool feasible = false;
};

struct OptimizationReport {
    double snr_db = 0.0;
    std::vector<double> tau_hat;
    double achieved_per = 1.0;
    double achieved_throughput = 0.0;
    bool feasible = false;
    std::vector<FrontierPoint> frontier;
};

/// Resolution probabilities of `cfg` over either channel kind.
inline OutcomeDistribution evaluate_outcomes(const HarqConfig& cfg, const Channel& channel, const FadingOptions& fading = {})
{
    if (const auto* g = std::get_if<SnrLinear>(&channel)) return outcomes_awgn(cfg, *g);
    return outcomes_fading(cfg, std::get<FsmcModel>(channel), fading);
}

/// Average SNR of a channel in dB.
inline double channel_snr_db(const Channel& channel)
{
    if (const auto* g = std::get_if<SnrLinear>(&channel)) return g->db();
    return std::get<FsmcModel>(channel).avg_snr.db();
}

inline Channel with_snr(const Channel& channel, SnrLinear snr)
{
    if (std::holds_alternative<SnrLinear>(channel)) return snr;
    return with_avg_snr(std::get<FsmcModel>(channel), snr);
}

/// PER and throughput at one coefficient vector (tau_1 ... tau_{m-1}).
inline FrontierPoint evaluate_point(const OptimizationProblem& problem, std::vector<double> retx)
{
    HarqConfig cfg = problem.base;
    cfg.m = static_cast<int>(retx.size()) + 1;
    cfg.taus = {1.0};
    cfg.taus.insert(cfg.taus.end(), retx.begin(), retx.end());
    const auto outcome = evaluate_outcomes(cfg, problem.channel, problem.fading);
    FrontierPoint pt;
    pt.taus = std::move(retx);
    pt.per = outcome.p_e;
    pt.throughput = throughput(cfg, outcome);
    pt.feasible = problem.constraint == ConstraintMode::ceiling ? pt.per <= problem.per_ceiling : pt.per >= problem.per_ceiling;
    return pt;
}

namespace detail {

// Strict preference of a over b among feasible points: higher throughput, then
// less total redundancy, then smaller tau_1.
inline bool better(const FrontierPoint& a, const FrontierPoint& b)
{
    if (a.throughput != b.throughput) return a.throughput > b.throughput;
    double sa = 0.0;
    double sb = 0.0;
    for (double t : a.taus) sa += t;
    for (double t : b.taus) sb += t;
    if (sa != sb) return sa < sb;
    return a.taus.front() < b.taus.front();
}

inline OptimizationReport select(std::vector<FrontierPoint> frontier, double snr_db)
{
    OptimizationReport rep;
    rep.snr_db = snr_db;
    const FrontierPoint* best = nullptr;
    for (const auto& pt : frontier)
        if (pt.feasible && (!best || better(pt, *best))) best = &pt;
    if (best) {
        rep.feasible = true;
    } else {
        // Best effort: the most reliable grid point.
        for (const auto& pt : frontier)
            if (!best || pt.per < best->per || (pt.per == best->per && better(pt, *best))) best = &pt;
    }
    rep.tau_hat = best->taus;
    rep.achieved_per = best->per;
    rep.achieved_throughput = best->throughput;
    rep.frontier = std::move(frontier);
    return rep;
}

} // namespace detail

/// Single-retransmission search (m = 2) over the grid.
inline OptimizationReport optimize_tau1(const OptimizationProblem& problem)
{
    problem.validate();
    if (problem.base.m != 2) throw domain_error("optimize_tau1: requires m = 2");
    std::vector<FrontierPoint> frontier;
    for (double t : problem.tau_grid) frontier.push_back(evaluate_point(problem, {t}));
    return detail::select(std::move(frontier), channel_snr_db(problem.channel));
}

/// Two-retransmission search (m = 3) over the triangle tau_2 <= tau_1.
inline OptimizationReport optimize_tau12(const OptimizationProblem& problem)
{
    problem.validate();
    if (problem.base.m != 3) throw domain_error("optimize_tau12: requires m = 3");
    std::vector<FrontierPoint> frontier;
    for (double t1 : problem.tau_grid)
        for (double t2 : problem.tau_grid)
            if (t2 <= t1) frontier.push_back(evaluate_point(problem, {t1, t2}));
    return detail::select(std::move(frontier), channel_snr_db(problem.channel));
}

/// One report per SNR (dB), reusing the problem's channel geometry.
inline std::vector<OptimizationReport> sweep(const OptimizationProblem& problem, std::span<const double> snr_db)
{
    if (snr_db.empty()) throw domain_error("sweep: empty SNR list");
    std::vector<OptimizationReport> out;
    for (double db : snr_db) {
        OptimizationProblem p = problem;
        p.channel = with_snr(problem.channel, SnrLinear::from_db(db));
        auto rep = p.base.m == 3 ? optimize_tau12(p) : optimize_tau1(p);
        rep.snr_db = db;
        out.push_back(std::move(rep));
    }
    return out;
}

} // namespace harq

#endif // HARQ_OPTIMIZER_HPP
