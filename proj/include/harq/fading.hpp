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

#ifndef HARQ_FADING_HPP
#define HARQ_FADING_HPP

// HARQ resolution probabilities over a finite-state Markov channel. The first
// round starts in a state drawn from the marginal distribution; each further
// round moves one step along the chain. Every state path contributes its
// probability times the change in packet error rate the path produces.

#include "harq/error.hpp"
#include "harq/fbl.hpp"
#include "harq/fsmc.hpp"
#include "harq/outcomes.hpp"
#include "harq/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace harq {

enum class FadingEngine { automatic, enumerate, dynamic_programming };

struct FadingOptions {
    std::uint64_t path_budget = 10'000'000;
    FadingEngine engine = FadingEngine::automatic;
};

namespace detail {

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Decoding statistic of a partial state path.
struct PathStatistic {
    double snr_sum = 0.0; // CC: combined SNR
    IrAccumulator ir;     // IR: running sums
};

// Combines rounds with arbitrary realized SNRs.
class RoundCombiner {
public:
    explicit RoundCombiner(const HarqConfig& cfg) : cfg_(cfg), lengths_(cfg.round_lengths()) {}

    PathStatistic extend(PathStatistic s, SnrLinear g, int round) const
    {
        if (cfg_.scheme == Scheme::cc)
            s.snr_sum += g.value;
        else
            s.ir.add(g, lengths_[static_cast<std::size_t>(round)], cfg_.per.dispersion);
        return s;
    }

    double per(const PathStatistic& s) const
    {
        if (cfg_.scheme == Scheme::cc) {
            const SnrLinear total{s.snr_sum};
            return per_cc(cfg_.code, std::span<const SnrLinear>(&total, 1), cfg_.per);
        }
        return s.ir.per(cfg_.code);
    }

    const std::vector<std::int64_t>& lengths() const { return lengths_; }

private:
    const HarqConfig& cfg_;
    std::vector<std::int64_t> lengths_;
};

// Combines rounds spent in FSMC states.
class PathKernel : public RoundCombiner {
public:
    PathKernel(const HarqConfig& cfg, const FsmcModel& model) : RoundCombiner(cfg), model_(model) {}

    PathStatistic extend(PathStatistic s, std::size_t state, int round) const
    {
        return RoundCombiner::extend(s, model_.state_snrs[state], round);
    }

private:
    const FsmcModel& model_;
};

// Number of positive-probability state paths of `rounds` rounds.
inline std::uint64_t count_paths(const FsmcModel& model, int rounds)
{
    const std::size_t L = model.states();
    std::vector<double> ways(L, 1.0);
    for (int r = 1; r < rounds; ++r) {
        std::vector<double> next(L, 0.0);
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j)
                if (model.P(i, j) > 0.0) next[j] += ways[i];
        ways = std::move(next);
    }
    double total = 0.0;
    for (double w : ways) total += w;
    return total > 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(total);
}

struct OutcomeSums {
    std::vector<CompensatedSum> p;
    CompensatedSum p_e;
};

inline void enumerate_paths(const PathKernel& kernel, const FsmcModel& model, int m, int round, std::size_t state, double weight,
                            const PathStatistic& prev, double eps_prev, OutcomeSums& sums)
{
    const PathStatistic stat = kernel.extend(prev, state, round);
    const double eps = kernel.per(stat);
    sums.p[static_cast<std::size_t>(round)].add(weight * ((round == 0 ? 1.0 : eps_prev) - eps));
    if (round + 1 == m) {
        sums.p_e.add(weight * eps);
        return;
    }
    for (std::size_t next = 0; next < model.states(); ++next) {
        const double t = model.P(state, next);
        if (t > 0.0) enumerate_paths(kernel, model, m, round + 1, next, weight * t, stat, eps, sums);
    }
}

// Forward recursion over (current state, multiset of visited (state, round
// length) pairs). Paths with the same multiset share the decoding statistic,
// so they merge without approximation.
inline void dynamic_programming(const HarqConfig& cfg, const PathKernel& kernel, const FsmcModel& model, std::uint64_t budget,
                                OutcomeSums& sums)
{
    const std::size_t L = model.states();
    std::vector<std::int64_t> classes = kernel.lengths();
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    const auto class_of = [&](int round) {
        const auto len = kernel.lengths()[static_cast<std::size_t>(round)];
        return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), len) - classes.begin());
    };
    const std::size_t width = L * classes.size();

    struct Entry {
        double weight = 0.0;
        double eps = 1.0;
    };
    using Key = std::vector<std::uint32_t>; // counts[width], then current state

    const auto statistic_of = [&](const Key& key) {
        PathStatistic s;
        for (std::size_t c = 0; c < classes.size(); ++c)
            for (std::size_t l = 0; l < L; ++l) {
                const auto n = key[c * L + l];
                if (n == 0) continue;
                if (cfg.scheme == Scheme::cc)
                    s.snr_sum += static_cast<double>(n) * model.state_snrs[l].value;
                else
                    s.ir.add(model.state_snrs[l], classes[c] * static_cast<std::int64_t>(n), cfg.per.dispersion);
            }
        return s;
    };

    std::map<Key, Entry> layer;
    for (std::size_t l = 0; l < L; ++l) {
        Key key(width + 1, 0);
        key[class_of(0) * L + l] = 1;
        key[width] = static_cast<std::uint32_t>(l);
        const double eps = kernel.per(statistic_of(key));
        sums.p[0].add(model.q[l] * (1.0 - eps));
        layer[key] = Entry{model.q[l], eps};
    }
    for (int round = 1; round < cfg.m; ++round) {
        std::map<Key, Entry> next;
        for (const auto& [key, entry] : layer) {
            const std::size_t from = key[width];
            for (std::size_t to = 0; to < L; ++to) {
                const double t = model.P(from, to);
                if (t <= 0.0) continue;
                Key k2 = key;
                ++k2[class_of(round) * L + to];
                k2[width] = static_cast<std::uint32_t>(to);
                auto it = next.find(k2);
                if (it == next.end()) {
                    it = next.emplace(k2, Entry{0.0, kernel.per(statistic_of(k2))}).first;
                    if (next.size() > budget)
                        throw resource_error("outcomes_fading: state-path table exceeds the budget of " + std::to_string(budget) +
                                             " entries; use the Monte Carlo estimator instead");
                }
                const double w = entry.weight * t;
                sums.p[static_cast<std::size_t>(round)].add(w * (entry.eps - it->second.eps));
                it->second.weight += w;
            }
        }
        layer = std::move(next);
    }
    for (const auto& [key, entry] : layer) sums.p_e.add(entry.weight * entry.eps);
}

} // namespace detail

/// Resolution-event probabilities of one packet over the Markov channel.
inline OutcomeDistribution outcomes_fading(const HarqConfig& cfg, const FsmcModel& model, const FadingOptions& opt = {})
{
    cfg.validate();
    model.validate(1e-9);
    detail::PathKernel kernel(cfg, model);
    detail::OutcomeSums sums{std::vector<detail::CompensatedSum>(static_cast<std::size_t>(cfg.m)), {}};

    const std::uint64_t paths = detail::count_paths(model, cfg.m);
    const bool enumerate = opt.engine == FadingEngine::enumerate ||
                           (opt.engine == FadingEngine::automatic && paths <= opt.path_budget);
    if (enumerate) {
        if (paths > opt.path_budget)
            throw resource_error("outcomes_fading: " + std::to_string(paths) + " state paths exceed the budget of " +
                                 std::to_string(opt.path_budget));
        for (std::size_t l = 0; l < model.states(); ++l)
            detail::enumerate_paths(kernel, model, cfg.m, 0, l, model.q[l], detail::PathStatistic{}, 1.0, sums);
    } else {
        detail::dynamic_programming(cfg, kernel, model, opt.path_budget, sums);
    }

    std::vector<double> p;
    for (const auto& s : sums.p) p.push_back(s.value());
    return detail::finalize_outcome(std::move(p), sums.p_e.value());
}

/// Empirical outcome frequencies with binomial standard errors.
struct EmpiricalOutcome {
    OutcomeDistribution frequencies;
    std::vector<double> se_p;
    double se_p_e = 0.0;
    std::uint64_t trials = 0;

    /// Componentwise |empirical - analytic| <= sigmas * SE, where SE uses the
    /// analytic probability (so that events never observed are still judged).
    bool agrees_with(const OutcomeDistribution& analytic, double sigmas = 3.0) const
    {
        if (analytic.p.size() != frequencies.p.size()) return false;
        const auto within = [&](double emp, double ref) {
            const double n = static_cast<double>(trials);
            const double se = std::max(std::sqrt(ref * (1.0 - ref) / n), std::sqrt(emp * (1.0 - emp) / n));
            return std::abs(emp - ref) <= sigmas * se + 1e-15;
        };
        for (std::size_t i = 0; i < analytic.p.size(); ++i)
            if (!within(frequencies.p[i], analytic.p[i])) return false;
        return within(frequencies.p_e, analytic.p_e);
    }
};

/// Throughput of an empirical outcome and its multinomial delta-method
/// standard error.
inline std::pair<double, double> empirical_throughput(const HarqConfig& cfg, const EmpiricalOutcome& e)
{
    const auto tau = cfg.effective_taus();
    const std::size_t m = tau.size();
    if (e.frequencies.p.size() != m) throw domain_error("empirical_throughput: outcome and config disagree on m");
    std::vector<double> f(e.frequencies.p);
    f.push_back(e.frequencies.p_e);
    std::vector<double> cost(m + 1);
    double cum = 0.0;
    for (std::size_t i = 0; i < m; ++i) cost[i] = cum += tau[i];
    cost[m] = cum;
    double slots = 0.0;
    for (std::size_t i = 0; i <= m; ++i) slots += f[i] * cost[i];
    const double rate = cfg.code.rate();
    const double eta = rate * (1.0 - f[m]) / slots;
    double mean_g = 0.0;
    double mean_g2 = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double g = rate * (-(i == m ? slots : 0.0) - (1.0 - f[m]) * cost[i]) / (slots * slots);
        mean_g += f[i] * g;
        mean_g2 += f[i] * g * g;
    }
    const double var = std::max(0.0, mean_g2 - mean_g * mean_g) / static_cast<double>(e.trials);
    return {eta, std::sqrt(var)};
}

namespace detail {

inline std::size_t sample_index(const std::vector<double>& cdf, double u)
{
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Resolution index (0..m-1, or m for failure) for one packet whose rounds see
// `states`; a single uniform is compared against the running error rate.
inline int resolve_packet(const PathKernel& kernel, const std::vector<std::size_t>& states, double u)
{
    PathStatistic stat;
    for (std::size_t r = 0; r < states.size(); ++r) {
        stat = kernel.extend(stat, states[r], static_cast<int>(r));
        if (u >= kernel.per(stat)) return static_cast<int>(r);
    }
    return static_cast<int>(states.size());
}

inline EmpiricalOutcome tally(const std::vector<std::uint64_t>& counts, std::uint64_t trials)
{
    EmpiricalOutcome out;
    out.trials = trials;
    const double n = static_cast<double>(trials);
    const auto se = [n](double p) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / n); };
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
        const double f = static_cast<double>(counts[i]) / n;
        out.frequencies.p.push_back(f);
        out.se_p.push_back(se(f));
    }
    out.frequencies.p_e = static_cast<double>(counts.back()) / n;
    out.se_p_e = se(out.frequencies.p_e);
    return out;
}

} // namespace detail

/// Monte Carlo counterpart of outcomes_fading: state paths are sampled from
/// (q, P) and error events are Bernoulli with the path's error rate.
inline EmpiricalOutcome outcomes_fading_mc_check(const HarqConfig& cfg, const FsmcModel& model, std::uint64_t trials,
                                                 std::uint64_t seed)
{
    cfg.validate();
    model.validate(1e-9);
    if (trials < 10'000) throw domain_error("outcomes_fading_mc_check: need at least 10^4 trials");
    const std::size_t L = model.states();
    std::vector<double> q_cdf(L);
    std::vector<std::vector<double>> row_cdf(L, std::vector<double>(L));
    double acc = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        acc += model.q[l];
        q_cdf[l] = acc;
        double r = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            r += model.P(l, j);
            row_cdf[l][j] = r;
        }
    }
    detail::PathKernel kernel(cfg, model);
    Rng rng(derive_seed(seed, 0));
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(cfg.m) + 1, 0);
    std::vector<std::size_t> path(static_cast<std::size_t>(cfg.m));
    for (std::uint64_t t = 0; t < trials; ++t) {
        path[0] = detail::sample_index(q_cdf, rng.uniform() * acc);
        for (std::size_t r = 1; r < path.size(); ++r) {
            const auto& cdf = row_cdf[path[r - 1]];
            path[r] = detail::sample_index(cdf, rng.uniform() * cdf.back());
        }
        ++counts[static_cast<std::size_t>(detail::resolve_packet(kernel, path, rng.uniform()))];
    }
    return detail::tally(counts, trials);
}

} // namespace harq

#endif // HARQ_FADING_HPP
