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

#ifndef HARQ_MONTECARLO_HPP
#define HARQ_MONTECARLO_HPP

// Stochastic reference for the analytic models: Clarke sum-of-sinusoids
// fading traces, empirical FSMC statistics and packet-level HARQ simulation.

#include "harq/delay.hpp"
#include "harq/error.hpp"
#include "harq/fading.hpp"
#include "harq/fsmc.hpp"
#include "harq/outcomes.hpp"
#include "harq/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

namespace harq {

struct TraceOptions {
    int oscillators = 512;
};

/// Complex channel gains sampled once per time block, unit mean power.
struct FadingTrace {
    std::vector<std::complex<double>> samples;
    double f_d = 0.0;
    double t_tb = 0.0;
    std::uint64_t seed = 0;
    int oscillators = 0;

    std::size_t size() const { return samples.size(); }
};

namespace detail {

// One Clarke realization: equal-power oscillators with uniform arrival angles
// and phases. Evaluated in closed form at any block index.
class SumOfSinusoids {
public:
    SumOfSinusoids(double f_d, double t_tb, int oscillators, std::uint64_t seed)
        : scale_(1.0 / std::sqrt(static_cast<double>(oscillators)))
    {
        if (oscillators < 1) throw domain_error("trace: need at least one oscillator");
        Rng rng(seed);
        const double two_pi = 2.0 * std::numbers::pi;
        for (int k = 0; k < oscillators; ++k) {
            const double angle = two_pi * rng.uniform();
            phase_.push_back(two_pi * rng.uniform());
            step_.push_back(two_pi * f_d * t_tb * std::cos(angle));
        }
    }

    std::complex<double> at(std::uint64_t block) const
    {
        std::complex<double> acc{0.0, 0.0};
        const double t = static_cast<double>(block);
        for (std::size_t k = 0; k < phase_.size(); ++k) acc += std::polar(1.0, phase_[k] + step_[k] * t);
        return acc * scale_;
    }

    // Consecutive blocks [first, first + count) by phasor rotation, re-anchored
    // periodically against the closed form.
    void fill(std::uint64_t first, std::span<std::complex<double>> out) const
    {
        constexpr std::size_t reanchor = 1024;
        const std::size_t K = phase_.size();
        std::vector<std::complex<double>> z(K);
        std::vector<std::complex<double>> rot(K);
        for (std::size_t k = 0; k < K; ++k) rot[k] = std::polar(1.0, step_[k]);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (i % reanchor == 0) {
                const double t = static_cast<double>(first + i);
                for (std::size_t k = 0; k < K; ++k) z[k] = std::polar(1.0, phase_[k] + step_[k] * t);
            }
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t k = 0; k < K; ++k) {
                acc += z[k];
                z[k] *= rot[k];
            }
            out[i] = acc * scale_;
        }
    }

private:
    double scale_;
    std::vector<double> phase_;
    std::vector<double> step_;
};

} // namespace detail

/// Correlated Rayleigh trace with autocorrelation J0(2 pi f_d t), sampled
/// every t_tb seconds.
inline FadingTrace generate_trace(double f_d, double t_tb, std::size_t length, std::uint64_t seed, const TraceOptions& opt = {})
{
    if (length < 1) throw domain_error("generate_trace: length must be >= 1");
    if (!(f_d >= 0.0) || !(t_tb > 0.0)) throw domain_error("generate_trace: need f_d >= 0 and t_tb > 0");
    FadingTrace trace{std::vector<std::complex<double>>(length), f_d, t_tb, seed, opt.oscillators};
    detail::SumOfSinusoids(f_d, t_tb, opt.oscillators, seed).fill(0, trace.samples);
    return trace;
}

/// Real part of the empirical autocorrelation at `lag` blocks.
inline double trace_autocorrelation(const FadingTrace& trace, std::size_t lag)
{
    if (lag >= trace.size()) throw domain_error("trace_autocorrelation: lag exceeds trace length");
    long double acc = 0.0L;
    for (std::size_t i = 0; i + lag < trace.size(); ++i) acc += std::real(trace.samples[i + lag] * std::conj(trace.samples[i]));
    return static_cast<double>(acc / static_cast<long double>(trace.size() - lag));
}

struct AutocorrelationCheck {
    double estimate = 0.0;
    double standard_error = 0.0;
    double expected = 0.0; // J0(2 pi f_d t_tb lag)

    bool within(double sigmas) const { return std::abs(estimate - expected) <= sigmas * standard_error; }
};

/// Autocorrelation at `lag` pooled over independent realizations; the
/// standard error is the spread of per-realization estimates.
inline AutocorrelationCheck autocorrelation_check(double f_d, double t_tb, std::size_t realizations, std::size_t length, std::size_t lag,
                                                  std::uint64_t seed, const TraceOptions& opt = {})
{
    if (realizations < 2) throw domain_error("autocorrelation_check: need at least two realizations");
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    for (std::size_t r = 0; r < realizations; ++r) {
        const double est = trace_autocorrelation(generate_trace(f_d, t_tb, length, derive_seed(seed, r), opt), lag);
        sum += est;
        sum_sq += static_cast<long double>(est) * est;
    }
    const long double n = static_cast<long double>(realizations);
    const long double mean = sum / n;
    const long double var = (sum_sq - n * mean * mean) / (n - 1.0L);
    AutocorrelationCheck out;
    out.estimate = static_cast<double>(mean);
    out.standard_error = std::sqrt(std::max(0.0, static_cast<double>(var / n)));
    out.expected = std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * f_d * t_tb * static_cast<double>(lag));
    return out;
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t samples = 0;
};

/// Asymptotic Kolmogorov tail probability with the Stephens small-sample
/// correction.
inline double kolmogorov_p_value(double d, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-3) return 1.0;
    double p = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

/// One-sample KS test of envelope amplitudes against the unit-power Rayleigh
/// CDF 1 - exp(-x^2).
inline KsResult ks_rayleigh(std::vector<double> envelope)
{
    if (envelope.empty()) throw domain_error("ks_rayleigh: no samples");
    std::sort(envelope.begin(), envelope.end());
    const double n = static_cast<double>(envelope.size());
    double d = 0.0;
    for (std::size_t i = 0; i < envelope.size(); ++i) {
        const double f = 1.0 - std::exp(-envelope[i] * envelope[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return KsResult{d, kolmogorov_p_value(d, envelope.size()), envelope.size()};
}

/// Envelope samples from independent realizations, each observed at a
/// uniformly random block index (the KS test needs independent draws).
inline std::vector<double> independent_envelope_samples(double f_d, double t_tb, std::size_t count, std::uint64_t seed,
                                                         const TraceOptions& opt = {}, std::uint64_t horizon = 1u << 20)
{
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t s = derive_seed(seed, i);
        const std::uint64_t block = Rng(s ^ 0x5bd1e995ULL).bits() % horizon;
        out.push_back(std::abs(detail::SumOfSinusoids(f_d, t_tb, opt.oscillators, s).at(block)));
    }
    return out;
}

/// Empirical FSMC statistics of a quantized trace.
struct FsmcValidation {
    std::vector<double> q;           // empirical occupancy
    std::vector<double> q_se;        // batch-means standard error
    std::vector<double> transitions; // L x L empirical one-step frequencies
    std::vector<double> transitions_se;
    std::vector<bool> q_flag; // |empirical - model| > 3 SE
    std::vector<bool> transition_flag;
    double skip_fraction = 0.0; // share of steps jumping more than one state
    std::size_t flagged = 0;
};

inline std::size_t quantize_state(const FsmcModel& model, double envelope)
{
    const auto it = std::upper_bound(model.thresholds.begin() + 1, model.thresholds.end() - 1, envelope);
    return static_cast<std::size_t>(it - (model.thresholds.begin() + 1));
}

inline FsmcValidation validate_fsmc(const FsmcModel& model, const FadingTrace& trace, std::size_t batches = 100)
{
    const std::size_t L = model.states();
    if (trace.size() < 2 * batches) throw domain_error("validate_fsmc: trace too short");
    std::vector<std::size_t> state(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) state[i] = quantize_state(model, std::abs(trace.samples[i]));

    FsmcValidation v;
    v.q.assign(L, 0.0);
    v.q_se.assign(L, 0.0);
    const std::size_t per_batch = trace.size() / batches;
    std::vector<std::vector<double>> batch_q(batches, std::vector<double>(L, 0.0));
    for (std::size_t b = 0; b < batches; ++b)
        for (std::size_t i = b * per_batch; i < (b + 1) * per_batch; ++i) batch_q[b][state[i]] += 1.0 / static_cast<double>(per_batch);
    for (std::size_t l = 0; l < L; ++l) {
        double mean = 0.0;
        for (const auto& bq : batch_q) mean += bq[l];
        mean /= static_cast<double>(batches);
        double var = 0.0;
        for (const auto& bq : batch_q) var += (bq[l] - mean) * (bq[l] - mean);
        var /= static_cast<double>(batches - 1);
        v.q[l] = mean;
        v.q_se[l] = std::sqrt(var / static_cast<double>(batches));
    }

    std::vector<double> counts(L * L, 0.0);
    std::vector<double> from(L, 0.0);
    std::size_t skips = 0;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        counts[state[i] * L + state[i + 1]] += 1.0;
        from[state[i]] += 1.0;
        if (state[i] > state[i + 1] + 1 || state[i + 1] > state[i] + 1) ++skips;
    }
    v.skip_fraction = static_cast<double>(skips) / static_cast<double>(trace.size() - 1);
    v.transitions.assign(L * L, 0.0);
    v.transitions_se.assign(L * L, 0.0);
    v.transition_flag.assign(L * L, false);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) {
            if (from[i] == 0.0) continue;
            const double f = counts[i * L + j] / from[i];
            const double ref = model.P(i, j);
            v.transitions[i * L + j] = f;
            v.transitions_se[i * L + j] = std::sqrt(std::max(ref * (1.0 - ref), f * (1.0 - f)) / from[i]);
            v.transition_flag[i * L + j] = std::abs(f - ref) > 3.0 * v.transitions_se[i * L + j];
        }
    v.q_flag.assign(L, false);
    for (std::size_t l = 0; l < L; ++l) v.q_flag[l] = std::abs(v.q[l] - model.q[l]) > 3.0 * v.q_se[l];
    v.flagged = static_cast<std::size_t>(std::count(v.q_flag.begin(), v.q_flag.end(), true) +
                                         std::count(v.transition_flag.begin(), v.transition_flag.end(), true));
    return v;
}

/// A trace plus the average SNR it is scaled to.
struct TraceChannel {
    const FadingTrace* trace = nullptr;
    SnrLinear avg_snr;
};

using SimChannel = std::variant<SnrLinear, TraceChannel>;

/// Where each packet's first round falls on the trace: right after the
/// previous packet (`continuous`) or at an independent uniform block (`iid`).
enum class PacketStart { continuous, iid };

struct SimResult {
    EmpiricalOutcome outcome;
    double throughput = 0.0;
    double throughput_se = 0.0;
    double mean_slots = 0.0;
    DelayPmf delay; // single-packet delay histogram
    std::uint64_t packets = 0;
};

/// Packet-level HARQ simulation. Each round occupies one time block; its
/// error event is decided by one uniform per packet against the running
/// error probability at the realized SNRs.
inline SimResult simulate_harq(const HarqConfig& cfg, const SimChannel& channel, std::uint64_t packets, std::uint64_t seed,
                               PacketStart start = PacketStart::continuous)
{
    cfg.validate();
    if (packets < 1000) throw domain_error("simulate_harq: need at least 10^3 packets");
    const std::size_t m = static_cast<std::size_t>(cfg.m);
    detail::RoundCombiner combiner(cfg);
    Rng rng(derive_seed(seed, 1));

    const FadingTrace* trace = nullptr;
    SnrLinear snr{};
    if (const auto* g = std::get_if<SnrLinear>(&channel)) {
        detail::check_snr(*g, "simulate_harq");
        snr = *g;
    } else {
        const auto& tc = std::get<TraceChannel>(channel);
        if (!tc.trace) throw domain_error("simulate_harq: missing trace");
        trace = tc.trace;
        snr = tc.avg_snr;
        if (start == PacketStart::iid && trace->size() < m)
            throw resource_error("simulate_harq: trace shorter than one packet");
    }

    std::vector<double> awgn_eps;
    if (!trace) {
        detail::PathStatistic s;
        for (std::size_t r = 0; r < m; ++r) {
            s = combiner.extend(s, snr, static_cast<int>(r));
            awgn_eps.push_back(combiner.per(s));
        }
    }

    const auto lengths = cfg.round_lengths();
    std::vector<std::int64_t> cum_symbols(m);
    std::partial_sum(lengths.begin(), lengths.end(), cum_symbols.begin());

    std::vector<std::uint64_t> counts(m + 1, 0);
    std::size_t cursor = 0;
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::uint64_t pkt = 0; pkt < packets; ++pkt) {
        const double u = rng.uniform();
        std::size_t resolved = m;
        if (!trace) {
            for (std::size_t r = 0; r < m; ++r)
                if (u >= awgn_eps[r]) {
                    resolved = r;
                    break;
                }
        } else {
            if (start == PacketStart::iid) cursor = static_cast<std::size_t>(rng.bits() % (trace->size() - m + 1));
            detail::PathStatistic s;
            for (std::size_t r = 0; r < m; ++r) {
                if (cursor >= trace->size())
                    throw resource_error("simulate_harq: trace of " + std::to_string(trace->size()) + " blocks is too short for " +
                                         std::to_string(packets) + " packets");
                const SnrLinear g{snr.value * std::norm(trace->samples[cursor++])};
                s = combiner.extend(s, g, static_cast<int>(r));
                if (u >= combiner.per(s)) {
                    resolved = r;
                    break;
                }
            }
        }
        ++counts[resolved];
        const double x = resolved < m ? 1.0 : 0.0;
        const double y = static_cast<double>(cum_symbols[std::min(resolved, m - 1)]) / static_cast<double>(cfg.code.n);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }

    SimResult res;
    res.packets = packets;
    res.outcome = detail::tally(counts, packets);
    const long double n = static_cast<long double>(packets);
    const long double mx = sx / n, my = sy / n;
    const long double vx = sxx / n - mx * mx, vy = syy / n - my * my, cxy = sxy / n - mx * my;
    const long double ratio = mx / my;
    res.mean_slots = static_cast<double>(my);
    res.throughput = cfg.code.rate() * static_cast<double>(ratio);
    const long double var_ratio = (vx - 2.0L * ratio * cxy + ratio * ratio * vy) / (my * my * n);
    res.throughput_se = cfg.code.rate() * std::sqrt(std::max(0.0, static_cast<double>(var_ratio)));

    std::map<std::int64_t, double> atoms;
    for (std::size_t r = 0; r <= m; ++r)
        if (counts[r] > 0) atoms[cum_symbols[std::min(r, m - 1)]] += static_cast<double>(counts[r]) / static_cast<double>(packets);
    res.delay.denominator = cfg.code.n;
    for (auto [num, w] : atoms) {
        res.delay.numerators.push_back(num);
        res.delay.mass.push_back(w);
    }
    return res;
}

} // namespace harq

#endif // HARQ_MONTECARLO_HPP
