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

#ifndef HARQ_FBL_HPP
#define HARQ_FBL_HPP

// Finite-blocklength error-rate kernels: Gaussian tail, channel dispersion and
// the normal-approximation packet error rate of chase-combining (CC) and
// incremental-redundancy (IR) HARQ after any number of combined rounds.

#include "harq/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace harq {

/// Linear SNR (power ratio).
struct SnrLinear {
    double value = 0.0;

    static SnrLinear from_db(double db) { return SnrLinear{std::pow(10.0, db / 10.0)}; }
    double db() const { return 10.0 * std::log10(value); }
};

/// (n, k) channel code: n symbols carry k information bits.
struct CodeParams {
    std::int64_t n = 0;
    std::int64_t k = 0;

    void validate() const
    {
        if (n < 1) throw domain_error("code: blocklength n must be >= 1, got " + std::to_string(n));
        if (k < 1) throw domain_error("code: information length k must be >= 1, got " + std::to_string(k));
    }
    double rate() const { return static_cast<double>(k) / static_cast<double>(n); }
};

/// Per-round SNRs and symbol counts of one IR-HARQ packet.
struct TransmissionRecord {
    std::vector<SnrLinear> snrs;
    std::vector<std::int64_t> lengths;

    void validate() const
    {
        if (snrs.empty()) throw domain_error("transmission record is empty");
        if (snrs.size() != lengths.size())
            throw domain_error("transmission record: snrs and lengths differ in size");
        for (auto len : lengths)
            if (len < 1) throw domain_error("transmission record: round length must be >= 1, got " + std::to_string(len));
    }
};

/// Normalization of the CC-HARQ Q-function argument.
/// `normalized` divides by sqrt(n V), matching the IR form at one round;
/// `unnormalized` divides by n sqrt(V).
enum class CcDenominator { normalized, unnormalized };

/// Unit of the channel dispersion inside the PER kernels. `bits` carries the
/// log2(e)^2 factor; `nats` omits it.
enum class DispersionUnit { bits, nats };

struct PerOptions {
    CcDenominator cc_denominator = CcDenominator::normalized;
    DispersionUnit dispersion = DispersionUnit::bits;

    friend bool operator==(const PerOptions&, const PerOptions&) = default;
};

inline constexpr double log2e_squared = std::numbers::log2e * std::numbers::log2e;

/// Gaussian tail probability Q(x) = P(Z > x), via erfc.
inline double q_function(double x)
{
    if (!std::isfinite(x)) throw domain_error("q_function: argument must be finite");
    return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0);
}

/// Channel dispersion V(γ) = (1 − (1+γ)^−2) log2²(e), in bits².
inline double channel_dispersion(SnrLinear gamma)
{
    if (!(gamma.value >= 0.0)) throw domain_error("channel_dispersion: SNR must be >= 0");
    const double a = 1.0 + gamma.value;
    return (1.0 - 1.0 / (a * a)) * log2e_squared;
}

inline double channel_dispersion(SnrLinear gamma, DispersionUnit unit)
{
    const double v = channel_dispersion(gamma);
    return unit == DispersionUnit::bits ? v : v / log2e_squared;
}

namespace detail {

inline double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

// Q(num / den). A zero denominator means zero dispersion, which only happens
// at zero SNR: the decoder succeeds iff the accumulated information covers k.
inline double tail_of_ratio(double numerator, double denominator, double info, double k)
{
    if (denominator <= 0.0) return info >= k ? 0.0 : 1.0;
    return clamp_probability(q_function(numerator / denominator));
}

inline void check_snr(SnrLinear g, const char* who)
{
    if (!(g.value >= 0.0) || !std::isfinite(g.value))
        throw domain_error(std::string(who) + ": SNR must be finite and >= 0");
}

} // namespace detail

/// CC-HARQ packet error rate after combining every round in `snrs` (MRC: the
/// effective SNR is the sum).
inline double per_cc(const CodeParams& code, std::span<const SnrLinear> snrs, const PerOptions& opt = {})
{
    code.validate();
    if (snrs.empty()) throw domain_error("per_cc: empty SNR list");
    double total = 0.0;
    for (auto g : snrs) {
        detail::check_snr(g, "per_cc");
        total += g.value;
    }
    const double n = static_cast<double>(code.n);
    const double num = n * std::log2(1.0 + total) - static_cast<double>(code.k) + std::log2(n);
    const double v = channel_dispersion(SnrLinear{total}, opt.dispersion);
    const double den = opt.cc_denominator == CcDenominator::normalized ? std::sqrt(n * v) : n * std::sqrt(v);
    return detail::tail_of_ratio(num, den, n * std::log2(1.0 + total), static_cast<double>(code.k));
}

/// Running sufficient statistics of the IR Q-argument, for callers that extend
/// one record round by round (path enumeration, Monte Carlo).
struct IrAccumulator {
    double info = 0.0;
    double dispersion = 0.0;
    double symbols = 0.0;

    void add(SnrLinear g, std::int64_t length, DispersionUnit unit)
    {
        const double len = static_cast<double>(length);
        info += len * std::log2(1.0 + g.value);
        dispersion += len * channel_dispersion(g, unit);
        symbols += len;
    }
    double per(const CodeParams& code) const
    {
        const double k = static_cast<double>(code.k);
        return detail::tail_of_ratio(info - k + std::log2(symbols), std::sqrt(dispersion), info, k);
    }
};

/// IR-HARQ packet error rate after the rounds in `record`.
inline double per_ir(const CodeParams& code, const TransmissionRecord& record, const PerOptions& opt = {})
{
    code.validate();
    record.validate();
    IrAccumulator acc;
    for (std::size_t i = 0; i < record.snrs.size(); ++i) {
        detail::check_snr(record.snrs[i], "per_ir");
        acc.add(record.snrs[i], record.lengths[i], opt.dispersion);
    }
    return acc.per(code);
}

} // namespace harq

#endif // HARQ_FBL_HPP
