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

#ifndef HARQ_OUTCOMES_HPP
#define HARQ_OUTCOMES_HPP

#include "harq/fbl.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace harq {

enum class Scheme { cc, ir };

inline const char* to_string(Scheme s) { return s == Scheme::cc ? "cc" : "ir"; }

/// HARQ protocol parameters. `taus[0]` is the first transmission (always 1);
/// `taus[i]` is the fraction of n sent in retransmission i.
struct HarqConfig {
    CodeParams code;
    Scheme scheme = Scheme::ir;
    int m = 1;
    std::vector<double> taus{1.0};
    bool nonincreasing_redundancy = false;
    PerOptions per{};

    static HarqConfig chase(CodeParams code, int m, PerOptions per = {})
    {
        return HarqConfig{code, Scheme::cc, m, std::vector<double>(static_cast<std::size_t>(std::max(m, 1)), 1.0), false, per};
    }

    static HarqConfig incremental(CodeParams code, std::vector<double> taus, PerOptions per = {})
    {
        const int m = static_cast<int>(taus.size());
        return HarqConfig{code, Scheme::ir, m, std::move(taus), false, per};
    }

    void validate() const
    {
        code.validate();
        if (m < 1) throw domain_error("harq: m must be >= 1");
        if (taus.size() != static_cast<std::size_t>(m))
            throw domain_error("harq: expected " + std::to_string(m) + " coefficients, got " + std::to_string(taus.size()));
        if (taus[0] != 1.0) throw domain_error("harq: tau_0 must be 1");
        for (std::size_t i = 0; i < taus.size(); ++i) {
            if (!(taus[i] > 0.0 && taus[i] <= 1.0)) {
                std::ostringstream os;
                os << "harq: tau_" << i << " = " << taus[i] << " outside (0, 1]";
                throw domain_error(os.str());
            }
            if (scheme == Scheme::cc && taus[i] != 1.0)
                throw domain_error("harq: chase combining repeats the whole packet, tau_i must be 1");
            if (nonincreasing_redundancy && i >= 2 && taus[i] > taus[i - 1])
                throw domain_error("harq: retransmission coefficients must be nonincreasing");
        }
    }

    /// Symbols per round, n_i = max(1, round(tau_i n)).
    std::vector<std::int64_t> round_lengths() const
    {
        std::vector<std::int64_t> out;
        out.reserve(taus.size());
        for (double t : taus)
            out.push_back(std::max<std::int64_t>(1, std::llround(t * static_cast<double>(code.n))));
        return out;
    }

    /// Slot cost of each round, n_i / n.
    std::vector<double> effective_taus() const
    {
        std::vector<double> out;
        for (auto len : round_lengths()) out.push_back(static_cast<double>(len) / static_cast<double>(code.n));
        return out;
    }
};

/// Packet error probability after the first `snrs.size()` rounds, using the
/// kernel selected by `cfg.scheme`.
inline double per_after_rounds(const HarqConfig& cfg, std::span<const SnrLinear> snrs)
{
    if (snrs.empty() || snrs.size() > static_cast<std::size_t>(cfg.m))
        throw domain_error("per_after_rounds: round count outside [1, m]");
    if (cfg.scheme == Scheme::cc) return per_cc(cfg.code, snrs, cfg.per);
    const auto lengths = cfg.round_lengths();
    TransmissionRecord rec{{snrs.begin(), snrs.end()}, {lengths.begin(), lengths.begin() + static_cast<std::ptrdiff_t>(snrs.size())}};
    return per_ir(cfg.code, rec, cfg.per);
}

/// Probabilities of every resolution event of one packet: success after
/// exactly i retransmissions (p[i], i = 0..m-1) or failure after all m rounds.
struct OutcomeDistribution {
    std::vector<double> p;
    double p_e = 0.0;

    double total() const { return std::accumulate(p.begin(), p.end(), 0.0) + p_e; }
    int rounds() const { return static_cast<int>(p.size()); }

    void validate(double tol = 1e-9) const
    {
        if (p.empty()) throw domain_error("outcome: no rounds");
        for (double x : p)
            if (!(x >= 0.0 && x <= 1.0)) throw domain_error("outcome: probability outside [0, 1]");
        if (!(p_e >= 0.0 && p_e <= 1.0)) throw domain_error("outcome: p_e outside [0, 1]");
        if (std::abs(total() - 1.0) > tol) throw domain_error("outcome: probabilities do not sum to 1");
    }
};

namespace detail {

// Floors telescoped differences at zero and puts the (tiny) defect on p_0 so
// the distribution sums to one.
inline OutcomeDistribution finalize_outcome(std::vector<double> p, double p_e)
{
    p_e = clamp_probability(p_e);
    double rest = p_e;
    for (std::size_t i = 1; i < p.size(); ++i) {
        p[i] = clamp_probability(p[i]);
        rest += p[i];
    }
    p[0] = clamp_probability(1.0 - rest);
    return OutcomeDistribution{std::move(p), p_e};
}

} // namespace detail

/// Outcome distribution from the error probabilities after 1..m rounds
/// (eps[i] is the PER with i+1 rounds combined).
inline OutcomeDistribution outcomes_from_error_sequence(std::span<const double> eps)
{
    if (eps.empty()) throw domain_error("outcomes: empty error sequence");
    std::vector<double> p(eps.size());
    p[0] = 1.0 - eps[0];
    for (std::size_t i = 1; i < eps.size(); ++i) p[i] = eps[i - 1] - eps[i];
    return detail::finalize_outcome(std::move(p), eps.back());
}

/// AWGN channel: every round sees the same SNR.
inline OutcomeDistribution outcomes_awgn(const HarqConfig& cfg, SnrLinear gamma)
{
    cfg.validate();
    detail::check_snr(gamma, "outcomes_awgn");
    const std::vector<SnrLinear> snrs(static_cast<std::size_t>(cfg.m), gamma);
    std::vector<double> eps;
    for (int i = 1; i <= cfg.m; ++i)
        eps.push_back(per_after_rounds(cfg, std::span<const SnrLinear>(snrs.data(), static_cast<std::size_t>(i))));
    return outcomes_from_error_sequence(eps);
}

/// Expected slots consumed per packet (first transmission = 1 slot).
inline double expected_slots(const HarqConfig& cfg, const OutcomeDistribution& outcome)
{
    const auto tau = cfg.effective_taus();
    if (outcome.p.size() != tau.size()) throw domain_error("throughput: outcome and config disagree on m");
    double slots = outcome.p[0];
    double cum = tau[0];
    for (std::size_t i = 1; i < tau.size(); ++i) {
        cum += tau[i];
        slots += outcome.p[i] * cum;
    }
    return slots + outcome.p_e * cum;
}

/// Delivered information bits per channel symbol.
inline double throughput(const HarqConfig& cfg, const OutcomeDistribution& outcome)
{
    const double slots = expected_slots(cfg, outcome);
    if (!(slots > 0.0)) throw std::logic_error("throughput: nonpositive expected slot count");
    return cfg.code.rate() * (1.0 - outcome.p_e) / slots;
}

} // namespace harq

#endif // HARQ_OUTCOMES_HPP
