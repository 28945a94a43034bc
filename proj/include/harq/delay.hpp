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

#ifndef HARQ_DELAY_HPP
#define HARQ_DELAY_HPP

// Delay distributions in slots. A slot is the airtime of one full n-symbol
// codeword; a round of n_i symbols costs n_i / n slots, so every support point
// is an exact multiple of 1/n and is stored as an integer numerator.

#include "harq/error.hpp"
#include "harq/outcomes.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace harq {

struct DelayPmf {
    std::int64_t denominator = 1;         // lattice units per slot
    std::vector<std::int64_t> numerators; // strictly increasing
    std::vector<double> mass;
    double pruned_mass = 0.0; // probability dropped by the atom budget

    std::size_t size() const { return mass.size(); }
    double support(std::size_t i) const { return static_cast<double>(numerators[i]) / static_cast<double>(denominator); }

    double total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

    double mean() const
    {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < size(); ++i) acc += static_cast<long double>(mass[i]) * numerators[i];
        return static_cast<double>(acc / static_cast<long double>(denominator));
    }

    /// Mass at the support point numerator/denominator (0 when absent).
    double at(std::int64_t numerator) const
    {
        const auto it = std::lower_bound(numerators.begin(), numerators.end(), numerator);
        return it != numerators.end() && *it == numerator ? mass[static_cast<std::size_t>(it - numerators.begin())] : 0.0;
    }
};

struct DelayOptions {
    std::size_t atom_budget = 1'000'000;
    double prune_below = 1e-15;
};

/// Delay of one packet: one slot for the first round plus the slot cost of
/// each retransmission used. Success in the last round and exhaustion share a
/// support point.
inline DelayPmf single_packet_delay(const HarqConfig& cfg, const OutcomeDistribution& outcome)
{
    cfg.validate();
    if (outcome.p.size() != static_cast<std::size_t>(cfg.m)) throw domain_error("single_packet_delay: outcome and config disagree on m");
    std::map<std::int64_t, double> atoms;
    std::int64_t cum = 0;
    const auto lengths = cfg.round_lengths();
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        cum += lengths[i];
        atoms[cum] += outcome.p[i];
    }
    atoms[cum] += outcome.p_e;
    DelayPmf pmf;
    pmf.denominator = cfg.code.n;
    for (auto [num, w] : atoms) {
        pmf.numerators.push_back(num);
        pmf.mass.push_back(w);
    }
    return pmf;
}

namespace detail {

// Masses on base + stride * index.
struct Lattice {
    std::int64_t base = 0;
    std::int64_t stride = 1;
    std::vector<long double> mass;
};

inline Lattice to_lattice(const DelayPmf& pmf)
{
    Lattice lat;
    lat.base = pmf.numerators.front();
    std::int64_t g = 0;
    for (auto num : pmf.numerators) g = std::gcd(g, num - lat.base);
    lat.stride = g == 0 ? 1 : g;
    lat.mass.assign(static_cast<std::size_t>((pmf.numerators.back() - lat.base) / lat.stride) + 1, 0.0L);
    for (std::size_t i = 0; i < pmf.size(); ++i)
        lat.mass[static_cast<std::size_t>((pmf.numerators[i] - lat.base) / lat.stride)] += pmf.mass[i];
    return lat;
}

inline void trim(Lattice& lat, long double below, long double& pruned)
{
    std::size_t first = 0;
    while (first + 1 < lat.mass.size() && lat.mass[first] <= below) pruned += lat.mass[first++];
    std::size_t last = lat.mass.size();
    while (last > first + 1 && lat.mass[last - 1] <= below) pruned += lat.mass[--last];
    if (first > 0 || last < lat.mass.size()) {
        lat.mass = std::vector<long double>(lat.mass.begin() + static_cast<std::ptrdiff_t>(first),
                                            lat.mass.begin() + static_cast<std::ptrdiff_t>(last));
        lat.base += static_cast<std::int64_t>(first) * lat.stride;
    }
}

inline Lattice convolve(const Lattice& a, const Lattice& b, const DelayOptions& opt, long double& pruned)
{
    Lattice out;
    out.base = a.base + b.base;
    out.stride = a.stride;
    out.mass.assign(a.mass.size() + b.mass.size() - 1, 0.0L);
    for (std::size_t i = 0; i < a.mass.size(); ++i) {
        const long double ai = a.mass[i];
        if (ai == 0.0L) continue;
        for (std::size_t j = 0; j < b.mass.size(); ++j) out.mass[i + j] += ai * b.mass[j];
    }
    long double dropped = 0.0L;
    trim(out, 0.0L, dropped);
    if (out.mass.size() > opt.atom_budget) {
        trim(out, static_cast<long double>(opt.prune_below), pruned);
        if (out.mass.size() > opt.atom_budget)
            throw resource_error("stream_delay: support of " + std::to_string(out.mass.size()) + " atoms exceeds the budget of " +
                                 std::to_string(opt.atom_budget) + "; coarsen the retransmission grid");
    }
    return out;
}

inline DelayPmf from_lattice(const Lattice& lat, std::int64_t denominator, double pruned)
{
    DelayPmf pmf;
    pmf.denominator = denominator;
    pmf.pruned_mass = pruned;
    for (std::size_t i = 0; i < lat.mass.size(); ++i) {
        if (lat.mass[i] == 0.0L) continue;
        pmf.numerators.push_back(lat.base + static_cast<std::int64_t>(i) * lat.stride);
        pmf.mass.push_back(static_cast<double>(lat.mass[i]));
    }
    return pmf;
}

} // namespace detail

/// Convolution of two delay PMFs on the same lattice.
inline DelayPmf convolve(const DelayPmf& a, const DelayPmf& b)
{
    if (a.denominator != b.denominator) throw domain_error("convolve: PMFs use different lattices");
    std::map<std::int64_t, long double> acc;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) acc[a.numerators[i] + b.numerators[j]] += static_cast<long double>(a.mass[i]) * b.mass[j];
    DelayPmf out;
    out.denominator = a.denominator;
    out.pruned_mass = a.pruned_mass + b.pruned_mass;
    for (auto [num, w] : acc) {
        out.numerators.push_back(num);
        out.mass.push_back(static_cast<double>(w));
    }
    return out;
}

/// Total delay of `packets` back-to-back packets: the packets-fold
/// convolution of the single-packet PMF, computed by repeated squaring.
inline DelayPmf stream_delay(const DelayPmf& pmf, std::int64_t packets, const DelayOptions& opt = {})
{
    if (packets < 1) throw domain_error("stream_delay: need at least one packet");
    if (pmf.size() == 0) throw domain_error("stream_delay: empty PMF");
    long double pruned = 0.0L;
    detail::Lattice power = detail::to_lattice(pmf);
    detail::Lattice result;
    bool have_result = false;
    for (std::int64_t e = packets;;) {
        if (e & 1) {
            result = have_result ? detail::convolve(result, power, opt, pruned) : power;
            have_result = true;
        }
        e >>= 1;
        if (e == 0) break;
        power = detail::convolve(power, power, opt, pruned);
    }
    return detail::from_lattice(result, pmf.denominator, static_cast<double>(pruned));
}

/// P(D >= d) at every support point, followed by a closing zero one lattice
/// step past the largest delay.
inline std::vector<std::pair<double, double>> delay_ccdf(const DelayPmf& pmf)
{
    std::vector<std::pair<double, double>> out;
    if (pmf.size() == 0) return out;
    long double tail = 0.0L;
    std::vector<double> at_least(pmf.size());
    for (std::size_t i = pmf.size(); i-- > 0;) {
        tail += pmf.mass[i];
        at_least[i] = std::min(1.0, static_cast<double>(tail));
    }
    for (std::size_t i = 0; i < pmf.size(); ++i) out.emplace_back(pmf.support(i), at_least[i]);
    out.emplace_back(pmf.support(pmf.size() - 1) + 1.0 / static_cast<double>(pmf.denominator), 0.0);
    return out;
}

/// CCDF of the per-packet delay overhead (D - N) / N of an N-packet stream.
inline std::vector<std::pair<double, double>> overhead_ccdf(const DelayPmf& stream, std::int64_t packets)
{
    if (packets < 1) throw domain_error("overhead_ccdf: need at least one packet");
    auto out = delay_ccdf(stream);
    const double n = static_cast<double>(packets);
    for (auto& [x, p] : out) x = (x - n) / n;
    return out;
}

} // namespace harq

#endif // HARQ_DELAY_HPP
