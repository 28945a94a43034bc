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

#ifndef HARQ_FSMC_HPP
#define HARQ_FSMC_HPP

// Time-block finite-state Markov channel for a Rayleigh envelope with unit
// mean power (pdf 2x exp(-x^2)). The envelope axis is cut into L states by
// equal-duration partitioning; adjacent-state transitions follow from the
// level-crossing rates of a Clarke spectrum.

#include "harq/error.hpp"
#include "harq/fbl.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace harq {

inline constexpr double infinite_amplitude = std::numeric_limits<double>::infinity();

struct DopplerSpec {
    double f_d = 0.0;  // Hz
    double t_tb = 0.0; // s

    double normalized() const { return f_d * t_tb; }

    void validate() const
    {
        if (!(f_d > 0.0) || !std::isfinite(f_d)) throw domain_error("doppler: f_d must be > 0");
        if (!(t_tb > 0.0) || !std::isfinite(t_tb)) throw domain_error("doppler: t_tb must be > 0");
    }
};

/// Expected envelope crossings of level `eta` per second.
inline double level_crossing_rate(double eta, double f_d)
{
    if (!(eta >= 0.0)) throw domain_error("level_crossing_rate: eta must be >= 0");
    if (!(f_d > 0.0)) throw domain_error("level_crossing_rate: f_d must be > 0");
    if (std::isinf(eta)) return 0.0;
    return std::sqrt(2.0 * std::numbers::pi) * eta * f_d * std::exp(-eta * eta);
}

namespace detail {

inline void check_interval(double lo, double hi, const char* who)
{
    if (!(lo >= 0.0) || !(hi > lo) || std::isinf(lo))
        throw domain_error(std::string(who) + ": need 0 <= lo < hi <= inf");
}

inline double tail_mass(double x) { return std::isinf(x) ? 0.0 : std::exp(-x * x); }

// exp(-x^2) (x^2 + 1), the tail of E[x^2] under the Rayleigh density.
inline double tail_power(double x) { return std::isinf(x) ? 0.0 : std::exp(-x * x) * (x * x + 1.0); }

} // namespace detail

/// Probability that the envelope lies in [lo, hi).
inline double marginal_probability(double lo, double hi)
{
    detail::check_interval(lo, hi, "marginal_probability");
    return detail::tail_mass(lo) - detail::tail_mass(hi);
}

/// Mean SNR of the envelope conditioned on [lo, hi).
inline SnrLinear state_snr(double lo, double hi, SnrLinear avg_snr)
{
    detail::check_interval(lo, hi, "state_snr");
    if (!(avg_snr.value > 0.0)) throw domain_error("state_snr: average SNR must be > 0");
    const double mass = detail::tail_mass(lo) - detail::tail_mass(hi);
    return SnrLinear{avg_snr.value * (detail::tail_power(lo) - detail::tail_power(hi)) / mass};
}

/// Expected sojourn time in [lo, hi) in units of 1/f_D.
inline double normalized_state_duration(double lo, double hi)
{
    const double rates = level_crossing_rate(lo, 1.0) + level_crossing_rate(hi, 1.0);
    return (detail::tail_mass(lo) - detail::tail_mass(hi)) / rates;
}

/// Envelope thresholds giving L states of equal expected duration.
struct EqualDurationPartition {
    std::vector<double> thresholds; // L + 1 entries, 0 ... +inf
    double duration = 0.0;          // common state duration times f_D
};

namespace detail {

// Smallest b > a with normalized_state_duration(a, b) == target.
inline std::optional<double> next_threshold(double a, double target)
{
    constexpr double step = 0.02;
    constexpr double reach = 12.0;
    double lo = a;
    double hi = a;
    for (;;) {
        hi = lo + step;
        if (hi > a + reach) return std::nullopt;
        if (normalized_state_duration(a, hi) >= target) break;
        lo = hi;
    }
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (normalized_state_duration(a, mid) >= target ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

// Last-state duration minus target after placing L-1 thresholds left to
// right; -inf when the target is too long to fit.
inline double closing_residual(int states, double target, std::vector<double>* thresholds)
{
    std::vector<double> th{0.0};
    for (int l = 0; l < states - 1; ++l) {
        auto b = next_threshold(th.back(), target);
        if (!b) return -std::numeric_limits<double>::infinity();
        th.push_back(*b);
    }
    const double residual = normalized_state_duration(th.back(), infinite_amplitude) - target;
    th.push_back(infinite_amplitude);
    if (thresholds) *thresholds = std::move(th);
    return residual;
}

} // namespace detail

/// Solves for the equal-duration thresholds of an L-state partition by nested
/// bisection: thresholds are placed left to right for a trial duration, and the
/// duration is adjusted until the last (unbounded) state closes.
inline EqualDurationPartition equal_duration_partition(int states)
{
    if (states < 2) throw domain_error("equal_duration_partition: need at least 2 states");
    double lo = 1e-8; // residual > 0
    double hi = 10.0; // residual < 0
    if (!(detail::closing_residual(states, lo, nullptr) > 0.0) || !(detail::closing_residual(states, hi, nullptr) < 0.0))
        throw numerical_error("equal_duration_partition: could not bracket the state duration for L = " + std::to_string(states));
    int it = 0;
    for (; it < 400 && hi / lo - 1.0 > 1e-15; ++it) {
        const double mid = std::sqrt(lo * hi);
        (detail::closing_residual(states, mid, nullptr) > 0.0 ? lo : hi) = mid;
    }
    if (hi / lo - 1.0 > 1e-12) throw numerical_error("equal_duration_partition: duration bisection did not converge");
    EqualDurationPartition out;
    out.duration = lo;
    detail::closing_residual(states, lo, &out.thresholds);
    return out;
}

/// Built channel model. Plain immutable value; all vectors are indexed by
/// state 0..L-1.
struct FsmcModel {
    DopplerSpec doppler;
    SnrLinear avg_snr;
    std::vector<double> thresholds;  // L + 1, thresholds[L] = +inf
    std::vector<double> q;           // marginal state probabilities
    std::vector<double> transitions; // L x L row-major, tridiagonal
    std::vector<SnrLinear> state_snrs;
    double c = 0.0; // state duration / t_tb

    std::size_t states() const { return q.size(); }
    double P(std::size_t from, std::size_t to) const { return transitions[from * states() + to]; }
    double state_duration(std::size_t l) const
    {
        return marginal_probability(thresholds[l], thresholds[l + 1]) /
               (level_crossing_rate(thresholds[l], doppler.f_d) + level_crossing_rate(thresholds[l + 1], doppler.f_d));
    }

    /// Checks the structural invariants; throws construction_error on failure.
    void validate(double tol = 1e-12) const
    {
        const std::size_t L = states();
        if (L < 1 || thresholds.size() != L + 1 || transitions.size() != L * L || state_snrs.size() != L)
            throw construction_error("fsmc: inconsistent dimensions");
        for (std::size_t l = 0; l < L; ++l)
            if (!(thresholds[l + 1] > thresholds[l])) throw construction_error("fsmc: thresholds not strictly increasing");
        double qsum = 0.0;
        for (double x : q) qsum += x;
        if (std::abs(qsum - 1.0) > tol) throw construction_error("fsmc: marginal probabilities do not sum to 1");
        for (std::size_t i = 0; i < L; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < L; ++j) {
                const double p = P(i, j);
                if (!(p >= 0.0 && p <= 1.0)) throw construction_error("fsmc: transition probability outside [0, 1]");
                if ((i > j + 1 || j > i + 1) && p != 0.0) throw construction_error("fsmc: transition matrix is not tridiagonal");
                row += p;
            }
            if (std::abs(row - 1.0) > tol) throw construction_error("fsmc: transition row " + std::to_string(i + 1) + " does not sum to 1");
        }
    }
};

/// Per-state slack of the time-block bound: state duration minus t_tb.
inline std::vector<double> validate_tb_bound(const FsmcModel& model)
{
    std::vector<double> slack;
    for (std::size_t l = 0; l < model.states(); ++l) slack.push_back(model.state_duration(l) - model.doppler.t_tb);
    return slack;
}

namespace detail {

inline void fill_state_snrs(FsmcModel& m)
{
    m.state_snrs.clear();
    for (std::size_t l = 0; l < m.states(); ++l) m.state_snrs.push_back(state_snr(m.thresholds[l], m.thresholds[l + 1], m.avg_snr));
}

} // namespace detail

/// Builds the chain on explicit thresholds (0 = first, +inf = last).
inline FsmcModel build_from_thresholds(std::vector<double> thresholds, DopplerSpec doppler, SnrLinear avg_snr)
{
    doppler.validate();
    if (!(avg_snr.value > 0.0)) throw domain_error("fsmc: average SNR must be > 0");
    if (thresholds.size() < 2 || thresholds.front() != 0.0 || !std::isinf(thresholds.back()))
        throw domain_error("fsmc: thresholds must run from 0 to +inf");
    FsmcModel m;
    m.doppler = doppler;
    m.avg_snr = avg_snr;
    m.thresholds = std::move(thresholds);
    const std::size_t L = m.thresholds.size() - 1;
    for (std::size_t l = 0; l < L; ++l) m.q.push_back(marginal_probability(m.thresholds[l], m.thresholds[l + 1]));

    const auto slack = [&] {
        std::vector<double> s;
        for (std::size_t l = 0; l < L; ++l) s.push_back(m.state_duration(l) - doppler.t_tb);
        return s;
    }();
    for (std::size_t l = 0; l < L; ++l) {
        if (slack[l] < 0.0) {
            std::ostringstream os;
            os << "fsmc: time block " << doppler.t_tb << " s exceeds the mean duration of state " << l + 1 << " ("
               << m.state_duration(l) << " s)";
            throw construction_error(os.str());
        }
    }

    m.transitions.assign(L * L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        double out = 0.0;
        if (l + 1 < L) {
            const double up = level_crossing_rate(m.thresholds[l + 1], doppler.f_d) * doppler.t_tb / m.q[l];
            m.transitions[l * L + l + 1] = up;
            out += up;
        }
        if (l > 0) {
            const double down = level_crossing_rate(m.thresholds[l], doppler.f_d) * doppler.t_tb / m.q[l];
            m.transitions[l * L + l - 1] = down;
            out += down;
        }
        m.transitions[l * L + l] = 1.0 - out;
    }
    detail::fill_state_snrs(m);
    double shortest = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < L; ++l) shortest = std::min(shortest, m.state_duration(l));
    m.c = shortest / doppler.t_tb;
    return m;
}

/// Equal-duration FSMC with L states.
inline FsmcModel build_equal_duration(int states, DopplerSpec doppler, SnrLinear avg_snr)
{
    doppler.validate();
    auto part = equal_duration_partition(states);
    return build_from_thresholds(std::move(part.thresholds), doppler, avg_snr);
}

/// Equal-duration FSMC whose packets-per-state parameter c is closest to
/// `target_c` (scans L upward; c decreases with L).
inline FsmcModel build_for_target_c(double target_c, DopplerSpec doppler, SnrLinear avg_snr, int max_states = 128)
{
    doppler.validate();
    if (!(target_c >= 1.0)) throw domain_error("fsmc: target c must be >= 1");
    const double fdt = doppler.normalized();
    std::optional<EqualDurationPartition> best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int L = 2; L <= max_states; ++L) {
        auto part = equal_duration_partition(L);
        const double c = part.duration / fdt;
        const double gap = std::abs(c - target_c);
        if (gap < best_gap) {
            best_gap = gap;
            best = std::move(part);
        }
        if (c < target_c) break;
    }
    if (!best) throw construction_error("fsmc: no state count reaches c = " + std::to_string(target_c));
    return build_from_thresholds(std::move(best->thresholds), doppler, avg_snr);
}

/// Same partition and Doppler, different average SNR.
inline FsmcModel with_avg_snr(FsmcModel model, SnrLinear avg_snr)
{
    if (!(avg_snr.value > 0.0)) throw domain_error("fsmc: average SNR must be > 0");
    model.avg_snr = avg_snr;
    detail::fill_state_snrs(model);
    return model;
}

} // namespace harq

#endif // HARQ_FSMC_HPP
