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

#ifndef HARQ_IO_HPP
#define HARQ_IO_HPP

// CSV and JSON serialization of models, reports and simulation results.

#include "harq/delay.hpp"
#include "harq/error.hpp"
#include "harq/fsmc.hpp"
#include "harq/montecarlo.hpp"
#include "harq/optimizer.hpp"
#include "harq/outcomes.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace harq {

using json = nlohmann::json;

/// Fixed 12-significant-digit rendering used by every CSV writer.
inline std::string fmt(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// log10 with -inf for exact zeros, for log-scale plotting of PER.
inline double log10_or_floor(double p) { return p > 0.0 ? std::log10(p) : -std::numeric_limits<double>::infinity(); }

/// Writes `text` as `# `-prefixed comment lines.
inline void write_comment_header(std::ostream& os, const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) os << "# " << line << '\n';
}

inline json to_json(const FsmcModel& m)
{
    json th = json::array();
    for (double t : m.thresholds) th.push_back(std::isinf(t) ? json(nullptr) : json(t));
    json P = json::array();
    for (std::size_t i = 0; i < m.states(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.states(); ++j) row.push_back(m.P(i, j));
        P.push_back(row);
    }
    json snrs = json::array();
    for (auto g : m.state_snrs) snrs.push_back(g.db());
    return json{{"L", m.states()},   {"f_d_hz", m.doppler.f_d}, {"t_tb_s", m.doppler.t_tb}, {"avg_snr_db", m.avg_snr.db()},
                {"thresholds", th},  {"q", m.q},                {"P", P},                   {"state_snrs_db", snrs},
                {"c", m.c}};
}

/// Rebuilds a model from its serialized thresholds and channel parameters;
/// derived quantities are recomputed, not trusted.
inline FsmcModel fsmc_from_json(const json& j)
{
    try {
        std::vector<double> th;
        for (const auto& t : j.at("thresholds")) th.push_back(t.is_null() ? infinite_amplitude : t.get<double>());
        return build_from_thresholds(std::move(th), DopplerSpec{j.at("f_d_hz").get<double>(), j.at("t_tb_s").get<double>()},
                                     SnrLinear::from_db(j.at("avg_snr_db").get<double>()));
    } catch (const json::exception& e) {
        throw config_error(std::string("fsmc json: ") + e.what());
    }
}

inline json to_json(const OutcomeDistribution& o) { return json{{"p", o.p}, {"p_e", o.p_e}}; }

inline json to_json(const FrontierPoint& pt)
{
    return json{{"taus", pt.taus}, {"per", pt.per}, {"throughput", pt.throughput}, {"feasible", pt.feasible}};
}

inline json to_json(const OptimizationReport& r)
{
    json frontier = json::array();
    for (const auto& pt : r.frontier) frontier.push_back(to_json(pt));
    return json{{"snr_db", r.snr_db},
                {"tau_hat", r.tau_hat},
                {"achieved_per", r.achieved_per},
                {"achieved_throughput", r.achieved_throughput},
                {"feasible", r.feasible},
                {"frontier", frontier}};
}

/// One row per report: snr_db,tau1[,tau2...],per,throughput,feasible.
inline void write_reports_csv(std::ostream& os, const std::vector<OptimizationReport>& reports)
{
    const std::size_t dims = reports.empty() ? 1 : reports.front().tau_hat.size();
    os << "snr_db";
    for (std::size_t i = 1; i <= dims; ++i) os << ",tau" << i;
    os << ",per,throughput,feasible\n";
    for (const auto& r : reports) {
        os << fmt(r.snr_db);
        for (double t : r.tau_hat) os << ',' << fmt(t);
        os << ',' << fmt(r.achieved_per) << ',' << fmt(r.achieved_throughput) << ',' << (r.feasible ? 1 : 0) << '\n';
    }
}

inline void write_delay_csv(std::ostream& os, const DelayPmf& pmf)
{
    os << "delay,probability\n";
    for (std::size_t i = 0; i < pmf.size(); ++i) os << fmt(pmf.support(i)) << ',' << fmt(pmf.mass[i]) << '\n';
}

inline void write_ccdf_csv(std::ostream& os, const std::vector<std::pair<double, double>>& ccdf)
{
    os << "overhead,ccdf\n";
    for (const auto& [x, p] : ccdf) os << fmt(x) << ',' << fmt(p) << '\n';
}

inline json to_json(const DelayPmf& pmf)
{
    std::vector<double> support;
    for (std::size_t i = 0; i < pmf.size(); ++i) support.push_back(pmf.support(i));
    return json{{"delay", support}, {"probability", pmf.mass}, {"pruned_mass", pmf.pruned_mass}};
}

inline json to_json(const EmpiricalOutcome& e)
{
    return json{{"frequencies", to_json(e.frequencies)}, {"se_p", e.se_p}, {"se_p_e", e.se_p_e}, {"trials", e.trials}};
}

inline json to_json(const SimResult& r)
{
    return json{{"outcome", to_json(r.outcome)},         {"throughput", r.throughput}, {"throughput_se", r.throughput_se},
                {"mean_slots", r.mean_slots},            {"packets", r.packets},       {"delay", to_json(r.delay)}};
}

inline json to_json(const FsmcValidation& v)
{
    return json{{"q", v.q},
                {"q_se", v.q_se},
                {"transitions", v.transitions},
                {"transitions_se", v.transitions_se},
                {"q_flag", v.q_flag},
                {"transition_flag", v.transition_flag},
                {"skip_fraction", v.skip_fraction},
                {"flagged", v.flagged}};
}

/// (re, im) pairs, one block per line.
inline void write_trace_csv(std::ostream& os, const FadingTrace& trace)
{
    os << "re,im\n";
    for (const auto& h : trace.samples) os << fmt(h.real()) << ',' << fmt(h.imag()) << '\n';
}

} // namespace harq

#endif // HARQ_IO_HPP
