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

#ifndef HARQ_CONFIG_HPP
#define HARQ_CONFIG_HPP

// Flat key = value run configuration with embedded scenario presets.
//
//   # comment
//   preset    = fig4a        (load a preset, later keys override it)
//   snr_db    = 11, 11.5, 12
//   tau_grid  = coarse       (coarse | fine | explicit list)

#include "harq/error.hpp"
#include "harq/fbl.hpp"
#include "harq/fsmc.hpp"
#include "harq/montecarlo.hpp"
#include "harq/optimizer.hpp"
#include "harq/outcomes.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace harq {

enum class ChannelKind { awgn, fading };

struct RunConfig {
    std::string scenario = "custom";
    std::int64_t n = 100;
    std::vector<std::int64_t> k{100};
    int m = 2;
    std::vector<Scheme> schemes{Scheme::ir};
    std::vector<double> tau{1.0}; // fixed retransmission coefficients tau_1..tau_{m-1}
    std::string tau_grid = "fine";
    std::vector<double> snr_db{0.0};
    ChannelKind channel = ChannelKind::awgn;
    double f_d_hz = 241.4285714285714;
    double t_tb_s = 0.00014;
    int fsmc_states = 0; // 0 selects L by target_c
    double target_c = 3.0446;
    double per_ceiling = 1e-4;
    ConstraintMode constraint = ConstraintMode::ceiling;
    DispersionUnit dispersion = DispersionUnit::bits;
    CcDenominator cc_denominator = CcDenominator::normalized;
    std::int64_t packets = 1000;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    int oscillators = 512;
    PacketStart packet_start = PacketStart::continuous;
    std::uint64_t trace_length = 0;
    std::string format = "csv";
    std::string out = ".";

    PerOptions per_options() const { return PerOptions{cc_denominator, dispersion}; }
    DopplerSpec doppler() const { return DopplerSpec{f_d_hz, t_tb_s}; }

    std::vector<double> grid() const
    {
        if (tau_grid == "coarse") return coarse_tau_grid();
        if (tau_grid == "fine") return fine_tau_grid();
        std::vector<double> out;
        std::stringstream ss(tau_grid);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
        return out;
    }

    /// HARQ configuration for one (scheme, k) pair with the fixed coefficients.
    HarqConfig harq(Scheme scheme, std::int64_t info_bits) const
    {
        const CodeParams code{n, info_bits};
        if (scheme == Scheme::cc) return HarqConfig::chase(code, m, per_options());
        std::vector<double> taus{1.0};
        for (int i = 1; i < m; ++i) taus.push_back(tau[std::min<std::size_t>(static_cast<std::size_t>(i - 1), tau.size() - 1)]);
        return HarqConfig::incremental(code, std::move(taus), per_options());
    }

    FsmcModel fsmc(SnrLinear avg) const
    {
        if (fsmc_states > 0) return build_equal_duration(fsmc_states, doppler(), avg);
        return build_for_target_c(target_c, doppler(), avg);
    }

    void validate() const
    {
        const auto fail = [](const std::string& what) { throw config_error("config: " + what); };
        if (n < 1) fail("n must be >= 1");
        if (k.empty()) fail("k list is empty");
        for (auto v : k)
            if (v < 1 || v > n) fail("k must lie in [1, n]");
        if (m < 1 || m > 8) fail("m must lie in [1, 8]");
        if (schemes.empty()) fail("scheme list is empty");
        if (tau.empty()) fail("tau list is empty");
        for (double t : tau)
            if (!(t > 0.0 && t <= 1.0)) fail("tau values must lie in (0, 1]");
        if (snr_db.empty()) fail("snr_db list is empty");
        const auto g = grid();
        if (g.empty()) fail("tau_grid is empty");
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!(g[i] > 0.0 && g[i] <= 1.0) || (i > 0 && !(g[i] > g[i - 1]))) fail("tau_grid must be increasing within (0, 1]");
        if (!(f_d_hz > 0.0) || !(t_tb_s > 0.0)) fail("f_d_hz and t_tb_s must be > 0");
        if (fsmc_states < 0) fail("fsmc_states must be >= 0");
        if (fsmc_states == 0 && !(target_c >= 1.0)) fail("target_c must be >= 1");
        if (!(per_ceiling > 0.0 && per_ceiling <= 1.0)) fail("per_ceiling must lie in (0, 1]");
        if (packets < 1) fail("packets must be >= 1");
        if (trials < 1000) fail("trials must be >= 1000");
        if (oscillators < 1) fail("oscillators must be >= 1");
        if (format != "csv" && format != "json") fail("format must be csv or json");
    }
};

namespace detail {

inline std::string trim_copy(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim_copy(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& s)
{
    T v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw config_error("not a valid number: '" + s + "'");
    return v;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& v)
{
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(parse_number<T>(item));
    if (out.empty()) throw config_error("empty list");
    return out;
}

template <typename E>
E parse_choice(const std::string& v, std::initializer_list<std::pair<const char*, E>> choices)
{
    std::string allowed;
    for (const auto& [name, value] : choices) {
        if (v == name) return value;
        allowed += allowed.empty() ? name : std::string(" | ") + name;
    }
    throw config_error("'" + v + "' is not one of " + allowed);
}

template <typename T>
std::string join(const std::vector<T>& xs)
{
    std::ostringstream os;
    os.precision(12);
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
    return os.str();
}

} // namespace detail

/// Scenario presets shipped with the toolkit.
inline const std::map<std::string, std::string>& presets()
{
    static const std::map<std::string, std::string> table{
        {"fig2a", "scenario = fig2a\nn = 100\nk = 100\nm = 2\nscheme = ir, cc\nsnr_db = -2, -1, 0\ntau_grid = fine\n"
                  "dispersion = nats\nper_ceiling = 1e-4\n"},
        {"fig2b", "scenario = fig2b\nn = 100\nk = 30, 40, 50, 60\nm = 2\nscheme = ir, cc\nsnr_db = -5\ntau_grid = fine\n"
                  "dispersion = nats\n"},
        {"fig3", "scenario = fig3\nn = 100\nk = 30, 50, 70\nm = 2\nscheme = ir, cc\ntau = 0.4, 0.9\nsnr_db = -4\npackets = 1000\n"
                 "dispersion = nats\n"},
        {"fig4a", "scenario = fig4a\nn = 100\nk = 70\nm = 2\nscheme = ir\nchannel = fading\nsnr_db = 11.5, 12.5, 13.5\n"
                  "f_d_hz = 241.4285714285714\nt_tb_s = 0.00014\ntarget_c = 3.0446\ntau_grid = coarse\ndispersion = nats\n"},
        {"fig4b", "scenario = fig4b\nn = 100\nk = 100\nm = 2\nscheme = ir\nchannel = fading\nsnr_db = 11.5, 12.5, 13.5\n"
                  "f_d_hz = 241.4285714285714\nt_tb_s = 0.00014\ntarget_c = 3.0446\ntau_grid = coarse\ndispersion = nats\n"},
        {"fig5", "scenario = fig5\nn = 100\nk = 70\nm = 3\nscheme = ir\nsnr_db = -4\ntau_grid = coarse\nper_ceiling = 1e-4\n"
                 "dispersion = nats\n"},
        {"table1a", "scenario = table1a\nn = 100\nk = 100\nm = 2\nscheme = ir\nchannel = fading\n"
                    "snr_db = 11, 11.5, 12, 12.5, 13, 13.5, 14\nf_d_hz = 285.7142857142857\nt_tb_s = 0.00014\ntarget_c = 3.0446\n"
                    "tau_grid = coarse\nper_ceiling = 0.01\ndispersion = nats\n"},
        {"table1b", "scenario = table1b\nn = 100\nk = 70\nm = 2\nscheme = ir\nchannel = fading\n"
                    "snr_db = 11, 11.5, 12, 12.5, 13, 13.5, 14\nf_d_hz = 285.7142857142857\nt_tb_s = 0.00014\ntarget_c = 3.0446\n"
                    "tau_grid = coarse\nper_ceiling = 1e-4\ndispersion = nats\n"},
        {"fsmc-low", "scenario = fsmc-low\nchannel = fading\nfsmc_states = 13\nf_d_hz = 210\nt_tb_s = 0.00014\nsnr_db = 11.5\n"
                     "trace_length = 1000000\n"},
        {"fsmc-high", "scenario = fsmc-high\nchannel = fading\nfsmc_states = 4\nf_d_hz = 285\nt_tb_s = 0.0003\nsnr_db = 11.5\n"
                      "trace_length = 1000000\n"},
        {"sim-fig4a", "scenario = sim-fig4a\nn = 100\nk = 70\nm = 2\nscheme = ir\ntau = 0.6\nchannel = fading\nsnr_db = 11.5\n"
                      "f_d_hz = 241.4285714285714\nt_tb_s = 0.00014\ntarget_c = 3.0446\ntrials = 1000000\ndispersion = nats\n"},
    };
    return table;
}

namespace detail {

inline void apply_text(RunConfig& cfg, const std::string& text, const std::string& source, int depth);

inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, int depth)
{
    using detail::parse_choice;
    if (key == "preset") {
        const auto it = presets().find(value);
        if (it == presets().end()) throw config_error("unknown preset '" + value + "'");
        if (depth > 4) throw config_error("preset nesting too deep");
        apply_text(cfg, it->second, "preset " + value, depth + 1);
    } else if (key == "scenario") {
        cfg.scenario = value;
    } else if (key == "n") {
        cfg.n = parse_number<std::int64_t>(value);
    } else if (key == "k") {
        cfg.k = parse_numbers<std::int64_t>(value);
    } else if (key == "m") {
        cfg.m = parse_number<int>(value);
    } else if (key == "scheme") {
        cfg.schemes.clear();
        for (const auto& s : split_list(value)) cfg.schemes.push_back(parse_choice<Scheme>(s, {{"cc", Scheme::cc}, {"ir", Scheme::ir}}));
        if (cfg.schemes.empty()) throw config_error("empty list");
    } else if (key == "tau") {
        cfg.tau = parse_numbers<double>(value);
    } else if (key == "tau_grid") {
        if (value != "coarse" && value != "fine") parse_numbers<double>(value);
        cfg.tau_grid = value;
    } else if (key == "snr_db") {
        cfg.snr_db = parse_numbers<double>(value);
    } else if (key == "channel") {
        cfg.channel = parse_choice<ChannelKind>(value, {{"awgn", ChannelKind::awgn}, {"fading", ChannelKind::fading}});
    } else if (key == "f_d_hz") {
        cfg.f_d_hz = parse_number<double>(value);
    } else if (key == "t_tb_s") {
        cfg.t_tb_s = parse_number<double>(value);
    } else if (key == "fsmc_states") {
        cfg.fsmc_states = parse_number<int>(value);
    } else if (key == "target_c") {
        cfg.target_c = parse_number<double>(value);
    } else if (key == "per_ceiling") {
        cfg.per_ceiling = parse_number<double>(value);
    } else if (key == "constraint") {
        cfg.constraint = parse_choice<ConstraintMode>(value, {{"ceiling", ConstraintMode::ceiling}, {"floor", ConstraintMode::floor}});
    } else if (key == "dispersion") {
        cfg.dispersion = parse_choice<DispersionUnit>(value, {{"bits", DispersionUnit::bits}, {"nats", DispersionUnit::nats}});
    } else if (key == "cc_denominator") {
        cfg.cc_denominator =
            parse_choice<CcDenominator>(value, {{"normalized", CcDenominator::normalized}, {"unnormalized", CcDenominator::unnormalized}});
    } else if (key == "packets") {
        cfg.packets = parse_number<std::int64_t>(value);
    } else if (key == "trials") {
        cfg.trials = static_cast<std::uint64_t>(parse_number<double>(value));
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value);
    } else if (key == "oscillators") {
        cfg.oscillators = parse_number<int>(value);
    } else if (key == "packet_start") {
        cfg.packet_start = parse_choice<PacketStart>(value, {{"continuous", PacketStart::continuous}, {"iid", PacketStart::iid}});
    } else if (key == "trace_length") {
        cfg.trace_length = static_cast<std::uint64_t>(parse_number<double>(value));
    } else if (key == "format") {
        cfg.format = parse_choice<std::string>(value, {{"csv", "csv"}, {"json", "json"}});
    } else if (key == "out") {
        cfg.out = value;
    } else {
        throw config_error("unknown key '" + key + "'");
    }
}

inline void apply_text(RunConfig& cfg, const std::string& text, const std::string& source, int depth)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim_copy(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = source + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw config_error(where + "expected 'key = value'");
        const auto key = trim_copy(std::string_view(line).substr(0, eq));
        const auto value = trim_copy(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty()) throw config_error(where + "expected 'key = value'");
        try {
            apply_key(cfg, key, value, depth);
        } catch (const config_error& e) {
            const std::string msg = e.what();
            throw config_error(msg.rfind("preset ", 0) == 0 ? msg : where + key + ": " + msg);
        }
    }
}

} // namespace detail

/// Applies `text` on top of `base`; `source` labels diagnostics.
inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>", RunConfig base = {})
{
    detail::apply_text(base, text, source, 0);
    base.validate();
    return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {})
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path, std::move(base));
}

inline RunConfig preset_config(const std::string& name) { return parse_config("preset = " + name, "<preset>"); }

/// Fully resolved configuration as `key = value` lines (round-trips through
/// parse_config).
inline std::string to_text(const RunConfig& c)
{
    std::vector<std::string> schemes;
    for (auto s : c.schemes) schemes.push_back(to_string(s));
    std::ostringstream os;
    os.precision(16);
    os << "scenario = " << c.scenario << '\n'
       << "n = " << c.n << '\n'
       << "k = " << detail::join(c.k) << '\n'
       << "m = " << c.m << '\n'
       << "scheme = " << detail::join(schemes) << '\n'
       << "tau = " << detail::join(c.tau) << '\n'
       << "tau_grid = " << c.tau_grid << '\n'
       << "snr_db = " << detail::join(c.snr_db) << '\n'
       << "channel = " << (c.channel == ChannelKind::awgn ? "awgn" : "fading") << '\n'
       << "f_d_hz = " << c.f_d_hz << '\n'
       << "t_tb_s = " << c.t_tb_s << '\n'
       << "fsmc_states = " << c.fsmc_states << '\n'
       << "target_c = " << c.target_c << '\n'
       << "per_ceiling = " << c.per_ceiling << '\n'
       << "constraint = " << (c.constraint == ConstraintMode::ceiling ? "ceiling" : "floor") << '\n'
       << "dispersion = " << (c.dispersion == DispersionUnit::bits ? "bits" : "nats") << '\n'
       << "cc_denominator = " << (c.cc_denominator == CcDenominator::normalized ? "normalized" : "unnormalized") << '\n'
       << "packets = " << c.packets << '\n'
       << "trials = " << c.trials << '\n'
       << "seed = " << c.seed << '\n'
       << "oscillators = " << c.oscillators << '\n'
       << "packet_start = " << (c.packet_start == PacketStart::continuous ? "continuous" : "iid") << '\n'
       << "trace_length = " << c.trace_length << '\n'
       << "format = " << c.format << '\n'
       << "out = " << c.out << '\n';
    return os.str();
}

} // namespace harq

#endif // HARQ_CONFIG_HPP
