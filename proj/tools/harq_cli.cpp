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

// harq_cli: reproduces PER, throughput, delay and optimization tables as
// CSV/JSON artifacts.
//
// Exit status: 0 ok, 2 config error, 3 construction error, 4 resource error,
// 5 validation failure, 1 anything else.

#include "harq/harq.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace harq;
namespace fs = std::filesystem;

constexpr int exit_config = 2;
constexpr int exit_construction = 3;
constexpr int exit_resource = 4;
constexpr int exit_validation = 5;

struct Options {
    std::string config_path;
    std::string preset;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
};

RunConfig resolve(const Options& o)
{
    RunConfig cfg;
    if (!o.preset.empty()) cfg = preset_config(o.preset);
    if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
    if (o.out) cfg.out = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.format) cfg.format = *o.format;
    cfg.validate();
    return cfg;
}

class Artifact {
public:
    Artifact(const RunConfig& cfg, const std::string& command, const std::string& ext)
        : path_(fs::path(cfg.out) / (cfg.scenario + "_" + command + "." + ext))
    {
        fs::create_directories(cfg.out);
        os_.open(path_);
        if (!os_) throw resource_error("cannot write " + path_.string());
        if (ext == "csv") write_comment_header(os_, "harq_cli " + command + "\n" + to_text(cfg));
    }
    ~Artifact() { std::cerr << "wrote " << path_.string() << '\n'; }

    std::ostream& stream() { return os_; }

private:
    fs::path path_;
    std::ofstream os_;
};

// JSON artifacts carry the resolved configuration as their leading member.
nlohmann::ordered_json json_header(const RunConfig& cfg, const std::string& command)
{
    nlohmann::ordered_json j;
    std::vector<std::string> lines{"harq_cli " + command};
    std::istringstream in(to_text(cfg));
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    j["config"] = lines;
    return j;
}

void emit_json(const RunConfig& cfg, const std::string& command, const std::string& key, const json& body)
{
    auto j = json_header(cfg, command);
    j[key] = nlohmann::ordered_json::parse(body.dump());
    Artifact a(cfg, command, "json");
    a.stream() << j.dump(2) << '\n';
}

Channel channel_at(const RunConfig& cfg, double snr_db, std::optional<FsmcModel>& cache)
{
    const auto snr = SnrLinear::from_db(snr_db);
    if (cfg.channel == ChannelKind::awgn) return snr;
    if (!cache) cache = cfg.fsmc(snr);
    return with_avg_snr(*cache, snr);
}

void log_model(const std::optional<FsmcModel>& model)
{
    if (model) std::cerr << "fsmc: L = " << model->states() << ", c = " << fmt(model->c) << '\n';
}

int cmd_per_curve(const RunConfig& cfg)
{
    std::optional<FsmcModel> model;
    json rows = json::array();
    for (double snr : cfg.snr_db) {
        const auto ch = channel_at(cfg, snr, model);
        for (auto k : cfg.k)
            for (auto scheme : cfg.schemes) {
                const auto taus = scheme == Scheme::cc ? std::vector<double>{1.0} : cfg.grid();
                for (double t : taus) {
                    HarqConfig h = cfg.harq(scheme, k);
                    if (scheme == Scheme::ir)
                        for (int i = 1; i < h.m; ++i) h.taus[static_cast<std::size_t>(i)] = t;
                    const auto o = evaluate_outcomes(h, ch);
                    rows.push_back({{"snr_db", snr}, {"k", k}, {"scheme", to_string(scheme)}, {"tau1", t}, {"per", o.p_e},
                                    {"log10_per", log10_or_floor(o.p_e)}, {"throughput", throughput(h, o)}});
                }
            }
    }
    log_model(model);
    if (cfg.format == "json") {
        emit_json(cfg, "per-curve", "rows", rows);
        return 0;
    }
    Artifact a(cfg, "per-curve", "csv");
    a.stream() << "snr_db,k,scheme,tau1,per,log10_per,throughput\n";
    for (const auto& r : rows)
        a.stream() << fmt(r["snr_db"]) << ',' << r["k"].get<std::int64_t>() << ',' << r["scheme"].get<std::string>() << ','
                   << fmt(r["tau1"]) << ',' << fmt(r["per"]) << ',' << fmt(r["log10_per"]) << ',' << fmt(r["throughput"]) << '\n';
    return 0;
}

int cmd_per_surface(const RunConfig& cfg)
{
    if (cfg.m != 3) throw config_error("config: per-surface requires m = 3");
    std::optional<FsmcModel> model;
    json rows = json::array();
    for (double snr : cfg.snr_db) {
        OptimizationProblem p;
        p.base = cfg.harq(Scheme::ir, cfg.k.front());
        p.channel = channel_at(cfg, snr, model);
        p.tau_grid = cfg.grid();
        p.per_ceiling = cfg.per_ceiling;
        p.constraint = cfg.constraint;
        for (auto k : cfg.k) {
            p.base.code.k = k;
            for (const auto& pt : optimize_tau12(p).frontier)
                rows.push_back({{"snr_db", snr}, {"k", k}, {"tau1", pt.taus[0]}, {"tau2", pt.taus[1]}, {"per", pt.per},
                                {"log10_per", log10_or_floor(pt.per)}, {"throughput", pt.throughput}});
        }
    }
    log_model(model);
    if (cfg.format == "json") {
        emit_json(cfg, "per-surface", "rows", rows);
        return 0;
    }
    Artifact a(cfg, "per-surface", "csv");
    a.stream() << "snr_db,k,tau1,tau2,per,log10_per,throughput\n";
    for (const auto& r : rows)
        a.stream() << fmt(r["snr_db"]) << ',' << r["k"].get<std::int64_t>() << ',' << fmt(r["tau1"]) << ',' << fmt(r["tau2"]) << ','
                   << fmt(r["per"]) << ',' << fmt(r["log10_per"]) << ',' << fmt(r["throughput"]) << '\n';
    return 0;
}

int cmd_delay(const RunConfig& cfg)
{
    std::optional<FsmcModel> model;
    const double snr = cfg.snr_db.front();
    const auto ch = channel_at(cfg, snr, model);
    json cases = json::array();
    for (auto k : cfg.k)
        for (auto scheme : cfg.schemes) {
            const auto taus = scheme == Scheme::cc ? std::vector<double>{1.0} : cfg.tau;
            for (double t : taus) {
                HarqConfig h = cfg.harq(scheme, k);
                if (scheme == Scheme::ir)
                    for (int i = 1; i < h.m; ++i) h.taus[static_cast<std::size_t>(i)] = t;
                const auto o = evaluate_outcomes(h, ch);
                const auto stream = stream_delay(single_packet_delay(h, o), cfg.packets);
                json ccdf = json::array();
                for (const auto& [x, p] : overhead_ccdf(stream, cfg.packets)) ccdf.push_back({x, p});
                cases.push_back({{"k", k}, {"scheme", to_string(scheme)}, {"tau1", t}, {"per", o.p_e},
                                 {"log10_per", log10_or_floor(o.p_e)}, {"pruned_mass", stream.pruned_mass}, {"ccdf", ccdf}});
                std::cerr << "delay: k = " << k << ' ' << to_string(scheme) << " tau1 = " << fmt(t) << " per = " << fmt(o.p_e)
                          << " (log10 " << fmt(log10_or_floor(o.p_e)) << ")\n";
            }
        }
    log_model(model);
    if (cfg.format == "json") {
        emit_json(cfg, "delay", "cases", cases);
        return 0;
    }
    Artifact a(cfg, "delay", "csv");
    a.stream() << "k,scheme,tau1,overhead,ccdf\n";
    for (const auto& c : cases)
        for (const auto& pt : c["ccdf"])
            a.stream() << c["k"].get<std::int64_t>() << ',' << c["scheme"].get<std::string>() << ',' << fmt(c["tau1"]) << ','
                       << fmt(pt[0]) << ',' << fmt(pt[1]) << '\n';
    return 0;
}

int cmd_fsmc(const RunConfig& cfg)
{
    const auto model = cfg.fsmc(SnrLinear::from_db(cfg.snr_db.front()));
    log_model(model);
    json body = to_json(model);
    body["tb_bound_slack"] = validate_tb_bound(model);
    if (cfg.trace_length > 0) {
        const auto trace = generate_trace(cfg.f_d_hz, cfg.t_tb_s, cfg.trace_length, cfg.seed, TraceOptions{cfg.oscillators});
        const auto v = validate_fsmc(model, trace);
        body["monte_carlo"] = to_json(v);
        std::cerr << "fsmc: " << v.flagged << " entries beyond 3 sigma, skip fraction " << fmt(v.skip_fraction) << '\n';
    }
    emit_json(cfg, "fsmc", "model", body);
    return 0;
}

int cmd_optimize(const RunConfig& cfg)
{
    std::optional<FsmcModel> model;
    OptimizationProblem p;
    p.channel = channel_at(cfg, cfg.snr_db.front(), model);
    p.per_ceiling = cfg.per_ceiling;
    p.tau_grid = cfg.grid();
    p.constraint = cfg.constraint;
    json all = json::array();
    for (auto k : cfg.k) {
        p.base = cfg.harq(Scheme::ir, k);
        const auto reports = sweep(p, cfg.snr_db);
        json js = json::array();
        for (const auto& r : reports) js.push_back(to_json(r));
        all.push_back({{"k", k}, {"reports", js}});
        Artifact a(cfg, "optimize_k" + std::to_string(k), "csv");
        write_reports_csv(a.stream(), reports);
    }
    log_model(model);
    emit_json(cfg, "optimize", "sweeps", all);
    return 0;
}

int cmd_simulate(const RunConfig& cfg)
{
    const HarqConfig h = cfg.harq(cfg.schemes.front(), cfg.k.front());
    const auto snr = SnrLinear::from_db(cfg.snr_db.front());
    json body;
    bool ok = true;
    if (cfg.channel == ChannelKind::awgn) {
        const auto sim = simulate_harq(h, snr, cfg.trials, cfg.seed);
        const auto analytic = outcomes_awgn(h, snr);
        const double eta = throughput(h, analytic);
        const bool agree = sim.outcome.agrees_with(analytic) && std::abs(sim.throughput - eta) <= 3.0 * sim.throughput_se + 1e-15;
        ok = agree;
        body = {{"simulation", to_json(sim)}, {"analytic", to_json(analytic)}, {"analytic_throughput", eta}, {"agrees_3sigma", agree}};
    } else {
        const auto model = cfg.fsmc(snr);
        log_model(model);
        const auto analytic = outcomes_fading(h, model);
        const double eta = throughput(h, analytic);
        const auto chain = outcomes_fading_mc_check(h, model, cfg.trials, cfg.seed);
        const bool chain_ok = chain.agrees_with(analytic);
        const std::size_t blocks = cfg.packet_start == PacketStart::iid ? std::size_t{1} << 20
                                                                        : static_cast<std::size_t>(cfg.trials) * static_cast<std::size_t>(h.m);
        const auto trace = generate_trace(cfg.f_d_hz, cfg.t_tb_s, blocks, derive_seed(cfg.seed, 2), TraceOptions{cfg.oscillators});
        const auto sim = simulate_harq(h, TraceChannel{&trace, snr}, cfg.trials, cfg.seed, cfg.packet_start);
        ok = chain_ok;
        body = {{"analytic", to_json(analytic)},
                {"analytic_throughput", eta},
                {"fsmc_model", to_json(model)},
                {"markov_chain_simulation", to_json(chain)},
                {"markov_chain_agrees_3sigma", chain_ok},
                {"trace_simulation", to_json(sim)},
                {"trace_agrees_3sigma", sim.outcome.agrees_with(analytic)}};
    }
    std::cerr << "simulate: " << (ok ? "agrees with analytic model" : "DISAGREES with analytic model") << '\n';
    emit_json(cfg, "simulate", "result", body);
    return ok ? 0 : exit_validation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite-blocklength HARQ analysis toolkit"};
    app.require_subcommand(1);
    Options opt;
    const auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Key-value config file")->check(CLI::ExistingFile);
        sub->add_option("--preset", opt.preset, "Scenario preset applied before --config");
        sub->add_option_function<std::string>("--out", [&opt](const std::string& v) { opt.out = v; }, "Output directory");
        sub->add_option_function<std::uint64_t>("--seed", [&opt](const std::uint64_t& v) { opt.seed = v; }, "Random seed");
        sub->add_option_function<std::string>("--format", [&opt](const std::string& v) { opt.format = v; }, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };
    struct Command
    {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
    };
    const std::vector<Command> commands{
        {"per-curve", "Residual PER after each round versus SNR", cmd_per_curve},
        {"per-surface", "Residual PER over a grid of retransmission lengths", cmd_per_surface},
        {"delay", "Delay pmf and CCDF", cmd_delay},
        {"fsmc", "Build a finite-state Markov channel", cmd_fsmc},
        {"optimize", "Throughput-optimal retransmission lengths under a PER ceiling", cmd_optimize},
        {"simulate", "Monte Carlo HARQ simulation", cmd_simulate}};
    for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help));
    app.add_subcommand("presets", "List scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "presets") {
        for (const auto& [name, text] : presets()) std::cout << name << '\n';
        return 0;
    }
    try {
        const auto cfg = resolve(opt);
        for (const auto& c : commands)
            if (sub->get_name() == c.name) return c.fn(cfg);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const construction_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_construction;
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_resource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
