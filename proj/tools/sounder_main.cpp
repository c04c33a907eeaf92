// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/channel_estimate.hpp"
#include "sounder/impairments.hpp"
#include "sounder/io.hpp"
#include "sounder/restoration.hpp"
#include "sounder/run_config.hpp"
#include "sounder/test_signal.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace sounder;

// Binds every RunConfig knob to one subcommand and remembers how to apply
// config-file values for options the command line left untouched
// (precedence: flag > config file > default).
class ConfigBinder {
  public:
    ConfigBinder(CLI::App* cmd, RunConfig& cfg) : cfg_(cfg) {
        config_opt_ = cmd->add_option("--config", config_path_,
                                      "key=value config file (# comments allowed)");
        add(cmd->add_option("--n-zc", cfg.n_zc, "Zadoff-Chu length (prime)"), "n_zc",
            [&cfg](const std::string& v) { cfg.n_zc = std::stoull(v); });
        add(cmd->add_option("--root", cfg.root, "Zadoff-Chu root"), "root",
            [&cfg](const std::string& v) { cfg.root = std::stoull(v); });
        add(cmd->add_option("--repetitions", cfg.repetitions, "sequence repetitions per period"),
            "repetitions", [&cfg](const std::string& v) { cfg.repetitions = std::stoull(v); });
        add(cmd->add_option("--period", cfg.period_t, "period length T in samples"), "period_t",
            [&cfg](const std::string& v) { cfg.period_t = std::stoull(v); });
        add(cmd->add_option("--sample-rate", cfg.sample_rate, "sample rate in Hz"), "sample_rate",
            [&cfg](const std::string& v) { cfg.sample_rate = std::stod(v); });
        add(cmd->add_option("--carrier-freq", cfg.carrier_freq, "carrier frequency in Hz"),
            "carrier_freq", [&cfg](const std::string& v) { cfg.carrier_freq = std::stod(v); });
        add(cmd->add_option("--num-periods", cfg.num_periods, "periods per simulated capture"),
            "num_periods", [&cfg](const std::string& v) { cfg.num_periods = std::stoull(v); });
        add(cmd->add_option("--taps", cfg.channel_taps, "channel taps, e.g. \"1,0,0.5i\""),
            "channel_taps", [&cfg](const std::string& v) { cfg.channel_taps = v; });
        add(cmd->add_option("--gain", cfg.gain, "complex gain a"), "gain",
            [&cfg](const std::string& v) { cfg.gain = v; });
        add(cmd->add_option("--zero-offset", cfg.zero_offset, "complex zero offset b"),
            "zero_offset", [&cfg](const std::string& v) { cfg.zero_offset = v; });
        add(cmd->add_option("--cfo", cfg.cfo, "carrier frequency offset, cycles/sample"), "cfo",
            [&cfg](const std::string& v) { cfg.cfo = std::stod(v); });
        add(cmd->add_option("--phase", cfg.phase, "carrier phase offset, radians"), "phase",
            [&cfg](const std::string& v) { cfg.phase = std::stod(v); });
        add(cmd->add_option("--block-season", cfg.block_season, "burst spacing, samples"),
            "block_season", [&cfg](const std::string& v) { cfg.block_season = std::stoull(v); });
        add(cmd->add_option("--block-duration", cfg.block_duration, "burst length, samples"),
            "block_duration", [&cfg](const std::string& v) { cfg.block_duration = std::stoull(v); });
        add(cmd->add_option("--block-scale", cfg.block_slope_scale, "burst ramp scale"),
            "block_slope_scale",
            [&cfg](const std::string& v) { cfg.block_slope_scale = std::stod(v); });
        add(cmd->add_option("--block-jitter", cfg.block_jitter, "burst start jitter, samples"),
            "block_jitter", [&cfg](const std::string& v) { cfg.block_jitter = std::stoull(v); });
        add(cmd->add_option("--pulse-rate", cfg.pulse_rate, "expected pulses per period"),
            "pulse_rate", [&cfg](const std::string& v) { cfg.pulse_rate = std::stod(v); });
        add(cmd->add_option("--pulse-amplitude", cfg.pulse_amplitude, "pulse amplitude"),
            "pulse_amplitude",
            [&cfg](const std::string& v) { cfg.pulse_amplitude = std::stod(v); });
        add(cmd->add_option("--snr-db", cfg.snr_db, "SNR in dB (inf disables noise)"), "snr_db",
            [&cfg](const std::string& v) { cfg.snr_db = std::stod(v); });
        add(cmd->add_option("--seed", cfg.seed, "simulation seed"), "seed",
            [&cfg](const std::string& v) { cfg.seed = std::stoull(v); });
        add(cmd->add_option("--iterations", cfg.iterations, "restoration iterations"),
            "iterations", [&cfg](const std::string& v) { cfg.iterations = std::stoull(v); });
        add(cmd->add_option("--season-init", cfg.block_season_init,
                            "initial burst-length estimate, samples"),
            "block_season_init",
            [&cfg](const std::string& v) { cfg.block_season_init = std::stoull(v); });
        add(cmd->add_option("--kernel-init", cfg.block_kernel_init,
                            "initial smoothing kernel width (odd)"),
            "block_kernel_init",
            [&cfg](const std::string& v) { cfg.block_kernel_init = std::stoull(v); });
        add(cmd->add_option("--peak-threshold", cfg.peak_rel_threshold,
                            "relative peak threshold in (0,1]"),
            "peak_rel_threshold",
            [&cfg](const std::string& v) { cfg.peak_rel_threshold = std::stod(v); });
        add(cmd->add_option("--outlier-factor", cfg.outlier_factor, "outlier gate vs median"),
            "outlier_factor", [&cfg](const std::string& v) { cfg.outlier_factor = std::stod(v); });
    }

    /// Called after parsing: config-file values fill in everything no flag set.
    void finalize() {
        if (config_path_.empty()) return;
        std::ifstream f(config_path_);
        if (!f) throw std::runtime_error("cannot open config file: " + config_path_);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(f, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto strip = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t\r");
                return s.substr(b, e - b + 1);
            };
            line = strip(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(config_path_ + ":" + std::to_string(line_no) +
                                         ": expected key=value");
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            bool known = false;
            for (auto& e : entries_) {
                if (e.key == key) {
                    known = true;
                    if (e.opt->count() == 0) e.set(value);
                    break;
                }
            }
            if (!known)
                throw std::runtime_error(config_path_ + ":" + std::to_string(line_no) +
                                         ": unknown key '" + key + "'");
        }
    }

  private:
    struct Entry {
        std::string key;
        CLI::Option* opt;
        std::function<void(const std::string&)> set;
    };

    void add(CLI::Option* opt, std::string key, std::function<void(const std::string&)> set) {
        entries_.push_back({std::move(key), opt, std::move(set)});
    }

    RunConfig& cfg_;
    std::string config_path_;
    CLI::Option* config_opt_ = nullptr;
    std::vector<Entry> entries_;
};

IqSignal make_test_signal(const RunConfig& cfg, const std::string& waveform,
                          std::uint64_t rect_high) {
    if (waveform == "rect") {
        const std::uint64_t high = rect_high > 0 ? rect_high : cfg.period_t / 2;
        return build_rect_signal(high, cfg.period_t, cdouble{1.0, 0.0}, cfg.sample_rate);
    }
    return build_sounding_signal(cfg.signal_spec());
}

void run_generate(const RunConfig& cfg, const std::string& waveform, std::uint64_t rect_high,
                  const std::string& out, const std::string& plot) {
    const IqSignal x = make_test_signal(cfg, waveform, rect_high);
    write_iq(out, x, cfg.carrier_freq);
    if (!plot.empty()) export_plot(plot, x);
}

void run_simulate(const RunConfig& cfg, const std::string& test_path, const std::string& out,
                  const std::string& truth_path, const std::string& plot) {
    const IqSignal x_test = read_iq(test_path, cfg.sample_rate);
    auto [x_rec, truth] = simulate(x_test, cfg.impairment_config());
    write_iq(out, x_rec, cfg.carrier_freq);
    write_ground_truth(truth_path.empty() ? out + ".truth" : truth_path, truth);
    if (!plot.empty()) export_plot(plot, x_rec);
}

RestorationResult run_restore(const RunConfig& cfg, const std::string& rec_path,
                              const std::string& test_path, const std::string& out,
                              const std::string& trace_path, const std::string& plot) {
    const IqSignal x_rec = read_iq(rec_path, cfg.sample_rate);
    const IqSignal x_test = read_iq(test_path, cfg.sample_rate);
    RestorationResult result = restore(x_rec, x_test, cfg.restoration_config());
    write_iq(out, result.state.x_lin, cfg.carrier_freq);
    write_trace(trace_path.empty() ? out + ".trace" : trace_path, result);
    if (!plot.empty()) export_plot(plot, result.state.x_lin);
    return result;
}

void run_estimate(const RunConfig& cfg, const std::string& in, const std::string& out_freq,
                  const std::string& out_time, const std::string& out_pdp,
                  const std::string& plot_time, double attenuation_db, std::uint64_t pad_factor) {
    const IqSignal x_lin = read_iq(in, cfg.sample_rate);
    const ChannelEstimate est =
        estimate_channel(x_lin, cfg.signal_spec(), attenuation_db, pad_factor);
    const PowerDelayProfile pdp = power_delay_profile(est.h_time);
    if (!out_freq.empty()) export_spectrum_csv(out_freq, est.h_freq);
    if (!out_time.empty()) export_signal_csv(out_time, est.h_time);
    if (!out_pdp.empty()) export_pdp_csv(out_pdp, pdp);
    if (!plot_time.empty()) {
        PlotOptions opts;
        opts.db_scale = true;
        export_plot(plot_time, est.h_time, opts);
    }
}

void run_report(const std::string& trace_path, std::ostream& os) {
    const auto rows = read_trace(trace_path);
    if (rows.empty()) throw std::runtime_error("report: no iterations in " + trace_path);
    const std::size_t half = (rows.size() + 1) / 2;
    os << "Convergence of the iterative restoration\n";
    os << "Iteration  Energy difference      Iteration  Energy difference\n";
    char buf[128];
    for (std::size_t i = 0; i < half; ++i) {
        std::snprintf(buf, sizeof(buf), "%9zu  %-17.6g", rows[i].iteration,
                      rows[i].convergence_energy);
        os << buf;
        if (half + i < rows.size()) {
            std::snprintf(buf, sizeof(buf), "      %9zu  %-17.6g", rows[half + i].iteration,
                          rows[half + i].convergence_energy);
            os << buf;
        }
        os << '\n';
    }
}

void run_pipeline(const RunConfig& cfg, const std::string& dir, const std::string& waveform,
                  std::uint64_t rect_high) {
    const std::string test_iq = dir + "/x_test.iq";
    const std::string rec_iq = dir + "/x_rec.iq";
    const std::string truth = dir + "/truth.txt";
    const std::string lin_iq = dir + "/x_lin.iq";
    const std::string trace = dir + "/trace.txt";

    run_generate(cfg, waveform, rect_high, test_iq, dir + "/x_test.svg");
    run_simulate(cfg, test_iq, rec_iq, truth, dir + "/x_rec.svg");
    run_restore(cfg, rec_iq, test_iq, lin_iq, trace, dir + "/x_lin.svg");
    if (waveform == "zc")
        run_estimate(cfg, lin_iq, dir + "/h_freq.csv", dir + "/h_time.csv", dir + "/pdp.csv",
                     dir + "/h_time.svg", 60.0, 16);
    run_report(trace, std::cout);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sounder: SDR channel-sounding toolkit - impairment simulation, signal "
                 "restoration, channel estimation"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string waveform = "zc";
    std::uint64_t rect_high = 0;
    std::string in_path, test_path, out_path, truth_path, trace_path, plot_path;
    std::string out_freq, out_time, out_pdp, plot_time, dir;
    double attenuation_db = 60.0;
    std::uint64_t pad_factor = 16;

    std::vector<std::unique_ptr<ConfigBinder>> binders;
    auto bind = [&](CLI::App* sub) { binders.emplace_back(std::make_unique<ConfigBinder>(sub, cfg)); };
    auto add_waveform = [&](CLI::App* sub) {
        sub->add_option("--waveform", waveform, "test waveform: zc or rect")
            ->check(CLI::IsMember({"zc", "rect"}));
        sub->add_option("--rect-high", rect_high, "rect waveform high length (default period/2)");
    };

    auto* gen = app.add_subcommand("generate", "write the periodic test signal");
    bind(gen);
    add_waveform(gen);
    gen->add_option("--out", out_path, "output IQ file")->required();
    gen->add_option("--plot", plot_path, "optional SVG plot");

    auto* sim = app.add_subcommand("simulate", "synthesise an impaired receiver capture");
    bind(sim);
    sim->add_option("--test", test_path, "test-signal IQ file")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", out_path, "output IQ file")->required();
    sim->add_option("--truth", truth_path, "ground-truth record file");
    sim->add_option("--plot", plot_path, "optional SVG plot");

    auto* res = app.add_subcommand("restore", "run the iterative signal restoration");
    bind(res);
    res->add_option("--rec", in_path, "recorded IQ file")->required()->check(CLI::ExistingFile);
    res->add_option("--test", test_path, "test-signal IQ file")->required()->check(CLI::ExistingFile);
    res->add_option("--out", out_path, "restored single-period IQ file")->required();
    res->add_option("--trace", trace_path, "iteration trace file");
    res->add_option("--plot", plot_path, "optional SVG plot");

    auto* est = app.add_subcommand("estimate", "estimate the channel from a restored period");
    bind(est);
    est->add_option("--in", in_path, "restored IQ file")->required()->check(CLI::ExistingFile);
    est->add_option("--out-freq", out_freq, "transfer function CSV");
    est->add_option("--out-time", out_time, "impulse response CSV");
    est->add_option("--out-pdp", out_pdp, "power delay profile CSV");
    est->add_option("--plot-time", plot_time, "impulse response SVG (dB scale)");
    est->add_option("--attenuation-db", attenuation_db, "window attenuation in dB");
    est->add_option("--pad-factor", pad_factor, "impulse-response interpolation factor");

    auto* pipe = app.add_subcommand("pipeline", "generate, simulate, restore and estimate");
    bind(pipe);
    add_waveform(pipe);
    pipe->add_option("--dir", dir, "output directory (must exist)")
        ->required()
        ->check(CLI::ExistingDirectory);

    auto* rep = app.add_subcommand("report", "print the convergence table of a restoration run");
    rep->add_option("--trace", trace_path, "iteration trace file")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        for (auto& b : binders) b->finalize();
        if (gen->parsed()) run_generate(cfg, waveform, rect_high, out_path, plot_path);
        else if (sim->parsed()) run_simulate(cfg, test_path, out_path, truth_path, plot_path);
        else if (res->parsed()) run_restore(cfg, in_path, test_path, out_path, trace_path, plot_path);
        else if (est->parsed())
            run_estimate(cfg, in_path, out_freq, out_time, out_pdp, plot_time, attenuation_db,
                         pad_factor);
        else if (pipe->parsed()) run_pipeline(cfg, dir, waveform, rect_high);
        else if (rep->parsed()) run_report(trace_path, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
