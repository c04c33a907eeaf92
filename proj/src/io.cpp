// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sounder {
namespace {

std::string meta_path(const std::string& path) { return path + ".meta"; }

void append_le32(std::string& out, float v) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<char>(u & 0xFF));
    out.push_back(static_cast<char>((u >> 8) & 0xFF));
    out.push_back(static_cast<char>((u >> 16) & 0xFF));
    out.push_back(static_cast<char>((u >> 24) & 0xFF));
}

float decode_le32(const unsigned char* p) {
    const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                            (static_cast<std::uint32_t>(p[1]) << 8) |
                            (static_cast<std::uint32_t>(p[2]) << 16) |
                            (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(u);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

} // namespace

void write_iq(const std::string& path, const IqSignal& x, double carrier_freq) {
    if (!(x.sample_rate > 0.0)) throw std::invalid_argument("write_iq: sample_rate must be positive");
    std::string payload;
    payload.reserve(x.size() * 8);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cdouble v = x.samples[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("write_iq: non-finite value at sample " + std::to_string(i));
        append_le32(payload, static_cast<float>(v.real()));
        append_le32(payload, static_cast<float>(v.imag()));
    }
    auto f = open_out(path, std::ios::binary);
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!f) throw std::runtime_error("write_iq: short write to " + path);

    auto m = open_out(meta_path(path));
    m << "sample_rate=" << fmt17(x.sample_rate) << "\n";
    if (carrier_freq > 0.0) m << "carrier_freq=" << fmt17(carrier_freq) << "\n";
    m << "length=" << x.size() << "\n";
}

IqSignal read_iq(const std::string& path, double fallback_sample_rate) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_iq: cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.empty()) throw std::runtime_error("read_iq: empty file " + path);
    if (data.size() % 8 != 0)
        throw std::runtime_error("read_iq: truncated file (byte length not a multiple of 8): " + path);

    IqSignal x;
    x.sample_rate = fallback_sample_rate;
    const std::size_t n = data.size() / 8;
    x.samples.resize(n);
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    for (std::size_t i = 0; i < n; ++i) {
        const float re = decode_le32(p + 8 * i);
        const float im = decode_le32(p + 8 * i + 4);
        if (!std::isfinite(re) || !std::isfinite(im))
            throw std::runtime_error("read_iq: non-finite value at sample " + std::to_string(i));
        x.samples[i] = cdouble{re, im};
    }

    std::ifstream m(meta_path(path));
    if (m) {
        std::string line;
        while (std::getline(m, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            if (line.substr(0, eq) == "sample_rate") x.sample_rate = std::stod(line.substr(eq + 1));
        }
    }
    if (!(x.sample_rate > 0.0))
        throw std::runtime_error("read_iq: no sample rate available for " + path);
    return x;
}

void export_signal_csv(const std::string& path, const IqSignal& x) {
    validate_signal(x, "export_signal_csv");
    auto f = open_out(path);
    f << "index,time_s,real,imag,magnitude,phase_rad\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cdouble v = x.samples[i];
        f << i << ',' << fmt(static_cast<double>(i) / x.sample_rate) << ',' << fmt(v.real()) << ','
          << fmt(v.imag()) << ',' << fmt(std::abs(v)) << ',' << fmt(std::arg(v)) << '\n';
    }
}

void export_spectrum_csv(const std::string& path, const Spectrum& s) {
    if (s.empty()) throw std::invalid_argument("export_spectrum_csv: empty spectrum");
    auto f = open_out(path);
    f << "index,frequency_hz,real,imag,magnitude,phase_rad\n";
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double freq = (i <= n / 2 ? static_cast<double>(i)
                                        : static_cast<double>(i) - static_cast<double>(n)) *
                            s.bin_spacing;
        const cdouble v = s.bins[i];
        f << i << ',' << fmt(freq) << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << ','
          << fmt(std::abs(v)) << ',' << fmt(std::arg(v)) << '\n';
    }
}

void export_pdp_csv(const std::string& path, const PowerDelayProfile& pdp) {
    auto f = open_out(path);
    f << "index,delay_s,power_db\n";
    for (std::size_t i = 0; i < pdp.powers_db.size(); ++i)
        f << i << ',' << fmt(pdp.delays_s[i]) << ',' << fmt(pdp.powers_db[i]) << '\n';
    f << "# noise_floor_db=" << fmt(pdp.noise_floor_db) << '\n';
}

std::string phase_colour(double phase) {
    const double two_pi = 2.0 * std::numbers::pi;
    double p = std::fmod(phase, two_pi);
    if (p < 0) p += two_pi;
    const double quarter = std::numbers::pi / 2.0;
    // Anchors: 0 -> green (120 deg), pi/2 -> yellow (60), pi -> red (0),
    // 3*pi/2 -> blue (-120 == 240); linear in between, 360 deg per cycle.
    static const double hues[5] = {120.0, 60.0, 0.0, -120.0, -240.0};
    const int seg = std::min(3, static_cast<int>(p / quarter));
    const double frac = (p - seg * quarter) / quarter;
    double hue = hues[seg] + (hues[seg + 1] - hues[seg]) * frac;
    hue = std::fmod(std::fmod(hue, 360.0) + 360.0, 360.0);

    // HSV -> RGB at full saturation and value.
    const double hh = hue / 60.0;
    const int sector = static_cast<int>(hh) % 6;
    const double frac2 = hh - std::floor(hh);
    const double q = 1.0 - frac2;
    double r = 0, g = 0, b = 0;
    switch (sector) {
    case 0: r = 1; g = frac2; b = 0; break;
    case 1: r = q; g = 1; b = 0; break;
    case 2: r = 0; g = 1; b = frac2; break;
    case 3: r = 0; g = q; b = 1; break;
    case 4: r = frac2; g = 0; b = 1; break;
    default: r = 1; g = 0; b = q; break;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(r * 255)),
                  static_cast<int>(std::lround(g * 255)), static_cast<int>(std::lround(b * 255)));
    return buf;
}

void export_plot(const std::string& path, const IqSignal& x, const PlotOptions& opts) {
    validate_signal(x, "export_plot");
    const std::size_t n = x.size();

    // Deterministic decimation: strongest sample per bucket.
    std::vector<std::size_t> picks;
    if (n <= opts.max_strokes) {
        picks.resize(n);
        for (std::size_t i = 0; i < n; ++i) picks[i] = i;
    } else {
        picks.reserve(opts.max_strokes);
        for (std::size_t b = 0; b < opts.max_strokes; ++b) {
            const std::size_t lo = b * n / opts.max_strokes;
            const std::size_t hi = std::max(lo + 1, (b + 1) * n / opts.max_strokes);
            std::size_t best = lo;
            for (std::size_t i = lo + 1; i < hi; ++i)
                if (std::abs(x.samples[i]) > std::abs(x.samples[best])) best = i;
            picks.push_back(best);
        }
    }

    double max_mag = 0.0;
    for (const auto& v : x.samples) max_mag = std::max(max_mag, std::abs(v));
    if (!(max_mag > 0.0)) max_mag = 1.0;

    const double w = opts.width, h = opts.height;
    const double margin = 8.0;
    const double mid = h / 2.0;
    const double span = (h - 2.0 * margin) / 2.0;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
        << opts.height << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opts.db_scale)
        svg << "<line x1=\"0\" y1=\"" << fmt(mid) << "\" x2=\"" << opts.width << "\" y2=\""
            << fmt(mid) << "\" stroke=\"#cccccc\"/>\n";

    const double denom = picks.size() > 1 ? static_cast<double>(picks.size() - 1) : 1.0;
    for (std::size_t k = 0; k < picks.size(); ++k) {
        const cdouble v = x.samples[picks[k]];
        const double px = margin + (w - 2.0 * margin) * static_cast<double>(k) / denom;
        const std::string colour = phase_colour(std::arg(v));
        if (opts.db_scale) {
            const double rel = std::abs(v) / max_mag;
            const double db = rel > 0.0 ? std::max(20.0 * std::log10(rel), opts.db_floor) : opts.db_floor;
            const double y_top = margin + (h - 2.0 * margin) * (-db / -opts.db_floor);
            svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(h - margin) << "\" x2=\"" << fmt(px)
                << "\" y2=\"" << fmt(y_top) << "\" stroke=\"" << colour << "\"/>\n";
        } else {
            const double a = std::abs(v) / max_mag * span;
            svg << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(mid + a) << "\" x2=\"" << fmt(px)
                << "\" y2=\"" << fmt(mid - a) << "\" stroke=\"" << colour << "\"/>\n";
        }
    }
    svg << "</svg>\n";

    auto f = open_out(path);
    f << svg.str();
}

void write_ground_truth(const std::string& path, const GroundTruth& truth) {
    auto f = open_out(path);
    f << "# simulated capture ground truth\n";
    f << "seed=" << truth.config.seed << "\n";
    f << "num_periods=" << truth.config.num_periods << "\n";
    f << "cfo=" << fmt17(truth.config.cfo) << "\n";
    f << "phase=" << fmt17(truth.config.phase) << "\n";
    f << "gain=" << fmt17(truth.config.gain.real()) << ',' << fmt17(truth.config.gain.imag()) << "\n";
    f << "zero_offset=" << fmt17(truth.config.zero_offset.real()) << ','
      << fmt17(truth.config.zero_offset.imag()) << "\n";
    f << "snr_db=" << fmt17(truth.config.snr_db) << "\n";
    for (const std::size_t s : truth.period_starts) f << "period_start=" << s << "\n";
    for (const auto& b : truth.bursts)
        f << "burst=" << b.start << ',' << b.end << ',' << fmt17(b.c0.real()) << ','
          << fmt17(b.c0.imag()) << ',' << fmt17(b.c1.real()) << ',' << fmt17(b.c1.imag()) << "\n";
    for (const auto& p : truth.pulses)
        f << "pulse=" << p.start << ',' << p.width << ',' << fmt17(p.value.real()) << ','
          << fmt17(p.value.imag()) << "\n";
}

void write_trace(const std::string& path, const RestorationResult& result) {
    auto f = open_out(path);
    f << "# iteration f_hat phi_hat a_re a_im b_re b_im outliers boundaries conv_energy\n";
    for (const auto& r : result.trace)
        f << r.iteration << ' ' << fmt17(r.f_hat) << ' ' << fmt17(r.phi_hat) << ' '
          << fmt17(r.a_gain.real()) << ' ' << fmt17(r.a_gain.imag()) << ' '
          << fmt17(r.b_zero.real()) << ' ' << fmt17(r.b_zero.imag()) << ' ' << r.outlier_count
          << ' ' << r.boundary_count << ' ' << fmt17(r.convergence_energy) << "\n";
}

std::vector<TraceRow> read_trace(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_trace: cannot open " + path);
    std::vector<TraceRow> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        TraceRow row{};
        double skip;
        if (!(ss >> row.iteration)) continue;
        for (int i = 0; i < 8; ++i) ss >> skip;
        ss >> row.convergence_energy;
        rows.push_back(row);
    }
    return rows;
}

} // namespace sounder
