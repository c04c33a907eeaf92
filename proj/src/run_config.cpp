// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/run_config.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace sounder {

cdouble parse_complex(const std::string& text) {
    std::string s;
    for (const char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("parse_complex: empty value");

    auto is_imag_tag = [](char c) { return c == 'i' || c == 'j'; };

    // Pure imaginary forms: "i", "-i", "2.5i"
    if (is_imag_tag(s.back())) {
        std::string body = s.substr(0, s.size() - 1);
        // Split "a+bi" on the last sign that is not an exponent sign.
        for (std::size_t k = body.size(); k-- > 1;) {
            if ((body[k] == '+' || body[k] == '-') &&
                !(body[k - 1] == 'e' || body[k - 1] == 'E')) {
                const std::string re_part = body.substr(0, k);
                std::string im_part = body.substr(k);
                if (im_part == "+") im_part = "1";
                if (im_part == "-") im_part = "-1";
                std::size_t used = 0;
                const double re = std::stod(re_part, &used);
                if (used != re_part.size()) throw std::invalid_argument("parse_complex: bad value " + text);
                const double im = std::stod(im_part, &used);
                if (used != im_part.size()) throw std::invalid_argument("parse_complex: bad value " + text);
                return {re, im};
            }
        }
        if (body.empty() || body == "+") return {0.0, 1.0};
        if (body == "-") return {0.0, -1.0};
        std::size_t used = 0;
        const double im = std::stod(body, &used);
        if (used != body.size()) throw std::invalid_argument("parse_complex: bad value " + text);
        return {0.0, im};
    }

    std::size_t used = 0;
    const double re = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("parse_complex: bad value " + text);
    return {re, 0.0};
}

std::vector<cdouble> parse_complex_list(const std::string& text) {
    std::vector<cdouble> out;
    std::string item;
    for (const char c : text) {
        if (c == ',') {
            out.push_back(parse_complex(item));
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(parse_complex(item));
    if (out.empty()) throw std::invalid_argument("parse_complex_list: empty list");
    return out;
}

TestSignalSpec RunConfig::signal_spec() const {
    TestSignalSpec spec;
    spec.n_zc = n_zc;
    spec.root = root;
    spec.repetitions = repetitions;
    spec.period_t = period_t;
    spec.sample_rate = sample_rate;
    return spec;
}

ImpairmentConfig RunConfig::impairment_config() const {
    ImpairmentConfig cfg;
    cfg.num_periods = num_periods;
    cfg.channel_taps = parse_complex_list(channel_taps);
    cfg.gain = parse_complex(gain);
    cfg.zero_offset = parse_complex(zero_offset);
    cfg.cfo = cfo;
    cfg.phase = phase;
    cfg.block_season = block_season;
    cfg.block_duration = block_duration;
    cfg.block_slope_scale = block_slope_scale;
    cfg.block_jitter = block_jitter;
    cfg.pulse_rate = pulse_rate;
    cfg.pulse_amplitude = pulse_amplitude;
    cfg.snr_db = snr_db;
    cfg.seed = seed;
    return cfg;
}

RestorationConfig RunConfig::restoration_config() const {
    RestorationConfig cfg;
    cfg.iterations = iterations;
    cfg.block_season_init = block_season_init;
    cfg.block_kernel_init = block_kernel_init;
    cfg.peak_rel_threshold = peak_rel_threshold;
    cfg.outlier_factor = outlier_factor;
    return cfg;
}

} // namespace sounder
