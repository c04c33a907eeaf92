// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_RUN_CONFIG_HPP
#define SOUNDER_RUN_CONFIG_HPP

#include "sounder/impairments.hpp"
#include "sounder/restoration.hpp"
#include "sounder/test_signal.hpp"

#include <string>

namespace sounder {

/// Flat bag of every tunable, with defaults; the CLI binds flags and the
/// key=value config file onto this.
struct RunConfig {
    // test signal
    std::uint64_t n_zc = 1021;
    std::uint64_t root = 25;
    std::uint64_t repetitions = 4;
    std::uint64_t period_t = 8192;
    double sample_rate = 25.6e6; // Hz
    double carrier_freq = 2.48e9; // Hz, informational

    // impairments
    std::uint64_t num_periods = 10;
    std::string channel_taps = "1"; // comma-separated complex values
    std::string gain = "1";
    std::string zero_offset = "0.04+0.02i";
    double cfo = 1.2e-4;
    double phase = 0.4;
    std::uint64_t block_season = 1600;
    std::uint64_t block_duration = 400;
    double block_slope_scale = 0.35;
    std::uint64_t block_jitter = 8;
    double pulse_rate = 0.25;
    double pulse_amplitude = 20.0;
    double snr_db = 20.0;
    std::uint64_t seed = 1;

    // restoration
    std::uint64_t iterations = 10;
    std::uint64_t block_season_init = 416;
    std::uint64_t block_kernel_init = 31;
    double peak_rel_threshold = 0.25;
    double outlier_factor = 1.5;

    TestSignalSpec signal_spec() const;
    ImpairmentConfig impairment_config() const;
    RestorationConfig restoration_config() const;
};

/// Parses "a", "bi", "a+bi", "a-bi" (also accepts 'j').
cdouble parse_complex(const std::string& text);

/// Comma-separated list of complex values.
std::vector<cdouble> parse_complex_list(const std::string& text);

} // namespace sounder

#endif
