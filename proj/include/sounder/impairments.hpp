// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_IMPAIRMENTS_HPP
#define SOUNDER_IMPAIRMENTS_HPP

#include "sounder/rng.hpp"
#include "sounder/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace sounder {

/// Forward-model parameters for a synthetic receiver capture.
struct ImpairmentConfig {
    std::uint64_t num_periods = 10;
    std::vector<cdouble> channel_taps{cdouble{1.0, 0.0}};
    cdouble gain{1.0, 0.0};
    cdouble zero_offset{0.04, 0.02};
    double cfo = 1.2e-4; // cycles per sample
    double phase = 0.4;  // radians
    std::uint64_t block_season = 1600;   // samples between burst starts
    std::uint64_t block_duration = 400;  // samples per burst
    double block_slope_scale = 0.35;     // burst ramp coefficient scale
    std::uint64_t block_jitter = 8;      // max start-time deviation
    double pulse_rate = 0.25;            // expected pulses per period
    double pulse_amplitude = 20.0;
    double snr_db = 20.0; // +infinity disables noise
    std::uint64_t seed = 1;

    void validate() const;
};

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Additive complex ramp c0 + c1*(t - start) over [start, end).
struct BurstRecord {
    std::size_t start = 0;
    std::size_t end = 0;
    cdouble c0{0.0, 0.0};
    cdouble c1{0.0, 0.0};
};

struct PulseRecord {
    std::size_t start = 0;
    std::size_t width = 0;
    cdouble value{0.0, 0.0};
};

/// Exact injected artefacts of one simulated capture, for oracle tests.
struct GroundTruth {
    std::vector<BurstRecord> bursts;
    std::vector<PulseRecord> pulses;
    std::vector<std::size_t> period_starts;
    IqSignal clean_signal; // channel + linear distortion, before artefacts
    ImpairmentConfig config;
};

/// Linear FIR convolution truncated to the input length.
IqSignal apply_channel(const IqSignal& x, const std::vector<cdouble>& taps);

/// y[t] = (gain*x[t] + zero_offset) * exp(i*(2*pi*cfo*t + phase)).
IqSignal apply_linear_distortion(const IqSignal& x, cdouble gain, cdouble zero_offset, double cfo,
                                 double phase);

/// Seasonal additive ramp bursts (receiver side, post-modulation).
std::pair<IqSignal, std::vector<BurstRecord>> inject_block_bursts(const IqSignal& x,
                                                                  const ImpairmentConfig& cfg,
                                                                  Rng& rng);

/// Sporadic short rectangular interference pulses.
std::pair<IqSignal, std::vector<PulseRecord>> inject_pulse_interference(const IqSignal& x,
                                                                        const ImpairmentConfig& cfg,
                                                                        Rng& rng);

/// Circularly symmetric AWGN at the given SNR; kNoNoise passes through.
IqSignal add_awgn(const IqSignal& x, double snr_db, Rng& rng);

/// Full forward model: tiles x_test num_periods times behind a random
/// partial period, then channel -> linear distortion -> bursts -> pulses ->
/// noise, recording everything that was injected.
std::pair<IqSignal, GroundTruth> simulate(const IqSignal& x_test, const ImpairmentConfig& cfg);

} // namespace sounder

#endif
