// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/impairments.hpp"
#include "sounder/kernels.hpp"

#include <cmath>
#include <numbers>

namespace sounder {

void ImpairmentConfig::validate() const {
    if (num_periods < 4) throw std::invalid_argument("impairments: num_periods must be >= 4");
    if (channel_taps.empty()) throw std::invalid_argument("impairments: channel_taps must be non-empty");
    if (!(std::fabs(cfo) < 0.5)) throw std::invalid_argument("impairments: |cfo| must be < 0.5");
    if (block_duration >= block_season)
        throw std::invalid_argument("impairments: block_duration must be < block_season");
    if (block_duration + 2 * block_jitter > block_season)
        throw std::invalid_argument("impairments: jittered bursts would overlap");
    if (pulse_rate < 0.0) throw std::invalid_argument("impairments: pulse_rate must be >= 0");
}

IqSignal apply_channel(const IqSignal& x, const std::vector<cdouble>& taps) {
    validate_signal(x, "apply_channel");
    if (taps.empty()) throw std::invalid_argument("apply_channel: empty tap vector");
    IqSignal y;
    y.sample_rate = x.sample_rate;
    y.samples.assign(x.size(), cdouble{0.0, 0.0});
    for (std::size_t d = 0; d < taps.size(); ++d) {
        if (taps[d] == cdouble{0.0, 0.0}) continue;
        for (std::size_t t = d; t < x.size(); ++t) y.samples[t] += taps[d] * x.samples[t - d];
    }
    return y;
}

IqSignal apply_linear_distortion(const IqSignal& x, cdouble gain, cdouble zero_offset, double cfo,
                                 double phase) {
    validate_signal(x, "apply_linear_distortion");
    if (!(std::fabs(cfo) < 0.5)) throw std::invalid_argument("apply_linear_distortion: |cfo| must be < 0.5");
    IqSignal y;
    y.sample_rate = x.sample_rate;
    y.samples.resize(x.size());
    const double w = 2.0 * std::numbers::pi * cfo;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double a = w * static_cast<double>(t) + phase;
        y.samples[t] = (gain * x.samples[t] + zero_offset) * cdouble{std::cos(a), std::sin(a)};
    }
    return y;
}

std::pair<IqSignal, std::vector<BurstRecord>> inject_block_bursts(const IqSignal& x,
                                                                  const ImpairmentConfig& cfg,
                                                                  Rng& rng) {
    cfg.validate();
    IqSignal y = x;
    std::vector<BurstRecord> records;
    const std::size_t n = y.size();
    for (std::uint64_t k = 0;; ++k) {
        const std::int64_t nominal = static_cast<std::int64_t>(k * cfg.block_season);
        const std::int64_t jitter =
            cfg.block_jitter == 0
                ? 0
                : static_cast<std::int64_t>(rng.integer(2 * cfg.block_jitter + 1)) -
                      static_cast<std::int64_t>(cfg.block_jitter);
        const std::int64_t start = std::max<std::int64_t>(0, nominal + jitter);
        if (static_cast<std::size_t>(start) + cfg.block_duration > n) break;
        BurstRecord rec;
        rec.start = static_cast<std::size_t>(start);
        rec.end = rec.start + cfg.block_duration;
        rec.c0 = rng.complex_uniform(cfg.block_slope_scale);
        rec.c1 = rng.complex_uniform(cfg.block_slope_scale) /
                 static_cast<double>(cfg.block_duration);
        for (std::size_t t = rec.start; t < rec.end; ++t)
            y.samples[t] += rec.c0 + rec.c1 * static_cast<double>(t - rec.start);
        records.push_back(rec);
    }
    return {std::move(y), std::move(records)};
}

std::pair<IqSignal, std::vector<PulseRecord>> inject_pulse_interference(const IqSignal& x,
                                                                        const ImpairmentConfig& cfg,
                                                                        Rng& rng) {
    cfg.validate();
    IqSignal y = x;
    std::vector<PulseRecord> records;
    const std::size_t n = y.size();
    constexpr std::size_t kMaxWidth = 32;
    if (n <= kMaxWidth) return {std::move(y), std::move(records)};
    const std::uint64_t count = rng.poisson(cfg.pulse_rate * static_cast<double>(cfg.num_periods));
    for (std::uint64_t i = 0; i < count; ++i) {
        PulseRecord rec;
        rec.start = rng.integer(n - kMaxWidth);
        rec.width = 4 + rng.integer(kMaxWidth - 4 + 1);
        const double a = 2.0 * std::numbers::pi * rng.uniform();
        rec.value = cfg.pulse_amplitude * cdouble{std::cos(a), std::sin(a)};
        for (std::size_t t = rec.start; t < rec.start + rec.width; ++t) y.samples[t] += rec.value;
        records.push_back(rec);
    }
    return {std::move(y), std::move(records)};
}

IqSignal add_awgn(const IqSignal& x, double snr_db, Rng& rng) {
    validate_signal(x, "add_awgn");
    const double e = kernels::ops().energy(x.samples.data(), x.size());
    if (!(e > 0.0)) throw std::invalid_argument("add_awgn: zero-energy signal, SNR undefined");
    if (std::isinf(snr_db)) return x;
    const double signal_power = e / static_cast<double>(x.size());
    const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);
    const double sigma = std::sqrt(noise_power / 2.0);
    IqSignal y = x;
    for (auto& v : y.samples) v += rng.complex_gaussian(sigma);
    return y;
}

std::pair<IqSignal, GroundTruth> simulate(const IqSignal& x_test, const ImpairmentConfig& cfg) {
    validate_signal(x_test, "simulate");
    cfg.validate();
    Rng rng(cfg.seed);

    const std::size_t period = x_test.size();
    const std::size_t offset = rng.integer(period); // random partial period in front
    IqSignal stream;
    stream.sample_rate = x_test.sample_rate;
    stream.samples.reserve(offset + cfg.num_periods * period);
    for (std::size_t t = period - offset; t < period; ++t) stream.samples.push_back(x_test.samples[t]);
    for (std::uint64_t k = 0; k < cfg.num_periods; ++k)
        stream.samples.insert(stream.samples.end(), x_test.samples.begin(), x_test.samples.end());

    GroundTruth truth;
    truth.config = cfg;
    for (std::uint64_t k = 0; k < cfg.num_periods; ++k)
        truth.period_starts.push_back(offset + k * period);

    IqSignal y = apply_channel(stream, cfg.channel_taps);
    y = apply_linear_distortion(y, cfg.gain, cfg.zero_offset, cfg.cfo, cfg.phase);
    truth.clean_signal = y;

    auto [with_bursts, bursts] = inject_block_bursts(y, cfg, rng);
    truth.bursts = std::move(bursts);
    auto [with_pulses, pulses] = inject_pulse_interference(with_bursts, cfg, rng);
    truth.pulses = std::move(pulses);
    IqSignal x_rec = add_awgn(with_pulses, cfg.snr_db, rng);

    return {std::move(x_rec), std::move(truth)};
}

} // namespace sounder
