// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_TEST_SIGNAL_HPP
#define SOUNDER_TEST_SIGNAL_HPP

#include "sounder/types.hpp"

#include <cstdint>

namespace sounder {

/// Parameters of the periodic sounding waveform: `repetitions` copies of a
/// prime-length Zadoff-Chu sequence followed by silence up to period_t.
struct TestSignalSpec {
    std::uint64_t n_zc = 1021;
    std::uint64_t root = 25;
    std::uint64_t repetitions = 4;
    std::uint64_t period_t = 8192;
    double sample_rate = 25.6e6;

    void validate() const;
};

bool is_prime(std::uint64_t n);

/// Zadoff-Chu sequence x[t] = exp(-i*pi*root*t*(t+1)/n_zc), t < n_zc.
/// n_zc must be prime and root coprime to it.
IqSignal zadoff_chu(std::uint64_t n_zc, std::uint64_t root, double sample_rate = 25.6e6);

/// Single period of the sounding signal: the Zadoff-Chu sequence cycled for
/// repetitions * n_zc samples, zero until period_t.
IqSignal build_sounding_signal(const TestSignalSpec& spec);

/// Rectangular evaluation signal: `amplitude` for t < high_len, 0 after.
IqSignal build_rect_signal(std::uint64_t high_len, std::uint64_t period_t, cdouble amplitude,
                           double sample_rate = 25.6e6);

/// Smallest prime >= 2 * max_delay_samples.
std::uint64_t choose_n_zc(std::uint64_t max_delay_samples);

} // namespace sounder

#endif
