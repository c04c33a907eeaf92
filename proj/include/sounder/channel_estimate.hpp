// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_CHANNEL_ESTIMATE_HPP
#define SOUNDER_CHANNEL_ESTIMATE_HPP

#include "sounder/test_signal.hpp"
#include "sounder/types.hpp"

#include <cstddef>
#include <vector>

namespace sounder {

struct ChannelEstimate {
    Spectrum h_freq;  // n_zc bins
    IqSignal h_time;  // pad_factor * n_zc samples, 1/pad_factor sample spacing
    double window_attenuation_db = 60.0;
    std::size_t n_zc = 0;
};

struct PowerDelayProfile {
    std::vector<double> delays_s;
    std::vector<double> powers_db; // relative to the strongest sample
    double noise_floor_db = 0.0;
};

/// Averages the three clean sequence repetitions of a restored period:
/// drops the first and last half-repetitions, folds the remaining
/// 3*n_zc samples modulo n_zc (cyclically aligned), returns the mean.
IqSignal average_periods(const IqSignal& x_restored, std::size_t n_zc);

/// Bin-wise ratio of the same-length transforms of x_est and the reference
/// sequence. Errors out if any denominator bin collapses.
Spectrum estimate_transfer_function(const IqSignal& x_est, const IqSignal& x_zc);

/// Windowed (Dolph-Chebyshev, centred on the carrier bin), centre
/// zero-padded inverse transform of the transfer function; scaled so a unit
/// channel peaks at magnitude 1.
IqSignal estimate_impulse_response(const Spectrum& h_freq, double attenuation_db = 60.0,
                                   std::size_t pad_factor = 16);

/// Relative power per delay plus a noise-floor summary (median power over
/// the far quarter of the circularly shifted delay axis).
PowerDelayProfile power_delay_profile(const IqSignal& h_time);

/// Full chain: average_periods -> transfer function -> impulse response.
ChannelEstimate estimate_channel(const IqSignal& x_restored, const TestSignalSpec& spec,
                                 double attenuation_db = 60.0, std::size_t pad_factor = 16);

} // namespace sounder

#endif
