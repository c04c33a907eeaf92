// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/channel_estimate.hpp"
#include "sounder/fft.hpp"
#include "sounder/signal_ops.hpp"

#include <algorithm>
#include <cmath>

namespace sounder {

IqSignal average_periods(const IqSignal& x_restored, std::size_t n_zc) {
    validate_signal(x_restored, "average_periods");
    if (n_zc < 2) throw std::invalid_argument("average_periods: n_zc too small");
    if (x_restored.size() < 4 * n_zc)
        throw std::invalid_argument("average_periods: input shorter than four repetitions");

    // Keep [n_zc/2, n_zc/2 + 3*n_zc): the half-repetitions at either end
    // may carry channel boundary transients.
    const std::size_t start = n_zc / 2;
    IqSignal out;
    out.sample_rate = x_restored.sample_rate;
    out.samples.assign(n_zc, cdouble{0.0, 0.0});
    for (std::size_t j = 0; j < 3 * n_zc; ++j) {
        const std::size_t src = start + j;
        out.samples[src % n_zc] += x_restored.samples[src];
    }
    for (auto& v : out.samples) v /= 3.0;
    return out;
}

Spectrum estimate_transfer_function(const IqSignal& x_est, const IqSignal& x_zc) {
    validate_signal(x_est, "estimate_transfer_function");
    validate_signal(x_zc, "estimate_transfer_function");
    if (x_est.size() != x_zc.size())
        throw std::invalid_argument("estimate_transfer_function: length mismatch");

    const Spectrum num = fft(x_est, 1);
    const Spectrum den = fft(x_zc, 1);
    const double floor = 1e-6 * std::sqrt(static_cast<double>(x_zc.size()));
    Spectrum h;
    h.bin_spacing = num.bin_spacing;
    h.bins.resize(num.size());
    for (std::size_t f = 0; f < num.size(); ++f) {
        if (std::abs(den.bins[f]) < floor)
            throw std::invalid_argument("estimate_transfer_function: reference spectrum has a near-zero bin");
        h.bins[f] = num.bins[f] / den.bins[f];
    }
    return h;
}

IqSignal estimate_impulse_response(const Spectrum& h_freq, double attenuation_db,
                                   std::size_t pad_factor) {
    if (h_freq.empty()) throw std::invalid_argument("estimate_impulse_response: empty spectrum");
    if (pad_factor < 1) throw std::invalid_argument("estimate_impulse_response: pad_factor must be >= 1");

    const std::size_t n = h_freq.size();
    const RealWindow win = dolph_chebyshev_window(n, attenuation_db);

    // Apply the window centred on the carrier: reorder the bins to
    // [negative | DC | positive], taper, reorder back.
    const std::size_t half_up = (n + 1) / 2; // index of the first negative frequency
    std::vector<cdouble> windowed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t orig = (i + half_up) % n; // fftshift
        windowed[i] = h_freq.bins[orig] * win.coefficients[i];
    }

    // Undo the shift while padding: zeros go into the band edges (the
    // centre of the shifted layout), keeping the conjugate-frequency
    // arrangement of the DFT intact.
    const std::size_t m = pad_factor * n;
    Spectrum padded;
    padded.bin_spacing = h_freq.bin_spacing;
    padded.bins.assign(m, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t orig = (i + half_up) % n;
        const std::size_t dest = orig < half_up ? orig : m - (n - orig);
        padded.bins[dest] = windowed[i];
    }

    IqSignal h = ifft(padded);
    double win_sum = 0.0;
    for (const double c : win.coefficients) win_sum += c;
    const double scale = static_cast<double>(m) / win_sum; // unit channel -> unit peak
    for (auto& v : h.samples) v *= scale;
    h.sample_rate = h_freq.bin_spacing * static_cast<double>(n) * static_cast<double>(pad_factor);
    return h;
}

PowerDelayProfile power_delay_profile(const IqSignal& h_time) {
    validate_signal(h_time, "power_delay_profile");
    const std::size_t m = h_time.size();
    double max_mag = 0.0;
    for (const auto& v : h_time.samples) max_mag = std::max(max_mag, std::abs(v));
    if (!(max_mag > 0.0)) throw std::invalid_argument("power_delay_profile: all-zero impulse response");

    PowerDelayProfile pdp;
    pdp.delays_s.resize(m);
    pdp.powers_db.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        pdp.delays_s[i] = static_cast<double>(i) / h_time.sample_rate;
        const double rel = std::abs(h_time.samples[i]) / max_mag;
        pdp.powers_db[i] = rel > 0.0 ? std::max(20.0 * std::log10(rel), -300.0) : -300.0;
    }

    // Far positive delays on the centred axis: a region no physical tap
    // reaches, so its median power reads as the floor.
    std::vector<double> tail(pdp.powers_db.begin() + static_cast<std::ptrdiff_t>(m / 4),
                             pdp.powers_db.begin() + static_cast<std::ptrdiff_t>(m / 2));
    std::sort(tail.begin(), tail.end());
    pdp.noise_floor_db = tail.empty() ? -300.0
                         : (tail.size() % 2 == 1
                                ? tail[tail.size() / 2]
                                : 0.5 * (tail[tail.size() / 2 - 1] + tail[tail.size() / 2]));
    return pdp;
}

ChannelEstimate estimate_channel(const IqSignal& x_restored, const TestSignalSpec& spec,
                                 double attenuation_db, std::size_t pad_factor) {
    spec.validate();
    ChannelEstimate est;
    est.n_zc = spec.n_zc;
    est.window_attenuation_db = attenuation_db;
    const IqSignal x_est = average_periods(x_restored, spec.n_zc);
    const IqSignal x_zc = zadoff_chu(spec.n_zc, spec.root, x_restored.sample_rate);
    est.h_freq = estimate_transfer_function(x_est, x_zc);
    est.h_time = estimate_impulse_response(est.h_freq, attenuation_db, pad_factor);
    return est;
}

} // namespace sounder
