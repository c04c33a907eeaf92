// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/signal_ops.hpp"
#include "sounder/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sounder {
namespace {

// Mirror without edge repetition, period 2n-2.
std::size_t reflect_index(std::ptrdiff_t idx, std::size_t n) {
    if (n == 1) return 0;
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(2 * n - 2);
    std::ptrdiff_t j = ((idx % m) + m) % m;
    if (j >= static_cast<std::ptrdiff_t>(n)) j = m - j;
    return static_cast<std::size_t>(j);
}

double cheb_poly(std::size_t order, double x) {
    const double n = static_cast<double>(order);
    if (x > 1.0) return std::cosh(n * std::acosh(x));
    if (x < -1.0) {
        const double v = std::cosh(n * std::acosh(-x));
        return (order % 2 == 0) ? v : -v;
    }
    return std::cos(n * std::acos(x));
}

} // namespace

std::vector<cdouble> cross_correlate(const IqSignal& a, const IqSignal& b) {
    validate_signal(a, "cross_correlate");
    validate_signal(b, "cross_correlate");
    if (b.size() > a.size())
        throw std::invalid_argument("cross_correlate: second signal longer than first");
    if (a.sample_rate != b.sample_rate)
        throw std::invalid_argument("cross_correlate: sample rates differ");

    const std::size_t na = a.size(), nb = b.size();
    if (na * nb <= (std::size_t{1} << 16)) {
        std::vector<cdouble> out(na - nb + 1);
        for (std::size_t k = 0; k < out.size(); ++k) {
            cdouble acc{0.0, 0.0};
            for (std::size_t t = 0; t < nb; ++t) acc += a[k + t] * std::conj(b[t]);
            out[k] = acc;
        }
        return out;
    }
    return fft_detail::correlate_fft(a.samples, b.samples);
}

std::vector<std::size_t> find_peaks(const std::vector<double>& v, std::size_t min_spacing,
                                    double rel_threshold) {
    if (min_spacing < 1) throw std::invalid_argument("find_peaks: min_spacing must be >= 1");
    if (!(rel_threshold > 0.0) || rel_threshold > 1.0)
        throw std::invalid_argument("find_peaks: rel_threshold must be in (0, 1]");
    if (v.empty()) return {};

    const double vmax = *std::max_element(v.begin(), v.end());
    if (!(vmax > 0.0)) return {}; // no meaningful peaks in a non-positive profile
    const double floor = rel_threshold * vmax;

    // Local maxima; a plateau counts once, at its first index.
    std::vector<std::size_t> cand;
    const std::size_t n = v.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;
        const bool left_ok = (i == 0) || v[i - 1] < v[i];
        const bool right_ok = (j + 1 == n) || v[j + 1] < v[i];
        if (left_ok && right_ok && v[i] >= floor) cand.push_back(i);
        i = j + 1;
    }

    // Greedy thinning, larger peak first, earlier index on ties.
    std::vector<std::size_t> order(cand.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (v[cand[x]] != v[cand[y]]) return v[cand[x]] > v[cand[y]];
        return cand[x] < cand[y];
    });
    std::vector<std::size_t> kept;
    for (const std::size_t k : order) {
        const std::size_t idx = cand[k];
        bool ok = true;
        for (const std::size_t other : kept) {
            const std::size_t d = idx > other ? idx - other : other - idx;
            if (d < min_spacing) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

IqSignal lowpass_moving_average(const IqSignal& x, std::size_t kernel_width) {
    validate_signal(x, "lowpass_moving_average");
    if (kernel_width < 1 || kernel_width % 2 == 0)
        throw std::invalid_argument("lowpass_moving_average: kernel_width must be odd");

    const std::size_t n = x.size();
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(kernel_width / 2);
    IqSignal out;
    out.sample_rate = x.sample_rate;
    out.samples.resize(n);

    cdouble sum{0.0, 0.0};
    for (std::ptrdiff_t d = -h; d <= h; ++d) sum += x.samples[reflect_index(d, n)];
    const double inv = 1.0 / static_cast<double>(kernel_width);
    out.samples[0] = sum * inv;
    for (std::size_t t = 1; t < n; ++t) {
        sum += x.samples[reflect_index(static_cast<std::ptrdiff_t>(t) + h, n)];
        sum -= x.samples[reflect_index(static_cast<std::ptrdiff_t>(t) - 1 - h, n)];
        out.samples[t] = sum * inv;
    }
    return out;
}

IqSignal seasonal_difference(const IqSignal& x, std::size_t lag) {
    validate_signal(x, "seasonal_difference");
    if (lag < 1 || lag >= x.size())
        throw std::invalid_argument("seasonal_difference: lag out of range");
    IqSignal out;
    out.sample_rate = x.sample_rate;
    out.samples.assign(x.size(), cdouble{0.0, 0.0});
    for (std::size_t t = lag; t < x.size(); ++t) out.samples[t] = x.samples[t] - x.samples[t - lag];
    return out;
}

RealWindow dolph_chebyshev_window(std::size_t length, double attenuation_db) {
    if (length < 2) throw std::invalid_argument("dolph_chebyshev_window: length must be >= 2");
    if (!(attenuation_db > 0.0))
        throw std::invalid_argument("dolph_chebyshev_window: attenuation must be positive");

    // Equiripple design: sample the order-(n-1) Chebyshev polynomial on the
    // frequency circle and transform back; even lengths need the
    // half-sample alignment phase.
    const std::size_t n = length;
    const double ripple = std::pow(10.0, attenuation_db / 20.0);
    const double x0 = std::cosh(std::acosh(ripple) / static_cast<double>(n - 1));
    const double pi = std::numbers::pi;

    std::vector<cdouble> p(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = x0 * std::cos(pi * static_cast<double>(k) / static_cast<double>(n));
        p[k] = cdouble{cheb_poly(n - 1, x), 0.0};
        if (n % 2 == 0) p[k] *= std::polar(1.0, pi * static_cast<double>(k) / static_cast<double>(n));
    }
    const std::vector<cdouble> time = fft_detail::dft(p, n, false);

    std::vector<double> w(n);
    if (n % 2 == 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i < half; ++i) w[half - 1 + i] = time[i].real();
        for (std::size_t i = 1; i < half; ++i) w[half - 1 - i] = time[i].real();
    } else {
        const std::size_t half = n / 2;
        for (std::size_t i = 1; i <= half; ++i) {
            w[half + i - 1] = time[i].real();
            w[half - i] = time[i].real();
        }
    }
    const double wmax = *std::max_element(w.begin(), w.end());
    for (auto& v : w) v /= wmax;

    RealWindow win;
    win.coefficients = std::move(w);
    win.attenuation_db = attenuation_db;
    return win;
}

} // namespace sounder
