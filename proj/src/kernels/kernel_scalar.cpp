// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/kernels.hpp"

#include <cmath>

// Reference kernels. These definitions are the semantic ground truth the
// vectorised variants are tested against.

namespace sounder::kernels {
namespace {

void cmul_scalar(const cdouble* a, const cdouble* b, cdouble* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void cmul_conj_scalar(const cdouble* a, const cdouble* b, cdouble* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * std::conj(b[i]);
}

void magnitude_scalar(const cdouble* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::hypot(a[i].real(), a[i].imag());
}

double energy_scalar(const cdouble* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return acc;
}

cdouble dot_conj_scalar(const cdouble* a, const cdouble* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cdouble p = a[i] * std::conj(b[i]);
        re += p.real();
        im += p.imag();
    }
    return {re, im};
}

// Decimation in frequency; natural-order input, bit-reversed output.
void fft_forward_scalar(cdouble* d, const cdouble* tw, std::size_t n) {
    for (std::size_t len = n; len >= 2; len >>= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cdouble u = d[base + j];
                const cdouble v = d[base + half + j];
                d[base + j] = u + v;
                d[base + half + j] = (u - v) * tw[j * step];
            }
        }
    }
}

// Decimation in time; bit-reversed input, natural-order output, unscaled.
void fft_inverse_scalar(cdouble* d, const cdouble* tw, std::size_t n) {
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cdouble w = std::conj(tw[j * step]);
                const cdouble u = d[base + j];
                const cdouble t = d[base + half + j] * w;
                d[base + j] = u + t;
                d[base + half + j] = u - t;
            }
        }
    }
}

} // namespace

const Ops scalar_ops = {
    cmul_scalar,      cmul_conj_scalar,   magnitude_scalar,
    energy_scalar,    dot_conj_scalar,    fft_forward_scalar,
    fft_inverse_scalar,
};

} // namespace sounder::kernels
