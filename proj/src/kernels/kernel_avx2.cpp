// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

// AVX2+FMA kernels, two interleaved complex doubles per 256-bit vector.
// This translation unit is compiled with -mavx2 -mfma and must only be
// entered after the runtime CPU probe in dispatch.cpp.

#include "sounder/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <cmath>
#include <immintrin.h>

namespace sounder::kernels {
namespace {

// [a0 a1] * [b0 b1] elementwise complex product.
inline __m256d cmul2(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

// [a0 a1] * conj([b0 b1]) elementwise.
inline __m256d cmul_conj2(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmsubadd_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline const double* dp(const cdouble* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cdouble* p) { return reinterpret_cast<double*>(p); }

void cmul_avx2(const cdouble* a, const cdouble* b, cdouble* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(dp(a + i));
        const __m256d vb = _mm256_loadu_pd(dp(b + i));
        _mm256_storeu_pd(dp(y + i), cmul2(va, vb));
    }
    for (; i < n; ++i) y[i] = a[i] * b[i];
}

void cmul_conj_avx2(const cdouble* a, const cdouble* b, cdouble* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(dp(a + i));
        const __m256d vb = _mm256_loadu_pd(dp(b + i));
        _mm256_storeu_pd(dp(y + i), cmul_conj2(va, vb));
    }
    for (; i < n; ++i) y[i] = a[i] * std::conj(b[i]);
}

void magnitude_avx2(const cdouble* a, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v0 = _mm256_loadu_pd(dp(a + i));
        const __m256d v1 = _mm256_loadu_pd(dp(a + i + 2));
        const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
        // h = [n0 n2 n1 n3] -> [n0 n1 n2 n3]
        const __m256d sq = _mm256_permute4x64_pd(h, 0xD8);
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(sq));
    }
    for (; i < n; ++i) out[i] = std::hypot(a[i].real(), a[i].imag());
}

double energy_avx2(const cdouble* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(dp(a + i));
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s2 = _mm_add_pd(lo, hi);
    double sum = _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
    for (; i < n; ++i) sum += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return sum;
}

cdouble dot_conj_avx2(const cdouble* a, const cdouble* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(dp(a + i));
        const __m256d vb = _mm256_loadu_pd(dp(b + i));
        acc = _mm256_add_pd(acc, cmul_conj2(va, vb));
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    cdouble sum{_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s))};
    for (; i < n; ++i) sum += a[i] * std::conj(b[i]);
    return sum;
}

inline __m256d load_twiddle_pair(const cdouble* tw, std::size_t j, std::size_t step) {
    if (step == 1) return _mm256_loadu_pd(dp(tw + j));
    const __m128d lo = _mm_loadu_pd(dp(tw + j * step));
    const __m128d hi = _mm_loadu_pd(dp(tw + (j + 1) * step));
    return _mm256_set_m128d(hi, lo);
}

void fft_forward_avx2(cdouble* d, const cdouble* tw, std::size_t n) {
    for (std::size_t len = n; len >= 2; len >>= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        if (half >= 2) {
            for (std::size_t base = 0; base < n; base += len) {
                std::size_t j = 0;
                for (; j + 2 <= half; j += 2) {
                    const __m256d u = _mm256_loadu_pd(dp(d + base + j));
                    const __m256d v = _mm256_loadu_pd(dp(d + base + half + j));
                    const __m256d w = load_twiddle_pair(tw, j, step);
                    _mm256_storeu_pd(dp(d + base + j), _mm256_add_pd(u, v));
                    _mm256_storeu_pd(dp(d + base + half + j), cmul2(_mm256_sub_pd(u, v), w));
                }
                for (; j < half; ++j) {
                    const cdouble u = d[base + j];
                    const cdouble v = d[base + half + j];
                    d[base + j] = u + v;
                    d[base + half + j] = (u - v) * tw[j * step];
                }
            }
        } else {
            // len == 2: twiddle is unity
            for (std::size_t base = 0; base < n; base += 2) {
                const cdouble u = d[base];
                const cdouble v = d[base + 1];
                d[base] = u + v;
                d[base + 1] = u - v;
            }
        }
    }
}

void fft_inverse_avx2(cdouble* d, const cdouble* tw, std::size_t n) {
    const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        if (half >= 2) {
            for (std::size_t base = 0; base < n; base += len) {
                std::size_t j = 0;
                for (; j + 2 <= half; j += 2) {
                    const __m256d u = _mm256_loadu_pd(dp(d + base + j));
                    const __m256d v = _mm256_loadu_pd(dp(d + base + half + j));
                    const __m256d w = _mm256_xor_pd(load_twiddle_pair(tw, j, step), conj_mask);
                    const __m256d t = cmul2(v, w);
                    _mm256_storeu_pd(dp(d + base + j), _mm256_add_pd(u, t));
                    _mm256_storeu_pd(dp(d + base + half + j), _mm256_sub_pd(u, t));
                }
                for (; j < half; ++j) {
                    const cdouble w = std::conj(tw[j * step]);
                    const cdouble u = d[base + j];
                    const cdouble t = d[base + half + j] * w;
                    d[base + j] = u + t;
                    d[base + half + j] = u - t;
                }
            }
        } else {
            for (std::size_t base = 0; base < n; base += 2) {
                const cdouble u = d[base];
                const cdouble v = d[base + 1];
                d[base] = u + v;
                d[base + 1] = u - v;
            }
        }
    }
}

} // namespace

const Ops avx2_ops = {
    cmul_avx2,      cmul_conj_avx2,   magnitude_avx2,
    energy_avx2,    dot_conj_avx2,    fft_forward_avx2,
    fft_inverse_avx2,
};

} // namespace sounder::kernels

#endif // x86-64
