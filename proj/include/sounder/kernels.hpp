// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_KERNELS_HPP
#define SOUNDER_KERNELS_HPP

#include <complex>
#include <cstddef>

// Arithmetic inner loops shared by the FFT, correlation and restoration
// code. Every entry point has a scalar reference implementation and, on
// x86-64 with AVX2+FMA, a vectorised variant; the active set is picked once
// at runtime. The two variants are equivalence-tested against each other.

namespace sounder::kernels {

using cdouble = std::complex<double>;

enum class Backend { Automatic, Scalar, Avx2 };

struct Ops {
    // y[i] = a[i] * b[i]
    void (*cmul)(const cdouble* a, const cdouble* b, cdouble* y, std::size_t n);
    // y[i] = a[i] * conj(b[i])
    void (*cmul_conj)(const cdouble* a, const cdouble* b, cdouble* y, std::size_t n);
    // out[i] = |a[i]|
    void (*magnitude)(const cdouble* a, double* out, std::size_t n);
    // sum |a[i]|^2
    double (*energy)(const cdouble* a, std::size_t n);
    // sum a[i] * conj(b[i])
    cdouble (*dot_conj)(const cdouble* a, const cdouble* b, std::size_t n);
    // In-place radix-2 power-of-two transforms. `tw` is the half table
    // tw[k] = exp(-2*pi*i*k/n), k < n/2. The forward pass is
    // decimation-in-frequency and leaves the result bit-reversed; the
    // inverse pass is decimation-in-time, expects bit-reversed input,
    // produces natural order and does NOT apply the 1/n factor.
    void (*fft_forward_to_bitrev)(cdouble* data, const cdouble* tw, std::size_t n);
    void (*fft_inverse_from_bitrev)(cdouble* data, const cdouble* tw, std::size_t n);
};

/// Active operation table (dispatched once, thread-safe).
const Ops& ops();

/// Override the dispatch (tests). Automatic re-probes the CPU.
void set_backend(Backend b);

/// Name of the active backend: "scalar" or "avx2".
const char* backend_name();

/// True if the running CPU supports the AVX2 path.
bool avx2_available();

extern const Ops scalar_ops;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops avx2_ops;
#endif

} // namespace sounder::kernels

#endif
