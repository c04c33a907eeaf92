// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_FFT_HPP
#define SOUNDER_FFT_HPP

#include "sounder/types.hpp"

#include <cstddef>
#include <vector>

namespace sounder {

/// DFT of x zero-padded (at the end) to pad_factor * x.size() points.
/// Any length is accepted; non-powers of two go through a Bluestein plan,
/// so prime lengths are exact transforms, not approximations.
Spectrum fft(const IqSignal& x, std::size_t pad_factor = 1);

/// Inverse DFT; ifft(fft(x, 1)) reproduces x.
IqSignal ifft(const Spectrum& s);

namespace fft_detail {

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
std::size_t next_pow2(std::size_t n);

/// Length-n_out DFT/IDFT of `in` zero-padded at the end. The inverse
/// applies the 1/n_out factor.
std::vector<cdouble> dft(const std::vector<cdouble>& in, std::size_t n_out, bool inverse);

/// Linear cross-correlation out[k] = sum_t a[k+t] * conj(b[t]) for
/// k = 0 .. a.size()-b.size(), computed with power-of-two transforms.
std::vector<cdouble> correlate_fft(const std::vector<cdouble>& a, const std::vector<cdouble>& b);

/// Drop all cached transform plans (tests / memory pressure).
void clear_plan_cache();

} // namespace fft_detail
} // namespace sounder

#endif
