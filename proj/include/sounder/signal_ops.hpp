// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_SIGNAL_OPS_HPP
#define SOUNDER_SIGNAL_OPS_HPP

#include "sounder/types.hpp"

#include <cstddef>
#include <vector>

namespace sounder {

/// Linear cross-correlation out[k] = sum_t a[k+t] * conj(b[t]) over all
/// full-overlap lags k = 0 .. len(a)-len(b). Requires len(a) >= len(b) and
/// equal sample rates.
std::vector<cdouble> cross_correlate(const IqSignal& a, const IqSignal& b);

/// Indices of local maxima of v that reach rel_threshold * max(v),
/// greedily thinned so surviving peaks are at least min_spacing apart
/// (the larger peak wins; on ties the earlier index).
std::vector<std::size_t> find_peaks(const std::vector<double>& v, std::size_t min_spacing,
                                    double rel_threshold);

/// Centred moving average with reflective boundaries; kernel_width odd.
IqSignal lowpass_moving_average(const IqSignal& x, std::size_t kernel_width);

/// out[t] = x[t] - x[t-lag] for t >= lag, zeros before; 1 <= lag < len(x).
IqSignal seasonal_difference(const IqSignal& x, std::size_t lag);

/// Dolph-Chebyshev taper: equiripple sidelobes attenuation_db below the
/// main lobe, coefficients symmetric and max-normalised to 1.
RealWindow dolph_chebyshev_window(std::size_t length, double attenuation_db);

} // namespace sounder

#endif
