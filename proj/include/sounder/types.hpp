// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_TYPES_HPP
#define SOUNDER_TYPES_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sounder {

using cdouble = std::complex<double>;

/// Uniformly sampled complex baseband sequence.
struct IqSignal {
    std::vector<cdouble> samples;
    double sample_rate = 1.0; // Hz, > 0

    IqSignal() = default;
    IqSignal(std::vector<cdouble> s, double rate) : samples(std::move(s)), sample_rate(rate) {}

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    cdouble& operator[](std::size_t i) { return samples[i]; }
    const cdouble& operator[](std::size_t i) const { return samples[i]; }
};

/// DFT of an IqSignal. Bin k < size/2 holds baseband frequency k*bin_spacing,
/// the upper half holds the negative frequencies (standard DFT layout).
struct Spectrum {
    std::vector<cdouble> bins;
    double bin_spacing = 0.0; // Hz per bin

    std::size_t size() const { return bins.size(); }
    bool empty() const { return bins.empty(); }
};

/// Real, symmetric, max-normalised taper.
struct RealWindow {
    std::vector<double> coefficients;
    double attenuation_db = 0.0;

    std::size_t size() const { return coefficients.size(); }
};

/// Thrown when peak detection cannot lock onto the period structure.
class SyncError : public std::runtime_error {
  public:
    explicit SyncError(const std::string& what) : std::runtime_error(what) {}
};

/// Throws std::invalid_argument unless x is non-empty, finite and has a
/// positive sample rate.
void validate_signal(const IqSignal& x, const char* what);

} // namespace sounder

#endif
