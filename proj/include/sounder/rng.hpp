// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_RNG_HPP
#define SOUNDER_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace sounder {

// Seedable generator with a pinned algorithm: raw mt19937_64 output with
// in-house conversions. The std:: distributions are implementation-defined
// and would break cross-toolchain reproducibility of recorded scenarios.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double uniform_sym() { return 2.0 * uniform() - 1.0; }

    /// Uniform integer in [0, n), rejection sampled (no modulo bias).
    std::uint64_t integer(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = bits();
        } while (x >= limit);
        return x % n;
    }

    /// Circularly symmetric complex Gaussian, per-component standard
    /// deviation sigma (trigonometric Box-Muller).
    std::complex<double> complex_gaussian(double sigma) {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = sigma * std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    /// Complex value with independent uniform components in [-scale, scale).
    std::complex<double> complex_uniform(double scale) {
        const double re = scale * uniform_sym();
        const double im = scale * uniform_sym();
        return {re, im};
    }

    /// Poisson count (Knuth product method; fine for small means).
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace sounder

#endif
