// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations the implementation is checked
// against. Everything here is deliberately brute force and shares no code
// with the library paths under test.

#ifndef SOUNDER_TESTS_ORACLES_HPP
#define SOUNDER_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracles {

using cdouble = std::complex<double>;

/// O(n^2) DFT by direct summation; inverse applies 1/n.
inline std::vector<cdouble> brute_dft(const std::vector<cdouble>& x, std::size_t n_out,
                                      bool inverse = false) {
    std::vector<cdouble> out(n_out, cdouble{0.0, 0.0});
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n_out; ++k) {
        cdouble acc{0.0, 0.0};
        for (std::size_t t = 0; t < x.size() && t < n_out; ++t) {
            const double a = sign * 2.0 * std::numbers::pi * static_cast<double>(k) *
                             static_cast<double>(t) / static_cast<double>(n_out);
            acc += x[t] * cdouble{std::cos(a), std::sin(a)};
        }
        out[k] = inverse ? acc / static_cast<double>(n_out) : acc;
    }
    return out;
}

/// Double-loop linear cross-correlation, lags 0 .. len(a)-len(b).
inline std::vector<cdouble> brute_correlate(const std::vector<cdouble>& a,
                                            const std::vector<cdouble>& b) {
    std::vector<cdouble> out(a.size() - b.size() + 1, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < out.size(); ++k)
        for (std::size_t t = 0; t < b.size(); ++t) out[k] += a[k + t] * std::conj(b[t]);
    return out;
}

/// Cyclic autocorrelation by direct summation.
inline cdouble brute_cyclic_autocorr(const std::vector<cdouble>& x, std::size_t lag) {
    const std::size_t n = x.size();
    cdouble acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) acc += x[(t + lag) % n] * std::conj(x[t]);
    return acc;
}

/// Linear convolution truncated to the length of x.
inline std::vector<cdouble> brute_convolve(const std::vector<cdouble>& x,
                                           const std::vector<cdouble>& taps) {
    std::vector<cdouble> out(x.size(), cdouble{0.0, 0.0});
    for (std::size_t t = 0; t < x.size(); ++t)
        for (std::size_t d = 0; d < taps.size() && d <= t; ++d) out[t] += taps[d] * x[t - d];
    return out;
}

/// Sieve-based primality, independent of the trial-division path.
inline bool sieve_is_prime(std::uint64_t n, std::uint64_t sieve_limit = 1 << 16) {
    if (n < 2 || n > sieve_limit) throw std::invalid_argument("sieve oracle out of range");
    std::vector<bool> composite(sieve_limit + 1, false);
    for (std::uint64_t p = 2; p * p <= sieve_limit; ++p)
        if (!composite[p])
            for (std::uint64_t q = p * p; q <= sieve_limit; q += p) composite[q] = true;
    return !composite[n];
}

inline std::vector<cdouble> random_complex(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    auto u = [&] { return (static_cast<double>(gen() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    std::vector<cdouble> out(n);
    for (auto& v : out) v = cdouble{scale * u(), scale * u()};
    return out;
}

inline double energy_of(const std::vector<cdouble>& v) {
    double e = 0.0;
    for (const auto& x : v) e += std::norm(x);
    return e;
}

} // namespace oracles

#endif
