// SPDX-License-Identifier: Apache-2.0

#include "sounder/fft.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <cmath>

using namespace sounder;

namespace {

IqSignal sig(std::vector<cdouble> v) { return IqSignal{std::move(v), 1.0}; }

double max_abs_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("constant signal concentrates in the DC bin") {
    const Spectrum s = fft(sig({{1, 0}, {1, 0}, {1, 0}, {1, 0}}), 1);
    REQUIRE(s.size() == 4);
    CHECK(std::abs(s.bins[0] - cdouble{4.0, 0.0}) < 1e-12);
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(s.bins[i]) < 1e-12);
}

TEST_CASE("unit impulse has a flat spectrum") {
    const Spectrum s = fft(sig({{1, 0}, {0, 0}, {0, 0}, {0, 0}}), 1);
    for (const auto& b : s.bins) CHECK(std::abs(b - cdouble{1.0, 0.0}) < 1e-12);
}

TEST_CASE("inverse transform of the DC case") {
    Spectrum s;
    s.bins = {{4, 0}, {0, 0}, {0, 0}, {0, 0}};
    s.bin_spacing = 0.25;
    const IqSignal x = ifft(s);
    for (const auto& v : x.samples) CHECK(std::abs(v - cdouble{1.0, 0.0}) < 1e-12);

    Spectrum flat;
    flat.bins = {{1, 0}, {1, 0}, {1, 0}, {1, 0}};
    flat.bin_spacing = 0.25;
    const IqSignal delta = ifft(flat);
    CHECK(std::abs(delta.samples[0] - cdouble{1.0, 0.0}) < 1e-12);
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(delta.samples[i]) < 1e-12);
}

TEST_CASE("zero padding interleaves the unpadded bins") {
    const auto x = oracles::random_complex(8, 42);
    const Spectrum padded = fft(sig(x), 16);
    REQUIRE(padded.size() == 128);
    const auto direct = oracles::brute_dft(x, 8);
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(std::abs(padded.bins[16 * k] - direct[k]) < 1e-10);
}

TEST_CASE("matches the direct DFT for assorted small lengths") {
    for (const std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{5},
                                std::size_t{7}, std::size_t{12}, std::size_t{13}, std::size_t{16},
                                std::size_t{31}, std::size_t{61}, std::size_t{64}}) {
        const auto x = oracles::random_complex(n, 1000 + n);
        const Spectrum s = fft(sig(x), 1);
        const auto ref = oracles::brute_dft(x, n);
        const double scale = std::sqrt(oracles::energy_of(ref)) + 1e-30;
        CHECK(max_abs_diff(s.bins, ref) / scale < 1e-12);
    }
}

TEST_CASE("round trip is the identity up to 2^16") {
    for (const std::size_t n : {std::size_t{2}, std::size_t{5}, std::size_t{64}, std::size_t{1021},
                                std::size_t{4096}, std::size_t{40961}, std::size_t{65536}}) {
        const auto x = oracles::random_complex(n, 7 * n + 3);
        const IqSignal back = ifft(fft(sig(x), 1));
        const double scale = std::sqrt(oracles::energy_of(x) / static_cast<double>(n));
        CHECK(max_abs_diff(back.samples, x) / scale < 1e-12);
    }
}

TEST_CASE("Parseval holds relative to the padded length") {
    for (const std::size_t n : {std::size_t{16}, std::size_t{37}, std::size_t{1021}}) {
        for (const std::size_t pad : {std::size_t{1}, std::size_t{3}, std::size_t{16}}) {
            const auto x = oracles::random_complex(n, n * pad);
            const Spectrum s = fft(sig(x), pad);
            const double time_energy = oracles::energy_of(x);
            const double freq_energy =
                oracles::energy_of(s.bins) / static_cast<double>(s.size());
            CHECK(std::abs(time_energy - freq_energy) / time_energy < 1e-10);
        }
    }
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(fft(IqSignal{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fft(sig({{1, 0}}), 0), std::invalid_argument);
    CHECK_THROWS_AS(ifft(Spectrum{}), std::invalid_argument);
    IqSignal bad;
    bad.samples = {cdouble{std::nan(""), 0.0}};
    CHECK_THROWS_AS(fft(bad, 1), std::invalid_argument);
}

TEST_CASE("spectrum bin spacing tracks the padded length") {
    IqSignal x = sig(oracles::random_complex(10, 5));
    x.sample_rate = 100.0;
    CHECK(fft(x, 1).bin_spacing == doctest::Approx(10.0));
    CHECK(fft(x, 16).bin_spacing == doctest::Approx(0.625));
}
