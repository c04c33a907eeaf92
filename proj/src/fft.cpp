// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "sounder/fft.hpp"
#include "sounder/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace sounder {
namespace fft_detail {
namespace {

struct Pow2Tables {
    std::size_t n = 0;
    std::vector<cdouble> twiddle; // exp(-2*pi*i*k/n), k < n/2
    std::vector<std::uint32_t> bitrev;
};

struct BluesteinPlan {
    std::size_t n = 0; // transform length
    std::size_t m = 0; // power-of-two convolution length, >= 2n-1
    std::vector<cdouble> chirp;      // exp(-i*pi*k^2/n), k < n
    std::vector<cdouble> chirp_spec; // forward transform of the extended conjugate chirp (bit-reversed order)
    std::shared_ptr<const Pow2Tables> inner;
};

// Small LRU plan caches. Transform sizes repeat heavily inside a run
// (every restoration iteration re-uses the same lengths), but differ
// across seeds, so the caches are bounded.
template <typename Plan>
class PlanCache {
  public:
    explicit PlanCache(std::size_t capacity) : capacity_(capacity) {}

    template <typename Make>
    std::shared_ptr<const Plan> get(std::size_t n, Make make) {
        {
            std::lock_guard lock(mu_);
            for (auto it = entries_.begin(); it != entries_.end(); ++it) {
                if (it->first == n) {
                    entries_.splice(entries_.begin(), entries_, it);
                    return entries_.front().second;
                }
            }
        }
        auto plan = std::shared_ptr<const Plan>(make(n));
        std::lock_guard lock(mu_);
        for (auto& e : entries_)
            if (e.first == n) return e.second;
        entries_.emplace_front(n, plan);
        while (entries_.size() > capacity_) entries_.pop_back();
        return plan;
    }

    void clear() {
        std::lock_guard lock(mu_);
        entries_.clear();
    }

  private:
    std::size_t capacity_;
    std::mutex mu_;
    std::list<std::pair<std::size_t, std::shared_ptr<const Plan>>> entries_;
};

PlanCache<Pow2Tables>& pow2_cache() {
    static PlanCache<Pow2Tables> cache(8);
    return cache;
}

PlanCache<BluesteinPlan>& bluestein_cache() {
    static PlanCache<BluesteinPlan> cache(4);
    return cache;
}

Pow2Tables* make_pow2_tables(std::size_t n) {
    auto* t = new Pow2Tables;
    t->n = n;
    t->twiddle.resize(n / 2);
    const double k2angle = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = k2angle * static_cast<double>(k);
        t->twiddle[k] = {std::cos(a), std::sin(a)};
    }
    t->bitrev.resize(n);
    std::uint32_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::uint32_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
        t->bitrev[i] = static_cast<std::uint32_t>(r);
    }
    return t;
}

std::shared_ptr<const Pow2Tables> pow2_tables(std::size_t n) {
    return pow2_cache().get(n, make_pow2_tables);
}

void bitrev_permute(std::vector<cdouble>& d, const Pow2Tables& t) {
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t r = t.bitrev[i];
        if (i < r) std::swap(d[i], d[r]);
    }
}

// In-place power-of-two transform, natural order on both sides.
// The inverse applies the 1/n factor.
void pow2_fft(std::vector<cdouble>& d, bool inverse, const Pow2Tables& t) {
    const std::size_t n = d.size();
    if (n <= 1) return;
    const auto& k = kernels::ops();
    if (!inverse) {
        k.fft_forward_to_bitrev(d.data(), t.twiddle.data(), n);
        bitrev_permute(d, t);
    } else {
        bitrev_permute(d, t);
        k.fft_inverse_from_bitrev(d.data(), t.twiddle.data(), n);
        const double s = 1.0 / static_cast<double>(n);
        for (auto& v : d) v *= s;
    }
}

// exp(-i*pi*k^2/n) with the phase reduced modulo 2n in exact integer
// arithmetic; k^2 would otherwise lose precision for large transforms.
cdouble chirp_coeff(std::uint64_t k, std::uint64_t n) {
    const std::uint64_t kmod = k % (2 * n);
    const std::uint64_t k2 = (kmod * kmod) % (2 * n);
    const double a = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    return {std::cos(a), std::sin(a)};
}

BluesteinPlan* make_bluestein_plan(std::size_t n) {
    auto* p = new BluesteinPlan;
    p->n = n;
    p->m = next_pow2(2 * n - 1);
    p->inner = pow2_tables(p->m);
    p->chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) p->chirp[k] = chirp_coeff(k, n);
    // Extended conjugate chirp c[j] = conj(chirp[|j|]) on the circle of
    // length m, then transformed once. Kept in bit-reversed order so the
    // convolution below never needs a reordering pass.
    std::vector<cdouble> c(p->m, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        const cdouble v = std::conj(p->chirp[k]);
        c[k] = v;
        if (k != 0) c[p->m - k] = v;
    }
    kernels::ops().fft_forward_to_bitrev(c.data(), p->inner->twiddle.data(), p->m);
    p->chirp_spec = std::move(c);
    return p;
}

std::shared_ptr<const BluesteinPlan> bluestein_plan(std::size_t n) {
    return bluestein_cache().get(n, make_bluestein_plan);
}

// Forward length-n DFT of `in` (n arbitrary) via chirp-z convolution.
std::vector<cdouble> bluestein_forward(const std::vector<cdouble>& in, std::size_t n) {
    const auto plan = bluestein_plan(n);
    const auto& k = kernels::ops();
    std::vector<cdouble> a(plan->m, cdouble{0.0, 0.0});
    k.cmul(in.data(), plan->chirp.data(), a.data(), std::min(in.size(), n));
    k.fft_forward_to_bitrev(a.data(), plan->inner->twiddle.data(), plan->m);
    k.cmul(a.data(), plan->chirp_spec.data(), a.data(), plan->m);
    k.fft_inverse_from_bitrev(a.data(), plan->inner->twiddle.data(), plan->m);
    const double s = 1.0 / static_cast<double>(plan->m);
    std::vector<cdouble> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * plan->chirp[i] * s;
    return out;
}

} // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<cdouble> dft(const std::vector<cdouble>& in, std::size_t n_out, bool inverse) {
    if (n_out == 0) return {};
    if (!inverse) {
        if (is_pow2(n_out)) {
            std::vector<cdouble> d(in.begin(), in.begin() + std::min(in.size(), n_out));
            d.resize(n_out, cdouble{0.0, 0.0});
            pow2_fft(d, false, *pow2_tables(n_out));
            return d;
        }
        return bluestein_forward(in, n_out);
    }
    if (is_pow2(n_out)) {
        std::vector<cdouble> d(in.begin(), in.begin() + std::min(in.size(), n_out));
        d.resize(n_out, cdouble{0.0, 0.0});
        pow2_fft(d, true, *pow2_tables(n_out));
        return d;
    }
    // IDFT(x) = conj(DFT(conj(x))) / n
    std::vector<cdouble> c(n_out, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < std::min(in.size(), n_out); ++i) c[i] = std::conj(in[i]);
    auto out = bluestein_forward(c, n_out);
    const double s = 1.0 / static_cast<double>(n_out);
    for (auto& v : out) v = std::conj(v) * s;
    return out;
}

std::vector<cdouble> correlate_fft(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    const std::size_t na = a.size(), nb = b.size();
    const std::size_t m = next_pow2(na);
    const auto tables = pow2_tables(m);
    const auto& k = kernels::ops();

    std::vector<cdouble> fa(a);
    fa.resize(m, cdouble{0.0, 0.0});
    std::vector<cdouble> fb(b.begin(), b.end());
    fb.resize(m, cdouble{0.0, 0.0});
    k.fft_forward_to_bitrev(fa.data(), tables->twiddle.data(), m);
    k.fft_forward_to_bitrev(fb.data(), tables->twiddle.data(), m);
    // a * conj(b), elementwise, still in bit-reversed order
    k.cmul_conj(fa.data(), fb.data(), fa.data(), m);
    k.fft_inverse_from_bitrev(fa.data(), tables->twiddle.data(), m);

    const double s = 1.0 / static_cast<double>(m);
    std::vector<cdouble> out(na - nb + 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fa[i] * s;
    return out;
}

void clear_plan_cache() {
    bluestein_cache().clear();
    pow2_cache().clear();
}

} // namespace fft_detail

void validate_signal(const IqSignal& x, const char* what) {
    if (x.samples.empty()) throw std::invalid_argument(std::string(what) + ": empty signal");
    if (!(x.sample_rate > 0.0)) throw std::invalid_argument(std::string(what) + ": sample_rate must be positive");
    for (const auto& v : x.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument(std::string(what) + ": non-finite sample");
}

Spectrum fft(const IqSignal& x, std::size_t pad_factor) {
    validate_signal(x, "fft");
    if (pad_factor < 1) throw std::invalid_argument("fft: pad_factor must be >= 1");
    const std::size_t n = x.size() * pad_factor;
    Spectrum s;
    s.bins = fft_detail::dft(x.samples, n, false);
    s.bin_spacing = x.sample_rate / static_cast<double>(n);
    return s;
}

IqSignal ifft(const Spectrum& s) {
    if (s.empty()) throw std::invalid_argument("ifft: empty spectrum");
    IqSignal x;
    x.samples = fft_detail::dft(s.bins, s.size(), true);
    x.sample_rate = s.bin_spacing * static_cast<double>(s.size());
    if (!(x.sample_rate > 0.0)) x.sample_rate = 1.0;
    return x;
}

} // namespace sounder
