// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failed criteria. argv[1] must point at
// the CLI binary (used by the determinism criterion).

#include "sounder/channel_estimate.hpp"
#include "sounder/fft.hpp"
#include "sounder/impairments.hpp"
#include "sounder/io.hpp"
#include "sounder/restoration.hpp"
#include "sounder/signal_ops.hpp"
#include "sounder/test_signal.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace sounder;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.str().empty()) detail << "; ";
            detail << what;
        }
    }
};

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

TestSignalSpec default_spec() { return TestSignalSpec{}; } // 1021/25/4/8192 @ 25.6 MS/s

ImpairmentConfig default_impairments(std::uint64_t seed) {
    ImpairmentConfig cfg; // defaults: all artefact classes enabled, SNR 20
    cfg.seed = seed;
    return cfg;
}

RestorationConfig default_restoration() { return RestorationConfig{}; }

struct Run {
    IqSignal x_test;
    IqSignal x_rec;
    GroundTruth truth;
    RestorationResult result;
    double seconds = 0.0;
};

Run run_scenario(const ImpairmentConfig& cfg, const TestSignalSpec& spec) {
    Run run;
    run.x_test = build_sounding_signal(spec);
    auto [x_rec, truth] = simulate(run.x_test, cfg);
    run.x_rec = std::move(x_rec);
    run.truth = std::move(truth);
    const double t0 = now_seconds();
    run.result = restore(run.x_rec, run.x_test, default_restoration());
    run.seconds = now_seconds() - t0;
    fft_detail::clear_plan_cache(); // recording lengths differ per seed
    return run;
}

double energy(const std::vector<cdouble>& v) {
    double e = 0.0;
    for (const auto& x : v) e += std::norm(x);
    return e;
}

// ---- criteria 1, 2, 4 share one 20-seed scenario --------------------------

constexpr double kSharedCfo = 3.17e-4;
constexpr double kSharedPhase = 0.7;
const cdouble kSharedGain{2.0, 0.0};
const cdouble kSharedOffset{0.1, 0.05};

std::vector<Run>& shared_runs() {
    static std::vector<Run> runs = [] {
        std::vector<Run> out;
        const TestSignalSpec spec = default_spec();
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            ImpairmentConfig cfg = default_impairments(seed);
            cfg.cfo = kSharedCfo;
            cfg.phase = kSharedPhase;
            cfg.gain = kSharedGain;
            cfg.zero_offset = kSharedOffset;
            out.push_back(run_scenario(cfg, spec));
        }
        return out;
    }();
    return runs;
}

Check criterion_cfo_phase() {
    Check c;
    for (std::size_t i = 0; i < shared_runs().size(); ++i) {
        const Run& run = shared_runs()[i];
        const double bin = 1.0 / (16.0 * static_cast<double>(run.x_rec.size()));
        const double f_err = std::fabs(run.result.state.f_hat - kSharedCfo);
        const double phi_err =
            std::fabs(std::remainder(run.result.state.phi_hat - kSharedPhase,
                                     2.0 * std::numbers::pi));
        char buf[160];
        std::snprintf(buf, sizeof(buf), "seed %zu: |df|=%.3g > %.3g", i + 1, f_err, bin);
        c.require(f_err <= bin, buf);
        std::snprintf(buf, sizeof(buf), "seed %zu: |dphi|=%.4f > 0.02", i + 1, phi_err);
        c.require(phi_err <= 0.02, buf);
        std::snprintf(buf, sizeof(buf), "seed %zu: runtime %.1fs >= 10s", i + 1, run.seconds);
        c.require(run.seconds < 10.0, buf);
    }
    return c;
}

Check criterion_gain_offset() {
    Check c;
    for (std::size_t i = 0; i < shared_runs().size(); ++i) {
        const Run& run = shared_runs()[i];
        const double gain_err = std::abs(run.result.state.a_gain - kSharedGain) / std::abs(kSharedGain);
        const double offset_err = std::abs(run.result.state.b_zero - kSharedOffset);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "seed %zu: gain error %.4f > 0.02", i + 1, gain_err);
        c.require(gain_err <= 0.02, buf);
        std::snprintf(buf, sizeof(buf), "seed %zu: offset error %.4f > %.4f", i + 1, offset_err,
                      0.02 * std::abs(kSharedGain));
        c.require(offset_err <= 0.02 * std::abs(kSharedGain), buf);
    }
    return c;
}

Check criterion_convergence_shape() {
    Check c;
    for (std::size_t i = 0; i < shared_runs().size(); ++i) {
        const auto& conv = shared_runs()[i].result.convergence_energies;
        char buf[200];
        if (conv.size() < 10) {
            c.require(false, "fewer than 10 iterations recorded");
            continue;
        }
        const double drop = conv[0] / conv[2];
        std::snprintf(buf, sizeof(buf), "seed %zu: iter1/iter3 drop %.3g < 1e3", i + 1, drop);
        c.require(drop >= 1e3, buf);
        for (std::size_t k = 3; k < 10; ++k) {
            const double ratio = conv[k] / conv[2];
            std::snprintf(buf, sizeof(buf), "seed %zu: iter%zu/iter3 = %.3g leaves [0.1, 10]",
                          i + 1, k + 1, ratio);
            c.require(ratio <= 10.0 && ratio >= 0.1, buf);
        }
    }
    return c;
}

Check criterion_burst_restoration() {
    Check c;
    const TestSignalSpec spec = default_spec();
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        ImpairmentConfig cfg = default_impairments(seed);
        cfg.snr_db = kNoNoise;
        cfg.pulse_rate = 0.0;
        cfg.block_jitter = 0;
        const Run run = run_scenario(cfg, spec);

        std::vector<cdouble> truth_bursts(run.x_rec.size(), cdouble{0.0, 0.0});
        for (const auto& r : run.truth.bursts)
            for (std::size_t t = r.start; t < r.end; ++t)
                truth_bursts[t] = r.c0 + r.c1 * static_cast<double>(t - r.start);

        const auto& est = run.result.state.x_blocks.samples;
        double residual = 0.0;
        for (std::size_t t = 0; t < truth_bursts.size(); ++t)
            residual += std::norm(est[t] - truth_bursts[t]);
        const double injected = energy(truth_bursts);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "seed %llu: residual/injected = %.4f > 0.01",
                      static_cast<unsigned long long>(seed), residual / injected);
        c.require(residual <= 0.01 * injected, buf);
    }
    return c;
}

Check criterion_channel_estimation() {
    Check c;
    const TestSignalSpec spec = default_spec();

    // Unit-channel reference: the taper main lobe's half width in
    // interpolated samples, measured once.
    Spectrum flat;
    flat.bin_spacing = spec.sample_rate / static_cast<double>(spec.n_zc);
    flat.bins.assign(spec.n_zc, cdouble{1.0, 0.0});
    const IqSignal lobe = estimate_impulse_response(flat, 60.0, 16);
    std::size_t lobe_width = 1;
    while (lobe_width + 1 < lobe.size() / 2 &&
           std::abs(lobe.samples[lobe_width]) > std::abs(lobe.samples[lobe_width + 1]))
        ++lobe_width;

    std::vector<cdouble> taps(65, cdouble{0.0, 0.0});
    taps[0] = {1.0, 0.0};
    taps[17] = {0.5, 0.0};
    taps[64] = {0.2, 0.0};

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ImpairmentConfig cfg = default_impairments(seed);
        cfg.channel_taps = taps;
        const Run run = run_scenario(cfg, spec);
        const ChannelEstimate est = estimate_channel(run.result.state.x_lin, spec, 60.0, 16);
        const auto& h = est.h_time.samples;
        const std::size_t m = h.size();

        char buf[200];
        const double peak = std::abs(h[0]);
        for (const std::size_t d : {std::size_t{0}, std::size_t{17}, std::size_t{64}}) {
            std::size_t best = 16 * d >= 8 ? 16 * d - 8 : 0;
            for (std::size_t i = best; i <= 16 * d + 8; ++i)
                if (std::abs(h[i]) > std::abs(h[best])) best = i;
            std::snprintf(buf, sizeof(buf), "seed %llu: tap %zu found at %zu not %zu",
                          static_cast<unsigned long long>(seed), d, best, 16 * d);
            c.require(best == 16 * d, buf);
        }
        const double rel17 = std::abs(h[16 * 17]) / peak;
        const double rel64 = std::abs(h[16 * 64]) / peak;
        std::snprintf(buf, sizeof(buf), "seed %llu: tap(17) magnitude %.4f off 0.5 by >5%%",
                      static_cast<unsigned long long>(seed), rel17);
        c.require(std::fabs(rel17 - 0.5) <= 0.05 * 0.5, buf);
        std::snprintf(buf, sizeof(buf), "seed %llu: tap(64) magnitude %.4f off 0.2 by >5%%",
                      static_cast<unsigned long long>(seed), rel64);
        c.require(std::fabs(rel64 - 0.2) <= 0.05 * 0.2, buf);

        // Everything preceding the first tap by more than the lobe width
        // stays 50 dB down: circular delays in [-m/2, -lobe_width).
        double worst = 0.0;
        for (std::size_t i = m / 2; i + lobe_width < m; ++i)
            worst = std::max(worst, std::abs(h[i]));
        const double worst_db = 20.0 * std::log10(worst / peak + 1e-300);
        std::snprintf(buf, sizeof(buf), "seed %llu: pre-tap floor %.1f dB > -50 dB",
                      static_cast<unsigned long long>(seed), worst_db);
        c.require(worst_db <= -50.0, buf);
    }
    return c;
}

Check criterion_outlier_robustness() {
    Check c;
    const TestSignalSpec spec = default_spec();
    for (const std::uint64_t seed : {5ull, 6ull}) {
        ImpairmentConfig cfg = default_impairments(seed);
        cfg.pulse_rate = 0.0;
        const IqSignal x_test = build_sounding_signal(spec);
        auto [x_base, truth] = simulate(x_test, cfg);

        IqSignal x_pulsed = x_base;
        const std::size_t hit = truth.period_starts[2] + 1000;
        for (std::size_t t = hit; t < hit + 24; ++t) x_pulsed.samples[t] += cdouble{35.0, 20.0};

        const RestorationResult base = restore(x_base, x_test, default_restoration());
        const RestorationResult pulsed = restore(x_pulsed, x_test, default_restoration());
        fft_detail::clear_plan_cache();

        double diff = 0.0;
        for (std::size_t t = 0; t < base.state.x_lin.size(); ++t)
            diff += std::norm(pulsed.state.x_lin.samples[t] - base.state.x_lin.samples[t]);
        const double rel = diff / energy(base.state.x_lin.samples);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "seed %llu: relative x_lin change %.3g > 1e-3",
                      static_cast<unsigned long long>(seed), rel);
        c.require(rel <= 1e-3, buf);
    }
    return c;
}

Check criterion_analytic_suites() {
    Check c;
    char buf[160];

    {
        const double t0 = now_seconds();
        const IqSignal zc = zadoff_chu(1021, 25, 1.0);
        const Spectrum s = fft(zc, 1);
        const double expect = std::sqrt(1021.0);
        double worst = 0.0;
        for (const auto& b : s.bins) worst = std::max(worst, std::fabs(std::abs(b) - expect));
        c.require(worst < 1e-9 * expect, "ZC spectrum flatness misses 1e-9");
        double off_peak = 0.0;
        for (std::size_t lag = 1; lag < 1021; ++lag) {
            cdouble acc{0.0, 0.0};
            for (std::size_t t = 0; t < 1021; ++t)
                acc += zc.samples[(t + lag) % 1021] * std::conj(zc.samples[t]);
            off_peak = std::max(off_peak, std::abs(acc));
        }
        c.require(off_peak < 1e-9 * 1021.0, "ZC cyclic autocorrelation misses 1e-9");
        const double dt = now_seconds() - t0;
        std::snprintf(buf, sizeof(buf), "ZC suite took %.1fs >= 5s", dt);
        c.require(dt < 5.0, buf);
    }

    {
        const double t0 = now_seconds();
        for (const std::size_t n : {std::size_t{31}, std::size_t{64}, std::size_t{1021}}) {
            const RealWindow w = dolph_chebyshev_window(n, 60.0);
            IqSignal x;
            x.sample_rate = 1.0;
            for (const double v : w.coefficients) x.samples.push_back({v, 0.0});
            const Spectrum s = fft(x, 64);
            std::vector<double> mag(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) mag[i] = std::abs(s.bins[i]);
            std::size_t edge = 1;
            while (edge + 1 < mag.size() / 2 && mag[edge] > mag[edge + 1]) ++edge;
            double side = 0.0;
            for (std::size_t i = edge; i <= mag.size() / 2; ++i) side = std::max(side, mag[i]);
            const double db = 20.0 * std::log10(side / mag[0]);
            std::snprintf(buf, sizeof(buf), "window length %zu sidelobes %.2f dB > -59.5", n, db);
            c.require(db <= -59.5, buf);
        }
        const double dt = now_seconds() - t0;
        std::snprintf(buf, sizeof(buf), "window suite took %.1fs >= 5s", dt);
        c.require(dt < 5.0, buf);
    }

    {
        const double t0 = now_seconds();
        std::mt19937_64 gen(31337);
        for (const std::size_t n :
             {std::size_t{64}, std::size_t{1021}, std::size_t{4096}, std::size_t{65536}}) {
            IqSignal x;
            x.sample_rate = 1.0;
            x.samples.resize(n);
            for (auto& v : x.samples)
                v = {static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5,
                     static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5};
            const Spectrum s = fft(x, 1);
            const IqSignal back = ifft(s);
            double worst = 0.0;
            const double scale = std::sqrt(energy(x.samples) / static_cast<double>(n));
            for (std::size_t t = 0; t < n; ++t)
                worst = std::max(worst, std::abs(back.samples[t] - x.samples[t]) / scale);
            std::snprintf(buf, sizeof(buf), "round trip at n=%zu error %.3g > 1e-12", n, worst);
            c.require(worst < 1e-12, buf);
            const double parseval =
                std::fabs(energy(x.samples) - energy(s.bins) / static_cast<double>(n)) /
                energy(x.samples);
            std::snprintf(buf, sizeof(buf), "Parseval at n=%zu error %.3g > 1e-10", n, parseval);
            c.require(parseval < 1e-10, buf);
        }
        fft_detail::clear_plan_cache();
        const double dt = now_seconds() - t0;
        std::snprintf(buf, sizeof(buf), "transform suite took %.1fs >= 5s", dt);
        c.require(dt < 5.0, buf);
    }

    {
        const double t0 = now_seconds();
        const fs::path dir =
            fs::temp_directory_path() / ("sounder_acc_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
        std::mt19937_64 gen(4242);
        IqSignal x;
        x.sample_rate = 25.6e6;
        x.samples.resize(1'000'000);
        for (auto& v : x.samples)
            v = {static_cast<double>(static_cast<float>(static_cast<double>(gen() >> 11) * 0x1.0p-53)),
                 static_cast<double>(static_cast<float>(static_cast<double>(gen() >> 11) * 0x1.0p-53))};
        const std::string path = (dir / "x.iq").string();
        write_iq(path, x);
        const IqSignal back = read_iq(path);
        bool same = back.size() == x.size();
        for (std::size_t i = 0; same && i < x.size(); ++i) same = back.samples[i] == x.samples[i];
        c.require(same, "IQ file round trip not bitwise");
        std::error_code ec;
        fs::remove_all(dir, ec);
        const double dt = now_seconds() - t0;
        std::snprintf(buf, sizeof(buf), "file suite took %.1fs >= 5s", dt);
        c.require(dt < 5.0, buf);
    }
    return c;
}

Check criterion_pipeline_determinism(const std::string& cli) {
    Check c;
    if (cli.empty()) {
        c.require(false, "CLI binary path missing (pass it as argv[1])");
        return c;
    }
    const fs::path base =
        fs::temp_directory_path() / ("sounder_acc_cli_" + std::to_string(std::random_device{}()));
    const fs::path dir_a = base / "a";
    const fs::path dir_b = base / "b";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);

    auto run_pipeline = [&](const fs::path& dir) {
        const std::string cmd =
            cli + " pipeline --seed 7 --snr-db 20 --dir " + dir.string() + " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    c.require(run_pipeline(dir_a) == 0, "first pipeline run failed");
    c.require(run_pipeline(dir_b) == 0, "second pipeline run failed");

    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    for (const char* name : {"x_test.iq", "x_rec.iq", "truth.txt", "x_lin.iq", "trace.txt",
                             "h_freq.csv", "h_time.csv", "pdp.csv"}) {
        const std::string a = slurp(dir_a / name);
        const std::string b = slurp(dir_b / name);
        c.require(!a.empty() && a == b, std::string(name) + " differs between runs");
    }
    std::error_code ec;
    fs::remove_all(base, ec);
    return c;
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    int failures = 0;

    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"1 CFO/phase recovery (20 seeds, <10 s/seed)", criterion_cfo_phase},
        {"2 gain/offset recovery (20 seeds)", criterion_gain_offset},
        {"3 burst restoration >= 20 dB suppression", criterion_burst_restoration},
        {"4 convergence drops 3 orders by iteration 3, then plateaus", criterion_convergence_shape},
        {"5 three-tap channel estimate (20 seeds)", criterion_channel_estimation},
        {"6 outlier gate keeps x_lin within 1e-3", criterion_outlier_robustness},
        {"7 analytic suites (ZC, window, transforms, files)", criterion_analytic_suites},
        {"8 pipeline determinism", [&] { return criterion_pipeline_determinism(cli); }},
    };

    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.pass = false;
            c.detail << "exception: " << e.what();
        }
        if (c.pass) {
            std::printf("[PASS] criterion %s\n", name.c_str());
        } else {
            ++failures;
            std::printf("[FAIL] criterion %s: %s\n", name.c_str(), c.detail.str().c_str());
        }
        std::fflush(stdout);
    }
    return failures;
}
