// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_RESTORATION_HPP
#define SOUNDER_RESTORATION_HPP

#include "sounder/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace sounder {

struct RestorationConfig {
    std::size_t iterations = 10;
    std::size_t block_season_init = 416; // rough burst-length estimate, samples
    std::size_t block_kernel_init = 31;  // smoothing width for boundary detection
    double peak_rel_threshold = 0.25;
    double outlier_factor = 1.5;

    void validate() const;
};

/// Estimator outputs of one restoration iteration.
struct RestorationState {
    IqSignal x_ref_single;                  // current single-period reference
    std::vector<std::size_t> period_starts; // I
    double f_hat = 0.0;                     // cycles per sample
    double phi_hat = 0.0;                   // radians
    cdouble a_gain{0.0, 0.0};
    cdouble b_zero{0.0, 0.0};
    IqSignal x_blocks;                       // burst estimate, recording length
    std::vector<std::size_t> outliers;       // ordinals into period_starts
    std::vector<double> period_phase_delta;  // per-period correction, radians
    IqSignal x_lin;                          // restored single period
};

struct IterationRecord {
    std::size_t iteration = 0; // 1-based
    double f_hat = 0.0;
    double phi_hat = 0.0;
    cdouble a_gain{0.0, 0.0};
    cdouble b_zero{0.0, 0.0};
    std::size_t outlier_count = 0;
    std::size_t boundary_count = 0;
    double convergence_energy = 0.0;
};

struct RestorationResult {
    RestorationState state;
    std::vector<IterationRecord> trace;
    std::vector<double> convergence_energies;
};

/// Amplitude-only synchronisation: period start indices and the tiled
/// reference signal (copies of x_ref_single at each start, zero-padded up
/// to the next period). Throws SyncError when fewer than two peaks lock.
std::pair<std::vector<std::size_t>, IqSignal> pre_synchronise(const IqSignal& x_rec,
                                                              const IqSignal& x_ref_single,
                                                              const RestorationConfig& cfg);

/// Carrier-frequency and phase offset of x_rec against the tiled reference,
/// from the peak of the 16x zero-padded transform of x_rec * conj(x_ref),
/// with local refinement of the maximiser. f_hat in cycles/sample within
/// (-0.5, 0.5], phi_hat in radians.
std::pair<double, double> estimate_cfo_phase(const IqSignal& x_rec, const IqSignal& x_ref_full);

/// Re-synchronisation on the real part of the complex correlation of the
/// demodulated signal.
std::pair<std::vector<std::size_t>, IqSignal> post_synchronise(const IqSignal& x_rec, double f_hat,
                                                               double phi_hat,
                                                               const IqSignal& x_ref_single,
                                                               const RestorationConfig& cfg);

/// Closed-form complex regression of the demodulated signal on the
/// reference: returns (gain, offset).
std::pair<cdouble, cdouble> estimate_gain_zero(const IqSignal& x_clean, const IqSignal& x_ref_full,
                                               double f_hat, double phi_hat);

/// Residual after removing the modulated first-order model from x_rec.
IqSignal compute_artefact_residual(const IqSignal& x_rec, const IqSignal& x_ref_full,
                                   const RestorationState& state);

/// Burst boundary candidates: peaks of the magnitude of the seasonal
/// difference of the smoothed residual, regularised onto a season-pitch
/// grid anchored at the median candidate phase. When given,
/// selected_candidates receives the subset of boundaries that came from a
/// detected peak (rather than grid prediction), which is what a pitch
/// refinement should be based on.
std::vector<std::size_t> detect_block_boundaries(const IqSignal& x_art, std::size_t season,
                                                 std::size_t kernel, const RestorationConfig& cfg,
                                                 std::vector<std::size_t>* selected_candidates = nullptr);

/// Piecewise complex-affine least-squares fit of x_art over
/// [b, b+block_duration) for each boundary b; zero elsewhere.
IqSignal estimate_blocks(const IqSignal& x_art, const std::vector<std::size_t>& boundaries,
                         std::size_t block_duration);

struct LinearEffect {
    IqSignal x_lin;
    std::vector<std::size_t> outliers;
    std::vector<double> period_phase_delta;
};

/// Outlier-gated averaging of the demodulated, per-period phase-corrected
/// periods, minus the zero offset.
LinearEffect estimate_linear_effect(const IqSignal& x_rec, const IqSignal& x_blocks,
                                    const RestorationState& state, const IqSignal& x_test_single,
                                    const RestorationConfig& cfg);

/// Full iterative restoration.
RestorationResult restore(const IqSignal& x_rec, const IqSignal& x_test_single,
                          const RestorationConfig& cfg);

} // namespace sounder

#endif
