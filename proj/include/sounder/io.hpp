// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The sounder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#ifndef SOUNDER_IO_HPP
#define SOUNDER_IO_HPP

#include "sounder/channel_estimate.hpp"
#include "sounder/impairments.hpp"
#include "sounder/restoration.hpp"
#include "sounder/types.hpp"

#include <string>

namespace sounder {

// IQ files: interleaved 32-bit little-endian IEEE-754 floats, real then
// imaginary per sample. Metadata travels in a plain-text `<path>.meta`
// sidecar of key=value lines.

void write_iq(const std::string& path, const IqSignal& x, double carrier_freq = 0.0);

/// Reads an IQ file; the sample rate comes from the sidecar when present,
/// otherwise from fallback_sample_rate.
IqSignal read_iq(const std::string& path, double fallback_sample_rate = 1.0);

void export_signal_csv(const std::string& path, const IqSignal& x);
void export_spectrum_csv(const std::string& path, const Spectrum& s);
void export_pdp_csv(const std::string& path, const PowerDelayProfile& pdp);

struct PlotOptions {
    std::size_t max_strokes = 2048; // longer signals are bucket-decimated
    bool db_scale = false;          // envelope in dB relative to the peak
    double db_floor = -120.0;
    int width = 960;
    int height = 320;
};

/// Standalone SVG: the envelope +-|x[t]| drawn as one vertical stroke per
/// sample, coloured by phase (positive real = green, positive imaginary =
/// yellow, negative real = red, negative imaginary = blue, cyclically
/// interpolated).
void export_plot(const std::string& path, const IqSignal& x, const PlotOptions& opts = {});

/// Phase (radians) to "#rrggbb" under the plot colour convention.
std::string phase_colour(double phase);

void write_ground_truth(const std::string& path, const GroundTruth& truth);
void write_trace(const std::string& path, const RestorationResult& result);

struct TraceRow {
    std::size_t iteration;
    double convergence_energy;
};
std::vector<TraceRow> read_trace(const std::string& path);

} // namespace sounder

#endif
