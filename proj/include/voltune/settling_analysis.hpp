/**
 * Copyright 2026 The VolTune Simulator Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "voltune/power_manager.hpp"

#include <cstddef>
#include <optional>

namespace voltune
{

struct SettlingParams
{
    // Samples averaged for the reference level, and the run length a
    // sample must begin to count as settled.
    size_t window = 5;
    // Half-width of the stability band around the reference, percent.
    double bandPercent = 1.0;
    // Absolute half-width substituted when the reference level is zero
    // and a relative band would collapse.
    double absoluteBandVolts = 0.001;
};

struct SettlingReport
{
    double stableAverage = 0.0;
    double bandLow = 0.0;
    double bandHigh = 0.0;
    // True when the zero-average fallback band was applied.
    bool absoluteBandUsed = false;
    // First sample that starts a run of >= window in-band samples.
    std::optional<size_t> settleIndex;
    std::optional<SimTime> settleTime;
    // settleTime minus the first sample's timestamp.
    std::optional<SimTime> settlingTime;
};

/** Mean of the final `window` samples. Throws if the trace is shorter. */
double stableAverage(const VoltageTrace& trace, size_t window);

/**
 * Settling detection against a band derived from the trace's own tail:
 * the reference level is the mean of the last `window` samples and the
 * band is +/- bandPercent of it. The settle instant is the timestamp of
 * the first sample beginning a run of `window` consecutive in-band
 * samples; a trace whose final window is in-band always settles.
 */
SettlingReport detectSettling(const VoltageTrace& trace,
                              const SettlingParams& params = {});

/**
 * Same run detection against an externally fixed band. With the band
 * held constant, widening it never delays the settle instant and a
 * longer run requirement never advances it.
 */
SettlingReport detectSettlingFixedBand(const VoltageTrace& trace,
                                       double bandLow, double bandHigh,
                                       size_t window);

}  // namespace voltune
