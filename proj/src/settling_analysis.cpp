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
#include "voltune/settling_analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace voltune
{

double stableAverage(const VoltageTrace& trace, size_t window)
{
    if (window == 0)
    {
        throw std::invalid_argument("window must be nonzero");
    }
    if (trace.size() < window)
    {
        throw std::invalid_argument("trace shorter than averaging window");
    }
    double sum = 0.0;
    for (size_t i = trace.size() - window; i < trace.size(); ++i)
    {
        sum += trace[i].volts;
    }
    return sum / static_cast<double>(window);
}

SettlingReport detectSettlingFixedBand(const VoltageTrace& trace,
                                       double bandLow, double bandHigh,
                                       size_t window)
{
    if (window == 0)
    {
        throw std::invalid_argument("window must be nonzero");
    }
    if (trace.size() < window)
    {
        throw std::invalid_argument("trace shorter than detection window");
    }
    SettlingReport report;
    report.bandLow = bandLow;
    report.bandHigh = bandHigh;

    size_t run = 0;
    for (size_t i = 0; i < trace.size(); ++i)
    {
        double v = trace[i].volts;
        if (v >= bandLow && v <= bandHigh)
        {
            if (++run == window)
            {
                size_t start = i + 1 - window;
                report.settleIndex = start;
                report.settleTime = trace[start].time;
                report.settlingTime = trace[start].time - trace.front().time;
                break;
            }
        }
        else
        {
            run = 0;
        }
    }
    return report;
}

SettlingReport detectSettling(const VoltageTrace& trace,
                              const SettlingParams& params)
{
    double average = stableAverage(trace, params.window);
    double half;
    bool absolute = std::fabs(average) < 1e-12;
    if (absolute)
    {
        half = params.absoluteBandVolts;
    }
    else
    {
        half = std::fabs(average) * params.bandPercent / 100.0;
    }
    SettlingReport report = detectSettlingFixedBand(
        trace, average - half, average + half, params.window);
    report.stableAverage = average;
    report.absoluteBandUsed = absolute;
    return report;
}

}  // namespace voltune
