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

#include <doctest.h>

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

using namespace voltune;

namespace
{

VoltageTrace mk(const std::vector<double>& volts)
{
    VoltageTrace trace;
    for (size_t i = 0; i < volts.size(); ++i)
    {
        trace.push_back(VoltageSample{static_cast<SimTime>(i) * 200000,
                                      volts[i]});
    }
    return trace;
}

/** Reference detector: try every start index, scan the whole run. */
std::optional<size_t> bruteForceSettle(const VoltageTrace& trace,
                                       double bandLow, double bandHigh,
                                       size_t window)
{
    for (size_t start = 0; start + window <= trace.size(); ++start)
    {
        bool inBand = true;
        for (size_t j = start; j < start + window; ++j)
        {
            double v = trace[j].volts;
            if (v < bandLow || v > bandHigh)
            {
                inBand = false;
                break;
            }
        }
        if (inBand)
        {
            return start;
        }
    }
    return std::nullopt;
}

/** Random trace shaped like a noisy step response, or pure noise. */
VoltageTrace randomTrace(std::mt19937& rng)
{
    std::uniform_int_distribution<size_t> lenDist(6, 200);
    std::uniform_real_distribution<double> levelDist(0.3, 1.1);
    std::uniform_real_distribution<double> noiseDist(-0.05, 0.05);
    std::bernoulli_distribution pureNoise(0.3);

    size_t len = lenDist(rng);
    std::vector<double> volts(len);
    if (pureNoise(rng))
    {
        std::uniform_real_distribution<double> any(0.0, 1.2);
        for (auto& v : volts)
        {
            v = any(rng);
        }
    }
    else
    {
        double from = levelDist(rng);
        double to = levelDist(rng);
        size_t knee = std::uniform_int_distribution<size_t>(0, len - 1)(rng);
        for (size_t i = 0; i < len; ++i)
        {
            double base = i < knee
                              ? from + (to - from) * static_cast<double>(i) /
                                           static_cast<double>(knee ? knee : 1)
                              : to;
            volts[i] = base + noiseDist(rng) * (i < knee ? 1.0 : 0.1);
        }
    }
    return mk(volts);
}

}  // namespace

TEST_CASE("stable average is the mean of the final window")
{
    VoltageTrace trace =
        mk({1.0, 0.9, 0.7, 0.49, 0.50, 0.51, 0.50, 0.50});
    CHECK(stableAverage(trace, 5) == 0.5);
    // Window equal to the trace covers everything.
    VoltageTrace flat = mk({0.2, 0.4});
    CHECK(stableAverage(flat, 2) == doctest::Approx(0.3));

    CHECK_THROWS_AS(stableAverage(flat, 3), std::invalid_argument);
    CHECK_THROWS_AS(stableAverage(flat, 0), std::invalid_argument);
    CHECK_THROWS_AS(detectSettling(mk({0.5})), std::invalid_argument);
}

TEST_CASE("a constant trace settles immediately")
{
    SettlingReport r = detectSettling(mk({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}));
    CHECK(r.stableAverage == 0.5);
    REQUIRE(r.settleIndex.has_value());
    CHECK(*r.settleIndex == 0);
    CHECK(*r.settlingTime == 0);
    CHECK_FALSE(r.absoluteBandUsed);
    CHECK(r.bandLow == doctest::Approx(0.495));
    CHECK(r.bandHigh == doctest::Approx(0.505));
}

TEST_CASE("settle instant is the first sample of the qualifying run")
{
    // Step lands in band at index 6; the band is 0.5 +/- 1 %.
    SettlingReport r = detectSettling(
        mk({1.0, 0.9, 0.8, 0.7, 0.6, 0.52, 0.5, 0.5, 0.5, 0.5, 0.5}));
    REQUIRE(r.settleIndex.has_value());
    CHECK(*r.settleIndex == 6);
    CHECK(*r.settleTime == 6 * 200000);
    CHECK(*r.settlingTime == 6 * 200000);
}

TEST_CASE("an excursion resets the in-band run")
{
    // 0.52 at index 3 falls outside [0.495, 0.505] and restarts the count.
    SettlingReport r = detectSettling(
        mk({0.5, 0.5, 0.5, 0.52, 0.5, 0.5, 0.5, 0.5, 0.5}));
    REQUIRE(r.settleIndex.has_value());
    CHECK(*r.settleIndex == 4);
}

TEST_CASE("settling time uses timestamps, not sample counts")
{
    VoltageTrace trace = mk({1.0, 0.8, 0.5, 0.5, 0.5, 0.5, 0.5});
    // Stretch the gap between the first two samples.
    trace[1].time = 1000000;
    trace[2].time = 1200000;
    trace[3].time = 1400000;
    trace[4].time = 1600000;
    trace[5].time = 1800000;
    trace[6].time = 2000000;
    SettlingReport r = detectSettling(trace);
    REQUIRE(r.settleIndex.has_value());
    CHECK(*r.settleIndex == 2);
    CHECK(*r.settleTime == 1200000);
    CHECK(*r.settlingTime == 1200000 - 0);
}

TEST_CASE("zero reference level falls back to an absolute band")
{
    SettlingReport r = detectSettling(mk({0.0, 0.0, 0.0, 0.0, 0.0}));
    CHECK(r.absoluteBandUsed);
    CHECK(r.bandLow == -0.001);
    CHECK(r.bandHigh == 0.001);
    REQUIRE(r.settleIndex.has_value());
    CHECK(*r.settleIndex == 0);
}

TEST_CASE("a trace can fail to settle inside its own tail band")
{
    // The tail oscillates beyond +/- 1 % of its mean, so no run exists.
    SettlingReport r = detectSettling(
        mk({0.40, 0.60, 0.40, 0.60, 0.40, 0.60, 0.40, 0.60}));
    CHECK_FALSE(r.settleIndex.has_value());
    CHECK_FALSE(r.settlingTime.has_value());
}

TEST_CASE("detector matches the brute-force oracle on random traces")
{
    std::mt19937 rng(0x5E771E);
    std::uniform_int_distribution<size_t> windowDist(1, 8);
    std::uniform_real_distribution<double> bandCenter(0.3, 1.1);
    std::uniform_real_distribution<double> bandHalf(0.001, 0.2);

    for (int iter = 0; iter < 1000; ++iter)
    {
        VoltageTrace trace = randomTrace(rng);
        size_t window = windowDist(rng);
        if (trace.size() < window)
        {
            continue;
        }

        // Fixed, externally chosen band.
        double center = bandCenter(rng);
        double half = bandHalf(rng);
        SettlingReport fixed = detectSettlingFixedBand(
            trace, center - half, center + half, window);
        auto expected =
            bruteForceSettle(trace, center - half, center + half, window);
        CHECK(fixed.settleIndex == expected);
        if (expected)
        {
            CHECK(*fixed.settleTime == trace[*expected].time);
            CHECK(*fixed.settlingTime ==
                  trace[*expected].time - trace.front().time);
        }

        // Band derived from the trace tail.
        SettlingParams params;
        params.window = window;
        SettlingReport derived = detectSettling(trace, params);
        CHECK(derived.settleIndex ==
              bruteForceSettle(trace, derived.bandLow, derived.bandHigh,
                               window));
    }
}

TEST_CASE("fixed-band properties: wider bands and shorter runs settle sooner")
{
    std::mt19937 rng(0xBAD5EED);
    std::uniform_real_distribution<double> bandCenter(0.3, 1.1);
    std::uniform_real_distribution<double> bandHalf(0.005, 0.15);
    std::uniform_real_distribution<double> widen(0.0, 0.1);
    std::uniform_int_distribution<size_t> windowDist(1, 6);

    for (int iter = 0; iter < 500; ++iter)
    {
        VoltageTrace trace = randomTrace(rng);
        size_t window = windowDist(rng);
        double center = bandCenter(rng);
        double half = bandHalf(rng);

        SettlingReport narrow = detectSettlingFixedBand(
            trace, center - half, center + half, window);
        SettlingReport wide = detectSettlingFixedBand(
            trace, center - half - widen(rng), center + half + widen(rng),
            window);
        if (narrow.settleIndex)
        {
            // Everything in the narrow band is in the wide band, so the
            // wide detector fires no later.
            REQUIRE(wide.settleIndex.has_value());
            CHECK(*wide.settleIndex <= *narrow.settleIndex);
            CHECK(*wide.settlingTime <= *narrow.settlingTime);
        }

        size_t longer = window + windowDist(rng);
        if (trace.size() >= longer)
        {
            SettlingReport strict = detectSettlingFixedBand(
                trace, center - half, center + half, longer);
            if (strict.settleIndex)
            {
                // A longer qualifying run contains the shorter one.
                REQUIRE(narrow.settleIndex.has_value());
                CHECK(*narrow.settleIndex <= *strict.settleIndex);
            }
        }
    }
}
