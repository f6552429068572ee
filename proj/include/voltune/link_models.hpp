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

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace voltune
{

/** Which transceiver rails a sweep lowers; the other side holds 1.0 V. */
enum class SweepMode : uint8_t
{
    Both,    // TX and RX swept together
    TxOnly,  // TX swept, RX fixed
    RxOnly,  // RX swept, TX fixed
};

enum class LinkSide : uint8_t
{
    Tx,
    Rx,
};

const char* toString(SweepMode mode);
const char* toString(LinkSide side);
SweepMode sweepModeFromString(const std::string& name);

/**
 * Bit error rate versus rail voltage for one (speed, sweep mode): exactly
 * zero at and above the onset voltage, log-linear between anchor points
 * below it, capped at 0.5.
 */
struct BerEntry
{
    double onsetVolts = 0.0;
    // (volts, log10 BER), strictly decreasing in volts.
    std::vector<std::pair<double, double>> anchors;
};

/**
 * Received payload size: full above the collapse voltage (or everywhere
 * when the link never collapsed in the measured range), dropping off with
 * seeded jitter below it.
 */
struct CollapseEntry
{
    std::optional<double> collapseVolts;
};

/** Rail power draw versus voltage, piecewise linear between anchors. */
struct PowerEntry
{
    // (volts, watts), strictly increasing in both.
    std::vector<std::pair<double, double>> anchors;
};

/**
 * Round-trip latency: a constant baseline above the excursion-onset
 * voltage; below it, seeded positive spikes ride on the baseline.
 */
struct LatencyEntry
{
    double baselineSeconds = 0.0;
    double excursionOnsetVolts = 0.0;
    double excursionProbability = 0.6;
    double excursionMeanFactor = 30.0;  // spike mean, multiples of baseline
};

/**
 * Calibrated transceiver behavior for the modeled board pair. Queries
 * accept voltages in [0.70, 1.00] with a small tolerance for set-point
 * quantization; anything further out is a caller error.
 */
class LinkCalibration
{
  public:
    std::string name;
    uint64_t payloadBytes = 10000000000ULL;

    struct ModeKey
    {
        double gbps;
        SweepMode mode;
    };
    struct SideKey
    {
        double gbps;
        LinkSide side;
    };

    double berAt(double volts, double gbps, SweepMode mode) const;
    uint64_t receivedBytes(double volts, double gbps, SweepMode mode,
                           uint64_t seed) const;
    double powerAt(double volts, double gbps, LinkSide side) const;
    double latencyAt(double volts, double gbps, uint64_t seed) const;

    const BerEntry& ber(double gbps, SweepMode mode) const;
    const CollapseEntry& collapse(double gbps, SweepMode mode) const;
    const PowerEntry& power(double gbps, LinkSide side) const;
    const LatencyEntry& latency(double gbps) const;
    bool hasMode(double gbps, SweepMode mode) const;

    /** Speeds with a both-swept entry, descending. */
    std::vector<double> speeds() const;

    void addBer(double gbps, SweepMode mode, BerEntry entry);
    void addCollapse(double gbps, SweepMode mode, CollapseEntry entry);
    void addPower(double gbps, LinkSide side, PowerEntry entry);
    void addLatency(double gbps, LatencyEntry entry);

    /** Shipped calibration for the measured KC705 GTX link pair. */
    static LinkCalibration kc705GtxMeasured();
    static LinkCalibration load(std::istream& in);
    static LinkCalibration loadFile(const std::string& path);

  private:
    template <typename K, typename V>
    using Table = std::vector<std::pair<K, V>>;

    Table<ModeKey, BerEntry> berTable;
    Table<ModeKey, CollapseEntry> collapseTable;
    Table<SideKey, PowerEntry> powerTable;
    Table<double, LatencyEntry> latencyTable;
};

/** Splitmix-style mixing for deriving per-point seeds. */
uint64_t mixSeed(uint64_t seed, uint64_t salt);

}  // namespace voltune
