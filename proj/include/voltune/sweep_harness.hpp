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

#include "voltune/link_models.hpp"
#include "voltune/platform_profile.hpp"
#include "voltune/power_manager.hpp"
#include "voltune/settling_analysis.hpp"

#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace voltune
{

/**
 * One simulated board: bus engine, the regulator devices a profile
 * describes, and the controller on top. Owns a copy of the profile so a
 * stack is self-contained.
 */
class BoardStack
{
  public:
    BoardStack(const PlatformProfile& profile, ControlPath path,
               ExpansionMode mode = ExpansionMode::Prototype,
               BusConfig bus = {});
    BoardStack(const BoardStack&) = delete;
    BoardStack& operator=(const BoardStack&) = delete;

    BusEngine& bus()
    {
        return engine;
    }
    PowerManager& manager()
    {
        return *controller;
    }
    const PlatformProfile& profile() const
    {
        return profileData;
    }
    Ucd9248Device& device(uint8_t address);

    /** Pin a lane's rail output directly, without bus traffic. */
    void presetLane(int lane, double volts);

  private:
    PlatformProfile profileData;
    BusEngine engine;
    std::vector<std::shared_ptr<Ucd9248Device>> devices;
    std::unique_ptr<PowerManager> controller;
};

/** One programmed voltage step, sampled until the output settles. */
struct TransitionConfig
{
    int lane = 0;
    double fromVolts = 1.0;
    double toVolts = 0.5;
    ControlPath path = ControlPath::Hardware;
    BusConfig bus;
    ExpansionMode expansion = ExpansionMode::Prototype;
    SettlingParams settling;
    // Sampling stops early once the readback has sat on the quantized
    // target for a full window; this caps a run that never gets there.
    size_t maxSamples = 200;
};

struct TransitionResult
{
    VoltageTrace trace;
    SettlingReport report;
    RequestStatus setStatus;
    bool timedOut = false;
};

TransitionResult runTransition(const TransitionConfig& config,
                               const PlatformProfile& profile);

/** Mean sample spacing for one control path and bus rate. */
struct IntervalMeasurement
{
    ControlPath path;
    uint32_t sclHz;
    double meanIntervalSeconds;
    size_t sampleCount;
};

/**
 * Sample-loop spacing under the four standard configurations: hardware
 * and software control paths at 400 and 100 kHz.
 */
std::vector<IntervalMeasurement> runIntervalMatrix(
    const PlatformProfile& profile, int lane = 0, size_t samples = 32);

/**
 * Downward voltage sweep of the transceiver supply on two simulated
 * boards (transmitter and receiver) with link metrics evaluated at each
 * settled point.
 */
struct CaseStudyConfig
{
    double gbps = 10.0;
    SweepMode mode = SweepMode::Both;
    uint64_t seed = 1;
    double highVolts = 1.0;
    double lowVolts = 0.70;
    double stepVolts = 0.001;
    int lane = 6;  // MGTAVCC
    ControlPath path = ControlPath::Hardware;
    BusConfig bus;
};

struct SweepPoint
{
    double voltage = 0.0;  // commanded grid value
    double ber = 0.0;
    uint64_t receivedBytes = 0;
    double latencySeconds = 0.0;
    double txPowerWatts = 0.0;
    double rxPowerWatts = 0.0;
};

struct SweepResult
{
    CaseStudyConfig config;
    std::string calibrationName;
    uint64_t payloadBytes = 0;
    std::vector<SweepPoint> points;  // voltage descending
};

/**
 * Run the sweep: the first point uses the full protective update
 * sequence, later points the minimal set-point write; each point dwells
 * long enough for the rail to settle, reads back both boards, and
 * queries the link calibration at the settled swept voltage. Fully
 * deterministic for a fixed seed.
 */
SweepResult runCaseStudy(const CaseStudyConfig& config,
                         const PlatformProfile& profile,
                         const LinkCalibration& calibration);

/** voltage_v,ber,received_bytes,latency_s,tx_power_w,rx_power_w */
void writeSweepCsv(std::ostream& out, const std::vector<SweepPoint>& points);
std::vector<SweepPoint> readSweepCsv(std::istream& in);

/** Key/value run description: config echo, calibration name, seed. */
void writeSweepMetadata(std::ostream& out, const SweepResult& result);

/**
 * Power savings relative to the highest swept point, evaluated on one
 * side's rail power: the strict zero-error boundary first, then the
 * lowest admissible point for each loosened error-rate threshold.
 */
struct SavingsRow
{
    double thresholdBer = 0.0;  // 0 marks the zero-error boundary row
    double voltageVolts = 0.0;
    double powerWatts = 0.0;
    double savingPercent = 0.0;
};

struct SavingsSummary
{
    LinkSide side = LinkSide::Tx;
    double baselineVolts = 0.0;
    double baselinePowerWatts = 0.0;
    std::vector<SavingsRow> rows;
};

SavingsSummary savingsReport(const std::vector<SweepPoint>& points,
                             LinkSide side = LinkSide::Tx,
                             const std::vector<double>& thresholds = {
                                 1e-9, 1e-7, 1e-6});

void writeSavingsText(std::ostream& out, const SavingsSummary& summary);

}  // namespace voltune
