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

#include "voltune/bus_engine.hpp"
#include "voltune/regulator_model.hpp"

#include <istream>
#include <string>
#include <vector>

namespace voltune
{

/** One controller lane: a named rail behind (device address, page). */
struct LaneInfo
{
    int lane;
    std::string railName;
    uint8_t address;
    uint8_t page;
};

/**
 * Protective thresholds written alongside a voltage update, as fractions
 * of the commanded target.
 */
struct ThresholdPolicy
{
    double uvWarnFraction = 0.90;
    double uvFaultFraction = 0.85;
    double pgoodOnFraction = 0.95;
    double pgoodOffFraction = 0.92;
};

/** Controller-side per-transaction execution overhead for each path. */
struct ControlPathTimes
{
    SimTime hardwareOverhead = 80000;   // 80 us, dedicated bus controller
    SimTime softwareOverhead = 560000;  // 560 us, processor-driven I/O
};

enum class ControlPath : uint8_t
{
    Hardware,
    Software,
};

const char* toString(ControlPath path);

/**
 * Everything the simulator needs to stand up one board: regulator
 * devices with their rails, the lane map, dynamics calibration, and
 * control-path timing.
 */
struct PlatformProfile
{
    std::string name;
    int voutExponent = kDefaultVoutExponent;
    DynamicsParams dynamics;
    ControlPathTimes controlPath;
    ThresholdPolicy thresholds;
    std::vector<RegulatorSpec> regulators;
    std::vector<LaneInfo> lanes;

    const LaneInfo& lane(int id) const;
    const RegulatorSpec& regulator(uint8_t address) const;
    const RailSpec& rail(const LaneInfo& lane) const;
    SimTime overhead(ControlPath path) const;
};

/**
 * Built-in KC705 profile: three UCD9248 controllers at addresses 52, 53,
 * and 54 carrying eleven rails across lanes 0-10.
 */
PlatformProfile kc705Profile();

/** Load a profile from its structured-text form. */
PlatformProfile loadProfile(std::istream& in);
PlatformProfile loadProfileFile(const std::string& path);

}  // namespace voltune
