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
#include "voltune/platform_profile.hpp"

#include "voltune/config_text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace voltune
{

const char* toString(ControlPath path)
{
    return path == ControlPath::Hardware ? "hardware" : "software";
}

const LaneInfo& PlatformProfile::lane(int id) const
{
    for (const auto& info : lanes)
    {
        if (info.lane == id)
        {
            return info;
        }
    }
    throw std::out_of_range("unknown lane " + std::to_string(id));
}

const RegulatorSpec& PlatformProfile::regulator(uint8_t address) const
{
    for (const auto& reg : regulators)
    {
        if (reg.address == address)
        {
            return reg;
        }
    }
    throw std::out_of_range("no regulator at address " +
                            std::to_string(address));
}

const RailSpec& PlatformProfile::rail(const LaneInfo& lane) const
{
    return regulator(lane.address).rails.at(lane.page);
}

SimTime PlatformProfile::overhead(ControlPath path) const
{
    return path == ControlPath::Hardware ? controlPath.hardwareOverhead
                                         : controlPath.softwareOverhead;
}

PlatformProfile kc705Profile()
{
    PlatformProfile profile;
    profile.name = "kc705";

    struct Row
    {
        int lane;
        const char* rail;
        uint8_t address;
        uint8_t page;
        double nominal;
        double power;
    };
    // Lane map of the KC705 power tree: three UCD9248 controllers, eleven
    // rails. Modeled power values are nominal board draws used only for
    // READ_IOUT telemetry.
    const Row rows[] = {
        {0, "VCCINT", 52, 0, 1.0, 2.0},
        {1, "VCCAUX", 52, 1, 1.8, 0.5},
        {2, "VCC3V3", 52, 2, 3.3, 1.0},
        {3, "VADJ", 52, 3, 2.5, 0.5},
        {4, "VCC2V5", 53, 0, 2.5, 0.3},
        {5, "VCC1V5", 53, 1, 1.5, 0.3},
        {6, "MGTAVCC", 53, 2, 1.0, 0.2},
        {7, "MGTAVTT", 53, 3, 1.2, 0.15},
        {8, "ACCAUX_IO", 54, 0, 1.8, 0.2},
        {9, "VCCBRAM", 54, 1, 1.0, 0.1},
        {10, "MGTVCCAUX", 54, 2, 1.8, 0.1},
    };

    std::map<uint8_t, RegulatorSpec> regs;
    for (const Row& row : rows)
    {
        RegulatorSpec& reg = regs[row.address];
        reg.address = row.address;
        if (reg.rails.size() != row.page)
        {
            throw std::logic_error("kc705 pages out of order");
        }
        RailSpec rail;
        rail.name = row.rail;
        rail.nominalVolts = row.nominal;
        rail.voutMin = 0.0;
        rail.voutMax = row.nominal + 0.5;
        rail.modeledPowerWatts = row.power;
        reg.rails.push_back(rail);
        profile.lanes.push_back(
            LaneInfo{row.lane, row.rail, row.address, row.page});
    }
    for (auto& [address, reg] : regs)
    {
        reg.dynamics = profile.dynamics;
        reg.voutExponent = profile.voutExponent;
        profile.regulators.push_back(reg);
    }
    return profile;
}

PlatformProfile loadProfile(std::istream& in)
{
    ConfigDoc doc = parseConfig(in);
    PlatformProfile profile;

    const ConfigSection& platform = doc.require("platform");
    profile.name = platform.get("name");
    profile.voutExponent =
        static_cast<int>(platform.getInt("vout_exponent", -12));

    if (const ConfigSection* dyn = doc.find("dynamics"))
    {
        profile.dynamics.slewVoltsPerSecond =
            dyn->getDouble("slew_volts_per_second", 250.0);
        profile.dynamics.responseDelay =
            fromSeconds(dyn->getDouble("response_delay_s", 0.00015));
        profile.dynamics.overshootFraction =
            dyn->getDouble("overshoot_fraction", 0.0);
    }
    if (const ConfigSection* cp = doc.find("control_path"))
    {
        profile.controlPath.hardwareOverhead =
            fromSeconds(cp->getDouble("hardware_overhead_s", 0.00008));
        profile.controlPath.softwareOverhead =
            fromSeconds(cp->getDouble("software_overhead_s", 0.00056));
    }
    if (const ConfigSection* th = doc.find("thresholds"))
    {
        profile.thresholds.uvWarnFraction =
            th->getDouble("uv_warn_fraction", 0.90);
        profile.thresholds.uvFaultFraction =
            th->getDouble("uv_fault_fraction", 0.85);
        profile.thresholds.pgoodOnFraction =
            th->getDouble("pgood_on_fraction", 0.95);
        profile.thresholds.pgoodOffFraction =
            th->getDouble("pgood_off_fraction", 0.92);
    }

    std::map<uint8_t, std::map<uint8_t, RailSpec>> railsByAddress;
    for (const ConfigSection* section : doc.withPrefix("lane "))
    {
        int laneId = 0;
        try
        {
            laneId = std::stoi(section->name.substr(5));
        }
        catch (const std::exception&)
        {
            throw ConfigError(section->line, "bad lane section name");
        }
        int64_t address = section->getInt("address");
        int64_t page = section->getInt("page");
        if (address < 0 || address > 0x7F || page < 0 || page > 3)
        {
            throw ConfigError(section->line, "address or page out of range");
        }
        RailSpec rail;
        rail.name = section->get("rail");
        rail.nominalVolts = section->getDouble("nominal_v");
        rail.voutMin = section->getDouble("vout_min_v", 0.0);
        rail.voutMax =
            section->getDouble("vout_max_v", rail.nominalVolts + 0.5);
        rail.calibrationOffset = section->getDouble("calibration_offset_v",
                                                    0.0);
        rail.scale = section->getDouble("scale", 1.0);
        rail.modeledPowerWatts = section->getDouble("modeled_power_w", 0.0);
        if (rail.voutMin > rail.voutMax)
        {
            throw ConfigError(section->line, "rail limits inverted");
        }
        auto& pages = railsByAddress[static_cast<uint8_t>(address)];
        if (!pages.emplace(static_cast<uint8_t>(page), rail).second)
        {
            throw ConfigError(section->line, "duplicate (address, page)");
        }
        for (const auto& lane : profile.lanes)
        {
            if (lane.lane == laneId)
            {
                throw ConfigError(section->line, "duplicate lane id");
            }
        }
        profile.lanes.push_back(LaneInfo{laneId, rail.name,
                                         static_cast<uint8_t>(address),
                                         static_cast<uint8_t>(page)});
    }
    if (profile.lanes.empty())
    {
        throw ConfigError(0, "profile defines no lanes");
    }

    for (auto& [address, pages] : railsByAddress)
    {
        RegulatorSpec reg;
        reg.address = address;
        uint8_t expected = 0;
        for (auto& [page, rail] : pages)
        {
            if (page != expected++)
            {
                throw ConfigError(0, "pages at address " +
                                         std::to_string(address) +
                                         " are not dense from 0");
            }
            reg.rails.push_back(rail);
        }
        reg.dynamics = profile.dynamics;
        reg.voutExponent = profile.voutExponent;
        profile.regulators.push_back(reg);
    }

    std::sort(profile.lanes.begin(), profile.lanes.end(),
              [](const LaneInfo& a, const LaneInfo& b) {
                  return a.lane < b.lane;
              });
    return profile;
}

PlatformProfile loadProfileFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open profile: " + path);
    }
    return loadProfile(in);
}

}  // namespace voltune
