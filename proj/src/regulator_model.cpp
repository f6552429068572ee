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
#include "voltune/regulator_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace voltune
{

double dacTarget(double commanded, const RailSpec& rail)
{
    double clamped = std::clamp(commanded + rail.calibrationOffset,
                                rail.voutMin, rail.voutMax);
    return clamped * rail.scale;
}

Ucd9248Device::Ucd9248Device(RegulatorSpec s) : spec(std::move(s))
{
    if (spec.rails.empty() || spec.rails.size() > 4)
    {
        throw std::invalid_argument("regulator needs 1 to 4 rails");
    }
    for (const auto& railSpec : spec.rails)
    {
        if (railSpec.voutMin > railSpec.voutMax)
        {
            throw std::invalid_argument("rail limits inverted");
        }
        RailState state;
        state.output = railSpec.nominalVolts;
        state.activeTarget = railSpec.nominalVolts;
        state.regs.voutCommand = railSpec.nominalVolts;
        rails.push_back(std::move(state));
    }
    if (spec.dynamics.slewVoltsPerSecond <= 0.0)
    {
        throw std::invalid_argument("slew rate must be positive");
    }
}

void Ucd9248Device::moveRail(RailState& rail, SimTime from, SimTime to)
{
    double budget =
        spec.dynamics.slewVoltsPerSecond * toSeconds(to - from);
    while (budget > 0.0 && !rail.waypoints.empty())
    {
        double target = rail.waypoints.front();
        double distance = std::fabs(target - rail.output);
        if (distance <= budget)
        {
            rail.output = target;
            budget -= distance;
            rail.waypoints.erase(rail.waypoints.begin());
        }
        else
        {
            rail.output += (target > rail.output ? budget : -budget);
            budget = 0.0;
        }
    }
}

void Ucd9248Device::checkFaults(RailState& rail, const RailSpec& railSpec)
{
    (void)railSpec;
    if (spec.strictUndervoltFault && rail.regs.uvFaultLimit > 0.0 &&
        rail.output < rail.regs.uvFaultLimit)
    {
        rail.faultLatched = true;
    }
}

void Ucd9248Device::advanceTo(SimTime now)
{
    if (now < lastUpdate)
    {
        throw std::logic_error("regulator time moved backwards");
    }
    while (lastUpdate < now)
    {
        // Step to the next pending-target activation, or straight to now.
        SimTime stepEnd = now;
        for (auto& rail : rails)
        {
            if (rail.pending && rail.pending->activateAt < stepEnd &&
                rail.pending->activateAt > lastUpdate)
            {
                stepEnd = rail.pending->activateAt;
            }
        }
        for (auto& rail : rails)
        {
            moveRail(rail, lastUpdate, stepEnd);
            if (rail.pending && rail.pending->activateAt <= stepEnd)
            {
                double target = rail.pending->target;
                rail.pending.reset();
                rail.waypoints.clear();
                double step = target - rail.output;
                if (spec.dynamics.overshootFraction > 0.0 && step != 0.0)
                {
                    rail.waypoints.push_back(
                        target + step * spec.dynamics.overshootFraction);
                }
                rail.waypoints.push_back(target);
                rail.activeTarget = target;
            }
        }
        lastUpdate = stepEnd;
    }
    for (size_t i = 0; i < rails.size(); ++i)
    {
        checkFaults(rails[i], spec.rails[i]);
    }
}

BusStatus Ucd9248Device::handleWrite(Command cmd,
                                     std::span<const uint8_t> payload)
{
    auto word = [&]() -> double {
        uint16_t raw = static_cast<uint16_t>(payload[0]) |
                       (static_cast<uint16_t>(payload[1]) << 8);
        return decodeLinear16(raw, spec.voutExponent);
    };

    switch (cmd)
    {
        case Command::Page:
            if (payload.size() != 1 || payload[0] >= rails.size())
            {
                return BusStatus::Nacked;
            }
            page = payload[0];
            return BusStatus::Acked;
        case Command::ClearFaults:
            if (!payload.empty())
            {
                return BusStatus::Nacked;
            }
            for (auto& rail : rails)
            {
                rail.faultLatched = false;
            }
            return BusStatus::Acked;
        case Command::VoutCommand:
        case Command::VoutUvWarnLimit:
        case Command::VoutUvFaultLimit:
        case Command::PowerGoodOn:
        case Command::PowerGoodOff:
        {
            if (payload.size() != 2)
            {
                return BusStatus::Nacked;
            }
            RailState& rail = rails[page];
            double volts = word();
            switch (cmd)
            {
                case Command::VoutCommand:
                    rail.regs.voutCommand = volts;
                    // Output starts moving only after the response delay.
                    rail.pending = RailState::Pending{
                        dacTarget(volts, spec.rails[page]),
                        lastUpdate + spec.dynamics.responseDelay};
                    break;
                case Command::VoutUvWarnLimit:
                    rail.regs.uvWarnLimit = volts;
                    break;
                case Command::VoutUvFaultLimit:
                    rail.regs.uvFaultLimit = volts;
                    break;
                case Command::PowerGoodOn:
                    rail.regs.powerGoodOn = volts;
                    break;
                default:
                    rail.regs.powerGoodOff = volts;
                    break;
            }
            checkFaults(rail, spec.rails[page]);
            return BusStatus::Acked;
        }
        default:
            return BusStatus::Nacked;
    }
}

BusStatus Ucd9248Device::handleRead(Command cmd, std::vector<uint8_t>& out)
{
    const RailState& rail = rails[page];
    uint16_t raw = 0;
    switch (cmd)
    {
        case Command::ReadVout:
            raw = encodeLinear16(rail.output, spec.voutExponent);
            break;
        case Command::ReadIout:
        {
            double amps =
                rail.output > 0.0
                    ? spec.rails[page].modeledPowerWatts / rail.output
                    : 0.0;
            raw = encodeLinear11(amps);
            break;
        }
        default:
            return BusStatus::Error;
    }
    out = {static_cast<uint8_t>(raw & 0xFF), static_cast<uint8_t>(raw >> 8)};
    return BusStatus::Acked;
}

double Ucd9248Device::outputVoltage(size_t railIndex) const
{
    return rails.at(railIndex).output;
}

const RailRegisters& Ucd9248Device::registers(size_t railIndex) const
{
    return rails.at(railIndex).regs;
}

bool Ucd9248Device::faultLatched(size_t railIndex) const
{
    return rails.at(railIndex).faultLatched;
}

void Ucd9248Device::setRailVoltage(size_t railIndex, double volts)
{
    RailState& rail = rails.at(railIndex);
    rail.output = volts;
    rail.activeTarget = volts;
    rail.regs.voutCommand = volts;
    rail.waypoints.clear();
    rail.pending.reset();
}

}  // namespace voltune
