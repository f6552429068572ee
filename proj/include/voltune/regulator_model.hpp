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
#include "voltune/pmbus_codec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace voltune
{

/** Slew-limited first-order response of one regulated rail. */
struct DynamicsParams
{
    double slewVoltsPerSecond = 250.0;
    // Delay between a VOUT_COMMAND landing on the wire and the output
    // starting to move.
    SimTime responseDelay = 150000;  // 0.15 ms
    // Fraction of the commanded step the output overshoots before coming
    // back; 0 disables the excursion. Used for detector stress tests.
    double overshootFraction = 0.0;
};

struct RailSpec
{
    std::string name;
    double nominalVolts = 1.0;
    double voutMin = 0.0;
    double voutMax = 2.0;
    double calibrationOffset = 0.0;
    double scale = 1.0;
    // Static power draw used to derive READ_IOUT current (I = P / V).
    double modeledPowerWatts = 0.0;
};

/**
 * DAC set point derived from a commanded voltage: the calibration offset
 * is applied, the result clamps to the rail limits, and the output scale
 * maps the DAC domain to the rail.
 */
double dacTarget(double commanded, const RailSpec& rail);

/** PMBus-visible registers of one rail (decoded volts). */
struct RailRegisters
{
    double voutCommand;
    double uvWarnLimit = 0.0;
    double uvFaultLimit = 0.0;
    double powerGoodOn = 0.0;
    double powerGoodOff = 0.0;
};

struct RegulatorSpec
{
    uint8_t address = 52;
    std::vector<RailSpec> rails;  // index == PAGE value
    DynamicsParams dynamics;
    int voutExponent = kDefaultVoutExponent;
    // When set, dropping below VOUT_UV_FAULT_LIMIT latches a fault flag
    // (cleared by CLEAR_FAULTS). Off by default; thresholds are stored
    // but do not trip.
    bool strictUndervoltFault = false;
};

/**
 * Behavioral model of a UCD9248 digital PWM controller: a PAGE selector
 * over up to four regulated rails, LINEAR16 voltage set points and
 * readback, LINEAR11 current readback, and slew-limited output dynamics
 * with a fixed response delay.
 */
class Ucd9248Device : public PmbusDevice
{
  public:
    explicit Ucd9248Device(RegulatorSpec spec);

    uint8_t address() const override
    {
        return spec.address;
    }

    void advanceTo(SimTime now) override;
    BusStatus handleWrite(Command cmd,
                          std::span<const uint8_t> payload) override;
    BusStatus handleRead(Command cmd, std::vector<uint8_t>& out) override;

    /** Model inspection/setup, not part of the wire protocol. */
    size_t railCount() const
    {
        return rails.size();
    }
    uint8_t currentPage() const
    {
        return page;
    }
    double outputVoltage(size_t railIndex) const;
    const RailRegisters& registers(size_t railIndex) const;
    bool faultLatched(size_t railIndex) const;
    /** Force a rail to a voltage and make it the active target. */
    void setRailVoltage(size_t railIndex, double volts);

    const RegulatorSpec& specification() const
    {
        return spec;
    }

  private:
    struct RailState
    {
        RailRegisters regs;
        double output;
        double activeTarget;
        // Waypoints the output is ramping through (overshoot leg first).
        std::vector<double> waypoints;
        struct Pending
        {
            double target;
            SimTime activateAt;
        };
        std::optional<Pending> pending;
        bool faultLatched = false;
    };

    void moveRail(RailState& rail, SimTime from, SimTime to);
    void checkFaults(RailState& rail, const RailSpec& railSpec);

    RegulatorSpec spec;
    std::vector<RailState> rails;
    uint8_t page = 0;
    SimTime lastUpdate = 0;
};

}  // namespace voltune
