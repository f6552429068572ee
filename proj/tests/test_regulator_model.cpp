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

#include "voltune/platform_profile.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace voltune;

namespace
{

RegulatorSpec mgtSpec()
{
    return kc705Profile().regulator(53);
}

BusStatus writeWord(Ucd9248Device& dev, Command cmd, double volts)
{
    uint16_t raw = encodeLinear16(volts);
    const uint8_t bytes[] = {static_cast<uint8_t>(raw & 0xFF),
                             static_cast<uint8_t>(raw >> 8)};
    return dev.handleWrite(cmd, bytes);
}

BusStatus writePage(Ucd9248Device& dev, uint8_t page)
{
    return dev.handleWrite(Command::Page, std::span(&page, 1));
}

double readVout(Ucd9248Device& dev)
{
    std::vector<uint8_t> out;
    REQUIRE(dev.handleRead(Command::ReadVout, out) == BusStatus::Acked);
    return decodeLinear16(static_cast<uint16_t>(out[0] | (out[1] << 8)));
}

}  // namespace

TEST_CASE("dacTarget applies offset, clamp, and scale")
{
    RailSpec identity;
    identity.voutMin = 0.0;
    identity.voutMax = 2.0;
    CHECK(dacTarget(0.9, identity) == 0.9);

    RailSpec clamped = identity;
    clamped.voutMin = 0.5;
    clamped.voutMax = 1.1;
    CHECK(dacTarget(0.3, clamped) == 0.5);
    CHECK(dacTarget(1.9, clamped) == 1.1);

    RailSpec offset = identity;
    offset.calibrationOffset = 0.01;
    CHECK(dacTarget(0.9, offset) == doctest::Approx(0.91).epsilon(1e-12));

    RailSpec scaled = identity;
    scaled.scale = 0.5;
    CHECK(dacTarget(1.0, scaled) == 0.5);
}

TEST_CASE("rails start at nominal and ramp after the response delay")
{
    Ucd9248Device dev(mgtSpec());
    REQUIRE(writePage(dev, 2) == BusStatus::Acked);  // MGTAVCC
    CHECK(readVout(dev) == 1.0);

    REQUIRE(writeWord(dev, Command::VoutCommand, 0.5) == BusStatus::Acked);
    CHECK(readVout(dev) == 1.0);  // nothing moves at zero elapsed time

    // Still flat through the 0.15 ms response delay.
    dev.advanceTo(fromSeconds(0.00015));
    CHECK(readVout(dev) == 1.0);

    // Half the 2 ms ramp: 0.25 V of the 0.5 V step consumed.
    dev.advanceTo(fromSeconds(0.00115));
    CHECK(readVout(dev) == doctest::Approx(0.75).epsilon(1e-9));

    // 0.5 V / 250 V/s ends the ramp 2.15 ms after the write.
    dev.advanceTo(fromSeconds(0.00215));
    CHECK(readVout(dev) == 0.5);
    CHECK(dev.outputVoltage(2) == 0.5);
}

TEST_CASE("smaller steps settle strictly sooner")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);
    writeWord(dev, Command::VoutCommand, 0.9);
    // Mid-ramp at 0.55 ms the output passes through 0.9; the quantized
    // target 0.89990234375 lands about 0.4 us later, far ahead of the
    // 2.15 ms full-step timeline.
    dev.advanceTo(fromSeconds(0.00055));
    CHECK(dev.outputVoltage(2) == doctest::Approx(0.9).epsilon(1e-9));
    dev.advanceTo(fromSeconds(0.00056));
    CHECK(dev.outputVoltage(2) == decodeLinear16(encodeLinear16(0.9)));
}

TEST_CASE("advance by zero changes nothing")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);
    writeWord(dev, Command::VoutCommand, 0.5);
    dev.advanceTo(0);
    CHECK(dev.outputVoltage(2) == 1.0);
}

TEST_CASE("PAGE isolates writes to the selected rail")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 1);  // VCC1V5
    writeWord(dev, Command::VoutCommand, 0.9);
    writeWord(dev, Command::VoutUvWarnLimit, 0.81);
    dev.advanceTo(fromSeconds(0.01));

    // Registers hold the wire value, so compare against the quantized volts.
    CHECK(dev.outputVoltage(1) == decodeLinear16(encodeLinear16(0.9)));
    CHECK(dev.registers(1).uvWarnLimit == decodeLinear16(encodeLinear16(0.81)));
    // Every other rail is untouched.
    CHECK(dev.outputVoltage(0) == 2.5);
    CHECK(dev.outputVoltage(2) == 1.0);
    CHECK(dev.outputVoltage(3) == 1.2);
    CHECK(dev.registers(0).uvWarnLimit == 0.0);
}

TEST_CASE("threshold writes never move the output")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);
    writeWord(dev, Command::VoutUvFaultLimit, 0.7);
    writeWord(dev, Command::PowerGoodOn, 0.95);
    writeWord(dev, Command::PowerGoodOff, 0.92);
    dev.advanceTo(fromSeconds(0.01));
    CHECK(dev.outputVoltage(2) == 1.0);
    CHECK(dev.registers(2).uvFaultLimit == decodeLinear16(encodeLinear16(0.7)));
}

TEST_CASE("out-of-range page and bad writes are Nacked")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);
    CHECK(writePage(dev, 5) == BusStatus::Nacked);
    CHECK(dev.currentPage() == 2);  // unchanged

    const uint8_t one[] = {0x01};
    CHECK(dev.handleWrite(Command::ReadVout, one) == BusStatus::Nacked);
    CHECK(dev.handleWrite(Command::VoutCommand, one) == BusStatus::Nacked);

    std::vector<uint8_t> out;
    CHECK(dev.handleRead(Command::VoutCommand, out) == BusStatus::Error);
}

TEST_CASE("current readback models P over V")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);  // MGTAVCC, modeled at 0.2 W
    std::vector<uint8_t> out;
    REQUIRE(dev.handleRead(Command::ReadIout, out) == BusStatus::Acked);
    double amps = decodeLinear11(static_cast<uint16_t>(out[0] | (out[1] << 8)));
    CHECK(amps == 0.199951171875);  // nearest representable to 0.2 A
    CHECK(std::fabs(amps - 0.2) <= std::pow(2.0, -13));
}

TEST_CASE("commanded values clamp to the rail limits")
{
    RegulatorSpec spec = mgtSpec();
    Ucd9248Device dev(spec);
    writePage(dev, 2);  // limits [0, 1.5]
    writeWord(dev, Command::VoutCommand, 1.45);
    dev.advanceTo(fromSeconds(0.01));
    CHECK(dev.outputVoltage(2) ==
          doctest::Approx(dacTarget(decodeLinear16(encodeLinear16(1.45)),
                                    spec.rails[2]))
              .epsilon(1e-12));

    // Above vout_max the target pins at the limit.
    writeWord(dev, Command::VoutCommand, 1.75);
    dev.advanceTo(fromSeconds(0.02));
    CHECK(dev.outputVoltage(2) == 1.5);
}

TEST_CASE("strict mode latches undervolt faults until cleared")
{
    RegulatorSpec spec = mgtSpec();
    spec.strictUndervoltFault = true;
    Ucd9248Device dev(spec);
    writePage(dev, 2);
    writeWord(dev, Command::VoutUvFaultLimit, 0.8);
    writeWord(dev, Command::VoutCommand, 0.5);
    dev.advanceTo(fromSeconds(0.01));
    CHECK(dev.faultLatched(2));

    // Recovery alone does not clear the latch.
    writeWord(dev, Command::VoutCommand, 1.0);
    dev.advanceTo(fromSeconds(0.02));
    CHECK(dev.faultLatched(2));

    CHECK(dev.handleWrite(Command::ClearFaults, {}) == BusStatus::Acked);
    CHECK_FALSE(dev.faultLatched(2));
}

TEST_CASE("default profile stores thresholds without tripping")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);
    writeWord(dev, Command::VoutUvFaultLimit, 0.8);
    writeWord(dev, Command::VoutCommand, 0.5);
    dev.advanceTo(fromSeconds(0.01));
    CHECK_FALSE(dev.faultLatched(2));
}

TEST_CASE("overshoot excursion passes the target and returns")
{
    RegulatorSpec spec = mgtSpec();
    spec.dynamics.overshootFraction = 0.1;
    Ucd9248Device dev(spec);
    writePage(dev, 2);
    writeWord(dev, Command::VoutCommand, 0.5);

    // Downward step overshoots by 10 % of the step: waypoint at 0.45.
    // delay 0.15 ms + (0.55 V)/250 V/s puts the low point at 2.35 ms.
    dev.advanceTo(fromSeconds(0.00235));
    CHECK(dev.outputVoltage(2) == doctest::Approx(0.45).epsilon(1e-9));

    // Then 0.05 V back up: settled 0.2 ms later.
    dev.advanceTo(fromSeconds(0.00255));
    CHECK(dev.outputVoltage(2) == 0.5);
}

TEST_CASE("a newer set point supersedes a pending one")
{
    Ucd9248Device dev(mgtSpec());
    writePage(dev, 2);
    writeWord(dev, Command::VoutCommand, 0.5);
    // Second command lands before the first activates.
    writeWord(dev, Command::VoutCommand, 0.9);
    dev.advanceTo(fromSeconds(0.01));
    CHECK(dev.outputVoltage(2) == decodeLinear16(encodeLinear16(0.9)));
}

TEST_CASE("spec validation rejects broken configurations")
{
    RegulatorSpec empty;
    empty.rails.clear();
    CHECK_THROWS_AS(Ucd9248Device{empty}, std::invalid_argument);

    RegulatorSpec inverted = mgtSpec();
    inverted.rails[0].voutMin = 2.0;
    inverted.rails[0].voutMax = 1.0;
    CHECK_THROWS_AS(Ucd9248Device{inverted}, std::invalid_argument);

    RegulatorSpec noSlew = mgtSpec();
    noSlew.dynamics.slewVoltsPerSecond = 0.0;
    CHECK_THROWS_AS(Ucd9248Device{noSlew}, std::invalid_argument);
}
