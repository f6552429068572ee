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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace voltune
{

/**
 * PMBus command subset used by the voltage controller.
 *
 * Codes are the standard PMBus command codes; only the commands the
 * controller actually issues are modeled.
 */
enum class Command : uint8_t
{
    Page = 0x00,
    ClearFaults = 0x03,
    VoutCommand = 0x21,
    VoutUvWarnLimit = 0x43,
    VoutUvFaultLimit = 0x44,
    PowerGoodOn = 0x5E,
    PowerGoodOff = 0x5F,
    ReadVout = 0x8B,
    ReadIout = 0x8C,
};

/**
 * SMBus transaction primitives. WriteByte/WriteWord/ReadWord are the
 * workhorses; SendByte carries command-only writes (CLEAR_FAULTS) and
 * ReadByte covers single-byte readback.
 */
enum class Primitive : uint8_t
{
    SendByte,
    WriteByte,
    WriteWord,
    ReadByte,
    ReadWord,
};

/** Data transfer width/direction a command supports. */
enum class TransferKind : uint8_t
{
    SendByte,  // command only, no data
    Byte,      // one data byte
    Word,      // two data bytes, low byte first
    ReadWord,  // read-only word telemetry
};

struct CommandInfo
{
    Command command;
    const char* name;
    TransferKind kind;
    bool writable;
    bool readable;
};

/** Command table lookup. Throws std::invalid_argument for unknown codes. */
const CommandInfo& commandInfo(Command cmd);
const CommandInfo& commandInfo(uint8_t code);

/** All commands in the modeled subset, in code order. */
const std::vector<CommandInfo>& commandTable();

/**
 * LINEAR16 voltage encoding: volts = mantissa * 2^exponent with an
 * unsigned 16-bit mantissa. The exponent comes from VOUT_MODE context and
 * defaults to -12 on the modeled regulators.
 */
constexpr int kDefaultVoutExponent = -12;

/**
 * Encode volts into a LINEAR16 mantissa, rounding to nearest (half away
 * from zero). Throws std::out_of_range if volts is negative or the
 * mantissa would exceed 16 bits.
 */
uint16_t encodeLinear16(double volts, int exponent = kDefaultVoutExponent);

/** Decode a LINEAR16 mantissa back to volts. */
double decodeLinear16(uint16_t raw, int exponent = kDefaultVoutExponent);

/**
 * Encode a value into LINEAR11: an 11-bit two's complement mantissa and a
 * 5-bit two's complement exponent packed as [exp:5][mantissa:11].
 *
 * The encoder tries all 32 exponents, keeps the one with the smallest
 * quantization error, and breaks ties toward the most negative exponent
 * (maximum resolution). Zero encodes as the all-zero word. Throws
 * std::out_of_range when no exponent can represent the value.
 */
uint16_t encodeLinear11(double value);

/** Decode a LINEAR11 word. Total: every 16-bit pattern decodes. */
double decodeLinear11(uint16_t raw);

/**
 * One bus transaction as the controller sees it: a primitive applied to a
 * 7-bit device address and command, with 0-2 payload bytes for writes.
 * Read primitives carry no payload; the expected length is implied by the
 * primitive.
 */
struct Transaction
{
    Primitive primitive;
    uint8_t address;  // 7-bit
    Command command;
    std::vector<uint8_t> payload;

    bool operator==(const Transaction&) const = default;
};

/** Convenience constructors for the common shapes. */
Transaction makeSendByte(uint8_t address, Command cmd);
Transaction makeWriteByte(uint8_t address, Command cmd, uint8_t value);
Transaction makeWriteWord(uint8_t address, Command cmd, uint16_t value);
Transaction makeReadByte(uint8_t address, Command cmd);
Transaction makeReadWord(uint8_t address, Command cmd);

/** Number of bytes clocked on the wire (address bytes included). */
int dataByteCount(Primitive p);

/** Start/RepeatedStart/Stop events in the frame. */
int controlEventCount(Primitive p);

/** Wire-level frame events for one transaction. */
enum class EventKind : uint8_t
{
    Start,
    RepeatedStart,
    Stop,
    Byte,
};

struct FrameEvent
{
    EventKind kind;
    uint8_t value;  // byte value; 0 for control events and device-driven slots
    bool deviceDriven;  // true for read-data bytes supplied by the device
    bool ackExpected;   // ninth-clock ACK expectation for byte events

    bool operator==(const FrameEvent&) const = default;
};

using WireFrame = std::vector<FrameEvent>;

/** Parse failure, carrying the offending event index. */
class ParseError : public std::runtime_error
{
  public:
    ParseError(size_t index, const std::string& what) :
        std::runtime_error(what), index(index)
    {}
    size_t index;
};

/**
 * Lower a transaction to its wire frame: Start, address byte
 * (addr<<1 | rw), command byte, payload low byte first, RepeatedStart and
 * read address for reads, Stop. Each byte event carries one ACK slot; the
 * final byte of a read is NACKed by the master per SMBus convention.
 *
 * Throws std::invalid_argument for a primitive/command mismatch or a
 * payload length that does not fit the primitive.
 */
WireFrame frame(const Transaction& txn);

/**
 * Recover the transaction from a wire frame, validating structure
 * (framing order, address consistency across a repeated start, known
 * command, payload length). Throws ParseError with the index of the
 * offending event.
 */
Transaction parse(const WireFrame& events);

}  // namespace voltune
