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

#include "voltune/pmbus_codec.hpp"

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace voltune
{

/**
 * Simulated time in integer nanoseconds. All standard transaction
 * durations (100/400 kHz clocks, microsecond overheads) are exact at this
 * resolution, which keeps traces reproducible bit for bit.
 */
using SimTime = int64_t;

constexpr double toSeconds(SimTime t)
{
    return static_cast<double>(t) * 1e-9;
}

constexpr SimTime fromSeconds(double s)
{
    return static_cast<SimTime>(s * 1e9 + 0.5);
}

/** Serial clock configuration for the two-wire bus. */
struct BusConfig
{
    uint32_t sclHz = 400000;
    // Clock periods charged per Start/RepeatedStart/Stop event.
    uint32_t startOverheadClocks = 1;
};

/**
 * Wire time for one transaction: nine clocks per data byte (eight bits
 * plus the ACK slot) plus the control events.
 */
SimTime transactionDuration(Primitive p, const BusConfig& config);

/** Outcome of a transaction on the wire. */
enum class BusStatus : uint8_t
{
    Acked,
    Nacked,  // no device at address, or device refused the operation
    Error,   // device-side fault during an otherwise addressed transfer
};

const char* toString(BusStatus status);

struct TransactionResult
{
    BusStatus status = BusStatus::Acked;
    SimTime start = 0;
    SimTime end = 0;
    // Decoded read payload, low byte first; empty for writes and failures.
    std::vector<uint8_t> data;
    // Rail voltage latched at transaction start for READ_VOUT; used by
    // sampling layers so timestamps and values stay consistent.
};

struct BusTraceEntry
{
    SimTime start;
    SimTime end;
    Primitive primitive;
    uint8_t address;
    Command command;
    std::vector<uint8_t> payload;  // written or read data bytes
    BusStatus status;
};

/**
 * Device-side transaction handling. Writes are applied when the frame
 * completes; reads latch state when the device is addressed (transaction
 * start). advanceTo keeps device dynamics caught up with the bus clock.
 */
class PmbusDevice
{
  public:
    virtual ~PmbusDevice() = default;
    virtual uint8_t address() const = 0;
    virtual void advanceTo(SimTime now) = 0;
    virtual BusStatus handleWrite(Command cmd,
                                  std::span<const uint8_t> payload) = 0;
    virtual BusStatus handleRead(Command cmd, std::vector<uint8_t>& out) = 0;
};

/**
 * Single-master bus engine. Transactions execute one at a time against
 * the attached devices and advance the shared virtual clock; the engine
 * never reorders or overlaps them.
 */
class BusEngine
{
  public:
    explicit BusEngine(BusConfig config = {});

    void attach(std::shared_ptr<PmbusDevice> device);

    /** Run one transaction, advancing the clock by its wire duration. */
    TransactionResult execute(const Transaction& txn);

    /** Let simulated time pass with the bus idle (devices keep moving). */
    void idle(SimTime duration);

    SimTime now() const
    {
        return clock;
    }

    const BusConfig& config() const
    {
        return busConfig;
    }

    const std::vector<BusTraceEntry>& trace() const
    {
        return entries;
    }

    void clearTrace()
    {
        entries.clear();
    }

    /** CSV: start_s,end_s,primitive,addr,cmd,payload_hex,status */
    void writeTraceCsv(std::ostream& out) const;

  private:
    PmbusDevice* find(uint8_t address);

    BusConfig busConfig;
    SimTime clock = 0;
    std::vector<std::shared_ptr<PmbusDevice>> devices;
    std::vector<BusTraceEntry> entries;
};

const char* toString(Primitive p);

}  // namespace voltune
