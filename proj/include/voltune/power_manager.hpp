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
#include "voltune/platform_profile.hpp"

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace voltune
{

/** Controller opcodes, as encoded in the 4-bit request field. */
enum class Opcode : uint8_t
{
    ClearStatus = 0x0,
    SetUnderVoltage = 0x1,
    SetPGoodOn = 0x2,
    SetPGoodOff = 0x3,
    SetVoltage = 0x4,
    GetVoltage = 0x5,
};

const char* toString(Opcode op);

struct Request
{
    Opcode opcode;
    int lane = 0;
    double volts = 0.0;
};

/**
 * SetVoltage expansion: the prototype workflow rewrites the protective
 * thresholds around every update; the minimal expansion writes only the
 * set point.
 */
enum class ExpansionMode : uint8_t
{
    Prototype,
    Minimal,
};

const char* toString(ExpansionMode mode);

enum class RequestOutcome : uint8_t
{
    Completed,
    Nacked,
    DeviceError,
    Rejected,  // request invalid before anything hit the bus
};

const char* toString(RequestOutcome outcome);

struct RequestStatus
{
    RequestOutcome outcome = RequestOutcome::Completed;
    // Index into the expansion of the transaction that failed.
    std::optional<size_t> failedStep;
    std::string detail;
    std::optional<double> readbackVolts;  // GetVoltage result
    size_t transactionCount = 0;
};

struct VoltageSample
{
    SimTime time;  // when the device latched the reading
    double volts;
};

using VoltageTrace = std::vector<VoltageSample>;

/** time_s,voltage_v */
void writeTraceCsv(std::ostream& out, const VoltageTrace& trace);

/**
 * Opcode layer of the controller: expands requests into PMBus
 * transactions, tracks the PAGE each device was last set to so redundant
 * selector writes are skipped, and charges the per-transaction execution
 * overhead of the active control path.
 */
class PowerManager
{
  public:
    PowerManager(BusEngine& engine, const PlatformProfile& profile,
                 ControlPath path,
                 ExpansionMode mode = ExpansionMode::Prototype);

    /**
     * Build the transaction list for a request against the current page
     * cache. Pure: does not touch the bus or the cache.
     */
    std::vector<Transaction> expand(const Request& request) const;

    /**
     * Execute a request. Transactions run back to back; the first Nack
     * or device error aborts the remainder and is reported with its step
     * index. A failed PAGE write invalidates that device's cache entry.
     */
    RequestStatus submit(const Request& request);

    /**
     * Periodic READ_VOUT sampling of one lane. Sample timestamps are the
     * instants the device latched the value; the spacing between samples
     * is the ReadWord wire time plus the control-path overhead.
     */
    VoltageTrace sampleLoop(int lane, size_t count);

    void setExpansionMode(ExpansionMode mode)
    {
        expansionMode = mode;
    }
    ExpansionMode expansion() const
    {
        return expansionMode;
    }
    ControlPath path() const
    {
        return controlPath;
    }
    SimTime perTransactionOverhead() const;
    const PlatformProfile& platform() const
    {
        return profile;
    }
    const std::map<uint8_t, uint8_t>& pageCache() const
    {
        return cachedPages;
    }

  private:
    Transaction voutWrite(const LaneInfo& lane, Command cmd,
                          double volts) const;

    BusEngine& engine;
    const PlatformProfile& profile;
    ControlPath controlPath;
    ExpansionMode expansionMode;
    std::map<uint8_t, uint8_t> cachedPages;
};

/**
 * Request scripts: one request per line, `opcode lane value`, with blank
 * lines and # comments ignored.
 */
std::vector<Request> parseRequestScript(std::istream& in);

/** index,opcode,lane,value_v,outcome,failed_step,readback_v */
void writeStatusLogCsv(std::ostream& out,
                       const std::vector<Request>& requests,
                       const std::vector<RequestStatus>& statuses);

}  // namespace voltune
