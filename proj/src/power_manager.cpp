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
#include "voltune/power_manager.hpp"

#include <cstdio>
#include <sstream>

namespace voltune
{

const char* toString(Opcode op)
{
    switch (op)
    {
        case Opcode::ClearStatus:
            return "clear_status";
        case Opcode::SetUnderVoltage:
            return "set_under_voltage";
        case Opcode::SetPGoodOn:
            return "set_pgood_on";
        case Opcode::SetPGoodOff:
            return "set_pgood_off";
        case Opcode::SetVoltage:
            return "set_voltage";
        case Opcode::GetVoltage:
            return "get_voltage";
    }
    return "?";
}

const char* toString(ExpansionMode mode)
{
    return mode == ExpansionMode::Prototype ? "prototype" : "minimal";
}

const char* toString(RequestOutcome outcome)
{
    switch (outcome)
    {
        case RequestOutcome::Completed:
            return "completed";
        case RequestOutcome::Nacked:
            return "nacked";
        case RequestOutcome::DeviceError:
            return "device_error";
        case RequestOutcome::Rejected:
            return "rejected";
    }
    return "?";
}

void writeTraceCsv(std::ostream& out, const VoltageTrace& trace)
{
    out << "time_s,voltage_v\n";
    char buf[64];
    for (const auto& sample : trace)
    {
        std::snprintf(buf, sizeof(buf), "%.9f,%.9g\n", toSeconds(sample.time),
                      sample.volts);
        out << buf;
    }
}

PowerManager::PowerManager(BusEngine& engine, const PlatformProfile& profile,
                           ControlPath path, ExpansionMode mode) :
    engine(engine), profile(profile), controlPath(path), expansionMode(mode)
{}

SimTime PowerManager::perTransactionOverhead() const
{
    return profile.overhead(controlPath);
}

Transaction PowerManager::voutWrite(const LaneInfo& lane, Command cmd,
                                    double volts) const
{
    return makeWriteWord(lane.address, cmd,
                         encodeLinear16(volts, profile.voutExponent));
}

std::vector<Transaction> PowerManager::expand(const Request& request) const
{
    std::vector<Transaction> list;
    if (request.opcode == Opcode::ClearStatus)
    {
        // Controller-internal reset; nothing goes out on the wire.
        return list;
    }

    const LaneInfo& lane = profile.lane(request.lane);
    auto cached = cachedPages.find(lane.address);
    if (cached == cachedPages.end() || cached->second != lane.page)
    {
        list.push_back(makeWriteByte(lane.address, Command::Page, lane.page));
    }

    switch (request.opcode)
    {
        case Opcode::SetUnderVoltage:
            list.push_back(
                voutWrite(lane, Command::VoutUvWarnLimit, request.volts));
            list.push_back(
                voutWrite(lane, Command::VoutUvFaultLimit, request.volts));
            break;
        case Opcode::SetPGoodOn:
            list.push_back(
                voutWrite(lane, Command::PowerGoodOn, request.volts));
            break;
        case Opcode::SetPGoodOff:
            list.push_back(
                voutWrite(lane, Command::PowerGoodOff, request.volts));
            break;
        case Opcode::SetVoltage:
            if (expansionMode == ExpansionMode::Prototype)
            {
                const ThresholdPolicy& th = profile.thresholds;
                list.push_back(voutWrite(lane, Command::VoutUvWarnLimit,
                                         request.volts * th.uvWarnFraction));
                list.push_back(voutWrite(lane, Command::VoutUvFaultLimit,
                                         request.volts * th.uvFaultFraction));
                list.push_back(voutWrite(lane, Command::PowerGoodOn,
                                         request.volts * th.pgoodOnFraction));
                list.push_back(voutWrite(lane, Command::PowerGoodOff,
                                         request.volts * th.pgoodOffFraction));
            }
            list.push_back(voutWrite(lane, Command::VoutCommand,
                                     request.volts));
            break;
        case Opcode::GetVoltage:
            list.push_back(makeReadWord(lane.address, Command::ReadVout));
            break;
        default:
            throw std::invalid_argument("unknown opcode");
    }
    return list;
}

RequestStatus PowerManager::submit(const Request& request)
{
    RequestStatus status;
    if (request.opcode == Opcode::ClearStatus)
    {
        cachedPages.clear();
        return status;
    }

    std::vector<Transaction> list;
    try
    {
        list = expand(request);
    }
    catch (const std::exception& e)
    {
        status.outcome = RequestOutcome::Rejected;
        status.detail = e.what();
        return status;
    }

    const LaneInfo& lane = profile.lane(request.lane);
    for (size_t step = 0; step < list.size(); ++step)
    {
        const Transaction& txn = list[step];
        TransactionResult result = engine.execute(txn);
        engine.idle(perTransactionOverhead());
        ++status.transactionCount;
        if (result.status != BusStatus::Acked)
        {
            status.outcome = result.status == BusStatus::Nacked
                                 ? RequestOutcome::Nacked
                                 : RequestOutcome::DeviceError;
            status.failedStep = step;
            status.detail = std::string(toString(result.status)) + " at " +
                            toString(txn.primitive);
            if (txn.command == Command::Page)
            {
                // The device's selector state is unknown now.
                cachedPages.erase(txn.address);
            }
            return status;
        }
        if (txn.command == Command::Page)
        {
            cachedPages[txn.address] = txn.payload[0];
        }
        if (txn.primitive == Primitive::ReadWord &&
            txn.command == Command::ReadVout)
        {
            uint16_t raw = static_cast<uint16_t>(result.data[0]) |
                           (static_cast<uint16_t>(result.data[1]) << 8);
            status.readbackVolts = decodeLinear16(raw, profile.voutExponent);
        }
    }
    (void)lane;
    return status;
}

VoltageTrace PowerManager::sampleLoop(int lane, size_t count)
{
    VoltageTrace trace;
    trace.reserve(count);
    const LaneInfo& info = profile.lane(lane);
    for (size_t i = 0; i < count; ++i)
    {
        auto cached = cachedPages.find(info.address);
        if (cached == cachedPages.end() || cached->second != info.page)
        {
            TransactionResult page = engine.execute(
                makeWriteByte(info.address, Command::Page, info.page));
            engine.idle(perTransactionOverhead());
            if (page.status != BusStatus::Acked)
            {
                cachedPages.erase(info.address);
                return trace;  // partial trace; caller sees the shortfall
            }
            cachedPages[info.address] = info.page;
        }
        TransactionResult read =
            engine.execute(makeReadWord(info.address, Command::ReadVout));
        engine.idle(perTransactionOverhead());
        if (read.status != BusStatus::Acked)
        {
            return trace;
        }
        uint16_t raw = static_cast<uint16_t>(read.data[0]) |
                       (static_cast<uint16_t>(read.data[1]) << 8);
        trace.push_back(VoltageSample{
            read.start, decodeLinear16(raw, profile.voutExponent)});
    }
    return trace;
}

std::vector<Request> parseRequestScript(std::istream& in)
{
    std::vector<Request> requests;
    std::string line;
    size_t lineNo = 0;
    while (std::getline(in, line))
    {
        ++lineNo;
        size_t hash = line.find('#');
        if (hash != std::string::npos)
        {
            line.erase(hash);
        }
        std::istringstream fields(line);
        int opcode = 0;
        int lane = 0;
        double volts = 0.0;
        if (!(fields >> opcode))
        {
            continue;  // blank or comment-only line
        }
        if (opcode < 0 || opcode > 5)
        {
            throw std::runtime_error("script line " + std::to_string(lineNo) +
                                     ": opcode out of range");
        }
        if (!(fields >> lane >> volts))
        {
            throw std::runtime_error("script line " + std::to_string(lineNo) +
                                     ": expected 'opcode lane value'");
        }
        requests.push_back(
            Request{static_cast<Opcode>(opcode), lane, volts});
    }
    return requests;
}

void writeStatusLogCsv(std::ostream& out, const std::vector<Request>& requests,
                       const std::vector<RequestStatus>& statuses)
{
    out << "index,opcode,lane,value_v,outcome,failed_step,readback_v\n";
    char buf[64];
    for (size_t i = 0; i < requests.size() && i < statuses.size(); ++i)
    {
        const Request& req = requests[i];
        const RequestStatus& st = statuses[i];
        out << i << ',' << toString(req.opcode) << ',' << req.lane << ',';
        std::snprintf(buf, sizeof(buf), "%.9g,", req.volts);
        out << buf << toString(st.outcome) << ',';
        if (st.failedStep)
        {
            out << *st.failedStep;
        }
        out << ',';
        if (st.readbackVolts)
        {
            std::snprintf(buf, sizeof(buf), "%.9g", *st.readbackVolts);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace voltune
