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
#include "voltune/bus_engine.hpp"

#include <cinttypes>
#include <cstdio>
#include <stdexcept>

namespace voltune
{

SimTime transactionDuration(Primitive p, const BusConfig& config)
{
    if (config.sclHz == 0)
    {
        throw std::invalid_argument("SCL rate must be nonzero");
    }
    int64_t clocks = static_cast<int64_t>(dataByteCount(p)) * 9 +
                     static_cast<int64_t>(controlEventCount(p)) *
                         config.startOverheadClocks;
    // Exact for the standard 100/400 kHz rates; rounded to the nearest
    // nanosecond otherwise.
    return (clocks * 1000000000 + config.sclHz / 2) / config.sclHz;
}

const char* toString(BusStatus status)
{
    switch (status)
    {
        case BusStatus::Acked:
            return "acked";
        case BusStatus::Nacked:
            return "nacked";
        case BusStatus::Error:
            return "error";
    }
    return "?";
}

const char* toString(Primitive p)
{
    switch (p)
    {
        case Primitive::SendByte:
            return "send_byte";
        case Primitive::WriteByte:
            return "write_byte";
        case Primitive::WriteWord:
            return "write_word";
        case Primitive::ReadByte:
            return "read_byte";
        case Primitive::ReadWord:
            return "read_word";
    }
    return "?";
}

BusEngine::BusEngine(BusConfig config) : busConfig(config) {}

void BusEngine::attach(std::shared_ptr<PmbusDevice> device)
{
    if (find(device->address()) != nullptr)
    {
        throw std::invalid_argument("duplicate device address on bus");
    }
    devices.push_back(std::move(device));
}

PmbusDevice* BusEngine::find(uint8_t address)
{
    for (auto& dev : devices)
    {
        if (dev->address() == address)
        {
            return dev.get();
        }
    }
    return nullptr;
}

TransactionResult BusEngine::execute(const Transaction& txn)
{
    // Validate the transaction by lowering it; malformed requests are
    // caller bugs, not bus outcomes.
    frame(txn);

    TransactionResult result;
    result.start = clock;
    result.end = clock + transactionDuration(txn.primitive, busConfig);

    PmbusDevice* device = find(txn.address);
    if (device == nullptr)
    {
        // Nobody ACKs the address byte. The master still owned the bus
        // for the attempted frame, so the full duration elapses.
        result.status = BusStatus::Nacked;
    }
    else
    {
        device->advanceTo(result.start);
        bool read = txn.primitive == Primitive::ReadByte ||
                    txn.primitive == Primitive::ReadWord;
        if (read)
        {
            // Reads latch device state at the moment the device is
            // addressed.
            result.status = device->handleRead(txn.command, result.data);
            size_t expected = txn.primitive == Primitive::ReadByte ? 1 : 2;
            if (result.status == BusStatus::Acked &&
                result.data.size() != expected)
            {
                throw std::logic_error("device returned wrong read length");
            }
            device->advanceTo(result.end);
        }
        else
        {
            // Writes take effect when the frame completes.
            device->advanceTo(result.end);
            result.status = device->handleWrite(
                txn.command, std::span<const uint8_t>(txn.payload));
        }
        if (result.status != BusStatus::Acked)
        {
            result.data.clear();
        }
    }

    clock = result.end;
    entries.push_back(BusTraceEntry{result.start, result.end, txn.primitive,
                                    txn.address, txn.command,
                                    result.data.empty() ? txn.payload
                                                        : result.data,
                                    result.status});
    return result;
}

void BusEngine::idle(SimTime duration)
{
    if (duration < 0)
    {
        throw std::invalid_argument("cannot idle backwards");
    }
    clock += duration;
    for (auto& dev : devices)
    {
        dev->advanceTo(clock);
    }
}

void BusEngine::writeTraceCsv(std::ostream& out) const
{
    out << "start_s,end_s,primitive,addr,cmd,payload_hex,status\n";
    char buf[64];
    for (const auto& e : entries)
    {
        std::snprintf(buf, sizeof(buf), "%.9f,%.9f,", toSeconds(e.start),
                      toSeconds(e.end));
        out << buf << toString(e.primitive) << ','
            << static_cast<int>(e.address) << ',';
        std::snprintf(buf, sizeof(buf), "0x%02X,",
                      static_cast<unsigned>(e.command));
        out << buf;
        for (uint8_t b : e.payload)
        {
            std::snprintf(buf, sizeof(buf), "%02X", b);
            out << buf;
        }
        out << ',' << toString(e.status) << '\n';
    }
}

}  // namespace voltune
