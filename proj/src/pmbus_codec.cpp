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
#include "voltune/pmbus_codec.hpp"

#include <cmath>
#include <limits>

namespace voltune
{

namespace
{

const std::vector<CommandInfo> kCommands{
    {Command::Page, "PAGE", TransferKind::Byte, true, true},
    {Command::ClearFaults, "CLEAR_FAULTS", TransferKind::SendByte, true, false},
    {Command::VoutCommand, "VOUT_COMMAND", TransferKind::Word, true, true},
    {Command::VoutUvWarnLimit, "VOUT_UV_WARN_LIMIT", TransferKind::Word, true,
     true},
    {Command::VoutUvFaultLimit, "VOUT_UV_FAULT_LIMIT", TransferKind::Word, true,
     true},
    {Command::PowerGoodOn, "POWER_GOOD_ON", TransferKind::Word, true, true},
    {Command::PowerGoodOff, "POWER_GOOD_OFF", TransferKind::Word, true, true},
    {Command::ReadVout, "READ_VOUT", TransferKind::ReadWord, false, true},
    {Command::ReadIout, "READ_IOUT", TransferKind::ReadWord, false, true},
};

int64_t roundHalfAway(double x)
{
    return static_cast<int64_t>(std::floor(x + 0.5));
}

bool primitiveMatchesCommand(Primitive p, const CommandInfo& info)
{
    switch (p)
    {
        case Primitive::SendByte:
            return info.kind == TransferKind::SendByte && info.writable;
        case Primitive::WriteByte:
            return info.kind == TransferKind::Byte && info.writable;
        case Primitive::WriteWord:
            return info.kind == TransferKind::Word && info.writable;
        case Primitive::ReadByte:
            return info.kind == TransferKind::Byte && info.readable;
        case Primitive::ReadWord:
            return (info.kind == TransferKind::Word ||
                    info.kind == TransferKind::ReadWord) &&
                   info.readable;
    }
    return false;
}

size_t payloadLength(Primitive p)
{
    switch (p)
    {
        case Primitive::SendByte:
            return 0;
        case Primitive::WriteByte:
        case Primitive::ReadByte:
            return 1;
        case Primitive::WriteWord:
        case Primitive::ReadWord:
            return 2;
    }
    return 0;
}

bool isRead(Primitive p)
{
    return p == Primitive::ReadByte || p == Primitive::ReadWord;
}

}  // namespace

const CommandInfo& commandInfo(Command cmd)
{
    for (const auto& info : kCommands)
    {
        if (info.command == cmd)
        {
            return info;
        }
    }
    throw std::invalid_argument("unknown PMBus command code");
}

const CommandInfo& commandInfo(uint8_t code)
{
    return commandInfo(static_cast<Command>(code));
}

const std::vector<CommandInfo>& commandTable()
{
    return kCommands;
}

uint16_t encodeLinear16(double volts, int exponent)
{
    if (volts < 0.0 || !std::isfinite(volts))
    {
        throw std::out_of_range("LINEAR16 cannot represent negative voltage");
    }
    int64_t mantissa = roundHalfAway(volts * std::pow(2.0, -exponent));
    if (mantissa > std::numeric_limits<uint16_t>::max())
    {
        throw std::out_of_range("LINEAR16 mantissa overflow");
    }
    return static_cast<uint16_t>(mantissa);
}

double decodeLinear16(uint16_t raw, int exponent)
{
    return static_cast<double>(raw) * std::pow(2.0, exponent);
}

uint16_t encodeLinear11(double value)
{
    if (!std::isfinite(value))
    {
        throw std::out_of_range("LINEAR11 cannot represent non-finite value");
    }
    if (value == 0.0)
    {
        return 0;
    }
    bool found = false;
    int bestExp = 0;
    int64_t bestMantissa = 0;
    double bestError = 0.0;
    for (int exp = -16; exp <= 15; ++exp)
    {
        double scale = std::pow(2.0, exp);
        int64_t mantissa = roundHalfAway(value / scale);
        if (mantissa < -1024 || mantissa > 1023)
        {
            continue;
        }
        double error = std::fabs(static_cast<double>(mantissa) * scale - value);
        if (!found || error < bestError)
        {
            found = true;
            bestError = error;
            bestExp = exp;
            bestMantissa = mantissa;
        }
    }
    if (!found)
    {
        throw std::out_of_range("LINEAR11 exponent range exhausted");
    }
    return static_cast<uint16_t>(((bestExp & 0x1F) << 11) |
                                 (bestMantissa & 0x7FF));
}

double decodeLinear11(uint16_t raw)
{
    int exponent = (raw >> 11) & 0x1F;
    if (exponent > 0x0F)
    {
        exponent -= 32;
    }
    int mantissa = raw & 0x7FF;
    if (mantissa > 0x3FF)
    {
        mantissa -= 2048;
    }
    return static_cast<double>(mantissa) * std::pow(2.0, exponent);
}

Transaction makeSendByte(uint8_t address, Command cmd)
{
    return Transaction{Primitive::SendByte, address, cmd, {}};
}

Transaction makeWriteByte(uint8_t address, Command cmd, uint8_t value)
{
    return Transaction{Primitive::WriteByte, address, cmd, {value}};
}

Transaction makeWriteWord(uint8_t address, Command cmd, uint16_t value)
{
    return Transaction{Primitive::WriteWord, address, cmd,
                       {static_cast<uint8_t>(value & 0xFF),
                        static_cast<uint8_t>(value >> 8)}};
}

Transaction makeReadByte(uint8_t address, Command cmd)
{
    return Transaction{Primitive::ReadByte, address, cmd, {}};
}

Transaction makeReadWord(uint8_t address, Command cmd)
{
    return Transaction{Primitive::ReadWord, address, cmd, {}};
}

int dataByteCount(Primitive p)
{
    switch (p)
    {
        case Primitive::SendByte:
            return 2;  // address + command
        case Primitive::WriteByte:
            return 3;
        case Primitive::WriteWord:
            return 4;
        case Primitive::ReadByte:
            return 4;  // address, command, read address, data
        case Primitive::ReadWord:
            return 5;
    }
    return 0;
}

int controlEventCount(Primitive p)
{
    return isRead(p) ? 3 : 2;  // reads add a RepeatedStart
}

WireFrame frame(const Transaction& txn)
{
    const CommandInfo& info = commandInfo(txn.command);
    if (!primitiveMatchesCommand(txn.primitive, info))
    {
        throw std::invalid_argument(std::string("command ") + info.name +
                                    " does not support this primitive");
    }
    size_t expected = isRead(txn.primitive) ? 0 : payloadLength(txn.primitive);
    if (txn.payload.size() != expected)
    {
        throw std::invalid_argument("payload length does not fit primitive");
    }
    if (txn.address > 0x7F)
    {
        throw std::invalid_argument("address exceeds 7 bits");
    }

    WireFrame events;
    auto byteEvent = [&](uint8_t value, bool fromDevice, bool ack) {
        events.push_back(FrameEvent{EventKind::Byte, value, fromDevice, ack});
    };

    events.push_back(FrameEvent{EventKind::Start, 0, false, false});
    byteEvent(static_cast<uint8_t>(txn.address << 1), false, true);
    byteEvent(static_cast<uint8_t>(txn.command), false, true);
    for (uint8_t b : txn.payload)
    {
        byteEvent(b, false, true);
    }
    if (isRead(txn.primitive))
    {
        events.push_back(FrameEvent{EventKind::RepeatedStart, 0, false, false});
        byteEvent(static_cast<uint8_t>((txn.address << 1) | 1), false, true);
        size_t n = payloadLength(txn.primitive);
        for (size_t i = 0; i < n; ++i)
        {
            // Master ACKs all read bytes except the last.
            byteEvent(0, true, i + 1 < n);
        }
    }
    events.push_back(FrameEvent{EventKind::Stop, 0, false, false});
    return events;
}

namespace
{

class FrameReader
{
  public:
    explicit FrameReader(const WireFrame& events) : events(events) {}

    const FrameEvent& expect(EventKind kind, const char* what)
    {
        if (pos >= events.size())
        {
            throw ParseError(pos, std::string("frame truncated, expected ") +
                                      what);
        }
        const FrameEvent& ev = events[pos];
        if (ev.kind != kind)
        {
            throw ParseError(pos, std::string("expected ") + what);
        }
        ++pos;
        return ev;
    }

    uint8_t expectByte(const char* what)
    {
        return expect(EventKind::Byte, what).value;
    }

    bool atEnd() const
    {
        return pos == events.size();
    }

    size_t position() const
    {
        return pos;
    }

  private:
    const WireFrame& events;
    size_t pos = 0;
};

}  // namespace

Transaction parse(const WireFrame& events)
{
    FrameReader reader(events);
    reader.expect(EventKind::Start, "Start");
    uint8_t addressByte = reader.expectByte("address byte");
    uint8_t address = addressByte >> 1;
    if (addressByte & 1)
    {
        throw ParseError(reader.position() - 1,
                         "first address byte must select write");
    }
    uint8_t code = reader.expectByte("command byte");
    const CommandInfo* info = nullptr;
    try
    {
        info = &commandInfo(code);
    }
    catch (const std::invalid_argument&)
    {
        throw ParseError(reader.position() - 1, "unknown command code");
    }

    // Collect write payload bytes until a control event.
    std::vector<uint8_t> payload;
    bool repeatedStart = false;
    while (true)
    {
        if (reader.atEnd())
        {
            throw ParseError(reader.position(), "frame truncated before Stop");
        }
        const FrameEvent& ev = events[reader.position()];
        if (ev.kind == EventKind::Byte)
        {
            payload.push_back(reader.expectByte("payload byte"));
            continue;
        }
        if (ev.kind == EventKind::RepeatedStart)
        {
            reader.expect(EventKind::RepeatedStart, "RepeatedStart");
            repeatedStart = true;
        }
        break;
    }

    Transaction txn;
    txn.address = address;
    txn.command = info->command;
    if (repeatedStart)
    {
        if (!payload.empty())
        {
            throw ParseError(reader.position() - 1,
                             "read frame carries write payload");
        }
        uint8_t readAddress = reader.expectByte("read address byte");
        if ((readAddress >> 1) != address || !(readAddress & 1))
        {
            throw ParseError(reader.position() - 1,
                             "read address does not match write phase");
        }
        std::vector<uint8_t> data;
        while (!reader.atEnd() &&
               events[reader.position()].kind == EventKind::Byte)
        {
            data.push_back(reader.expectByte("read data byte"));
        }
        if (data.size() == 1)
        {
            txn.primitive = Primitive::ReadByte;
        }
        else if (data.size() == 2)
        {
            txn.primitive = Primitive::ReadWord;
        }
        else
        {
            throw ParseError(reader.position(), "read data length not 1 or 2");
        }
    }
    else
    {
        switch (payload.size())
        {
            case 0:
                txn.primitive = Primitive::SendByte;
                break;
            case 1:
                txn.primitive = Primitive::WriteByte;
                break;
            case 2:
                txn.primitive = Primitive::WriteWord;
                break;
            default:
                throw ParseError(reader.position(),
                                 "write payload length not 0, 1, or 2");
        }
        txn.payload = std::move(payload);
    }

    reader.expect(EventKind::Stop, "Stop");
    if (!reader.atEnd())
    {
        throw ParseError(reader.position(), "trailing events after Stop");
    }
    if (!primitiveMatchesCommand(txn.primitive, *info))
    {
        throw ParseError(0, std::string("command ") + info->name +
                                " does not support this primitive");
    }
    return txn;
}

}  // namespace voltune
