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
#include "voltune/sweep_harness.hpp"

#include "voltune/settling_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace voltune
{

BoardStack::BoardStack(const PlatformProfile& profile, ControlPath path,
                       ExpansionMode mode, BusConfig bus) :
    profileData(profile),
    engine(bus)
{
    for (const RegulatorSpec& spec : profileData.regulators)
    {
        auto device = std::make_shared<Ucd9248Device>(spec);
        devices.push_back(device);
        engine.attach(device);
    }
    controller =
        std::make_unique<PowerManager>(engine, profileData, path, mode);
}

Ucd9248Device& BoardStack::device(uint8_t address)
{
    for (const auto& device : devices)
    {
        if (device->address() == address)
        {
            return *device;
        }
    }
    throw std::out_of_range("no device at address " + std::to_string(address));
}

void BoardStack::presetLane(int lane, double volts)
{
    const LaneInfo& info = profileData.lane(lane);
    device(info.address).setRailVoltage(info.page, volts);
}

TransitionResult runTransition(const TransitionConfig& config,
                               const PlatformProfile& profile)
{
    size_t window = std::max<size_t>(config.settling.window, 1);
    if (config.maxSamples < window)
    {
        throw std::invalid_argument("sample budget smaller than the window");
    }

    BoardStack stack(profile, config.path, config.expansion, config.bus);
    stack.presetLane(config.lane, config.fromVolts);

    TransitionResult result;
    result.setStatus = stack.manager().submit(
        {Opcode::SetVoltage, config.lane, config.toVolts});
    if (result.setStatus.outcome != RequestOutcome::Completed)
    {
        throw std::runtime_error("voltage update failed: " +
                                 result.setStatus.detail);
    }

    // The readback converges to the set point after both the command and
    // the readback pass through the wire encoding.
    const LaneInfo& info = profile.lane(config.lane);
    const RailSpec& rail = profile.rail(info);
    int exponent = profile.voutExponent;
    double commanded =
        decodeLinear16(encodeLinear16(config.toVolts, exponent), exponent);
    double expected = decodeLinear16(
        encodeLinear16(dacTarget(commanded, rail), exponent), exponent);

    size_t onTarget = 0;
    while (result.trace.size() < config.maxSamples)
    {
        VoltageTrace one = stack.manager().sampleLoop(config.lane, 1);
        if (one.empty())
        {
            throw std::runtime_error("voltage readback failed mid-trace");
        }
        result.trace.push_back(one.front());
        onTarget =
            std::abs(one.front().volts - expected) <= 1e-9 ? onTarget + 1 : 0;
        if (onTarget >= window)
        {
            break;
        }
    }
    result.timedOut = onTarget < window;
    result.report = detectSettling(result.trace, config.settling);
    return result;
}

std::vector<IntervalMeasurement> runIntervalMatrix(
    const PlatformProfile& profile, int lane, size_t samples)
{
    if (samples < 1)
    {
        throw std::invalid_argument("need at least one interval");
    }
    struct Cell
    {
        ControlPath path;
        uint32_t sclHz;
    };
    const Cell cells[] = {{ControlPath::Hardware, 400000},
                          {ControlPath::Hardware, 100000},
                          {ControlPath::Software, 400000},
                          {ControlPath::Software, 100000}};

    std::vector<IntervalMeasurement> out;
    for (const Cell& cell : cells)
    {
        BoardStack stack(profile, cell.path, ExpansionMode::Minimal,
                         BusConfig{cell.sclHz});
        VoltageTrace trace = stack.manager().sampleLoop(lane, samples + 1);
        if (trace.size() != samples + 1)
        {
            throw std::runtime_error("sample loop aborted early");
        }
        double span = toSeconds(trace.back().time - trace.front().time);
        out.push_back({cell.path, cell.sclHz,
                       span / static_cast<double>(samples), samples});
    }
    return out;
}

namespace
{

double readbackOf(PowerManager& manager, int lane)
{
    RequestStatus status = manager.submit({Opcode::GetVoltage, lane, 0.0});
    if (status.outcome != RequestOutcome::Completed || !status.readbackVolts)
    {
        throw std::runtime_error("voltage readback failed: " + status.detail);
    }
    return *status.readbackVolts;
}

}  // namespace

SweepResult runCaseStudy(const CaseStudyConfig& config,
                         const PlatformProfile& profile,
                         const LinkCalibration& calibration)
{
    if (config.stepVolts <= 0.0)
    {
        throw std::invalid_argument("sweep step must be positive");
    }
    if (config.lowVolts > config.highVolts)
    {
        throw std::invalid_argument("sweep range is inverted");
    }
    if (config.lowVolts < 0.70 - 1e-9 || config.highVolts > 1.00 + 1e-9)
    {
        throw std::invalid_argument(
            "sweep range leaves the calibrated span [0.70, 1.00]");
    }
    const LaneInfo& info = profile.lane(config.lane);
    const RailSpec& rail = profile.rail(info);
    if (config.lowVolts < rail.voutMin || config.highVolts > rail.voutMax)
    {
        throw std::invalid_argument("sweep exceeds rail clamp limits of " +
                                    rail.name);
    }

    // Integer microvolt grid keeps the point list exact and gives every
    // point a stable seed salt.
    int64_t highUv = std::llround(config.highVolts * 1e6);
    int64_t lowUv = std::llround(config.lowVolts * 1e6);
    int64_t stepUv = std::llround(config.stepVolts * 1e6);
    if (stepUv < 1)
    {
        throw std::invalid_argument("sweep step below 1 uV");
    }

    BoardStack txBoard(profile, config.path, ExpansionMode::Prototype,
                       config.bus);
    BoardStack rxBoard(profile, config.path, ExpansionMode::Prototype,
                       config.bus);
    bool sweepTx = config.mode != SweepMode::RxOnly;
    bool sweepRx = config.mode != SweepMode::TxOnly;

    SweepResult result;
    result.config = config;
    result.calibrationName = calibration.name;
    result.payloadBytes = calibration.payloadBytes;

    double prevTx = rail.nominalVolts;
    double prevRx = rail.nominalVolts;
    bool first = true;
    for (int64_t uv = highUv; uv >= lowUv; uv -= stepUv)
    {
        double volts = static_cast<double>(uv) / 1e6;
        double rampSpan = 0.0;
        if (sweepTx)
        {
            RequestStatus status = txBoard.manager().submit(
                {Opcode::SetVoltage, config.lane, volts});
            if (status.outcome != RequestOutcome::Completed)
            {
                throw std::runtime_error("sweep update failed at " +
                                         std::to_string(volts) + " V: " +
                                         status.detail);
            }
            rampSpan = std::max(rampSpan, std::abs(prevTx - volts));
            prevTx = volts;
        }
        if (sweepRx)
        {
            RequestStatus status = rxBoard.manager().submit(
                {Opcode::SetVoltage, config.lane, volts});
            if (status.outcome != RequestOutcome::Completed)
            {
                throw std::runtime_error("sweep update failed at " +
                                         std::to_string(volts) + " V: " +
                                         status.detail);
            }
            rampSpan = std::max(rampSpan, std::abs(prevRx - volts));
            prevRx = volts;
        }
        if (first)
        {
            txBoard.manager().setExpansionMode(ExpansionMode::Minimal);
            rxBoard.manager().setExpansionMode(ExpansionMode::Minimal);
            first = false;
        }

        // Dwell past the response delay and the full slew, with margin
        // for the quantization of the end points.
        SimTime dwell =
            profile.dynamics.responseDelay +
            fromSeconds((rampSpan + 0.001) /
                        profile.dynamics.slewVoltsPerSecond) +
            100000;
        txBoard.bus().idle(dwell);
        rxBoard.bus().idle(dwell);

        double txVolts = readbackOf(txBoard.manager(), config.lane);
        double rxVolts = readbackOf(rxBoard.manager(), config.lane);
        double sweptVolts =
            config.mode == SweepMode::RxOnly ? rxVolts : txVolts;

        uint64_t pointSeed = mixSeed(config.seed, static_cast<uint64_t>(uv));
        SweepPoint point;
        point.voltage = volts;
        point.ber = calibration.berAt(sweptVolts, config.gbps, config.mode);
        point.receivedBytes = calibration.receivedBytes(
            sweptVolts, config.gbps, config.mode, pointSeed);
        point.latencySeconds = calibration.latencyAt(sweptVolts, config.gbps,
                                                     mixSeed(pointSeed, 1));
        point.txPowerWatts =
            calibration.powerAt(txVolts, config.gbps, LinkSide::Tx);
        point.rxPowerWatts =
            calibration.powerAt(rxVolts, config.gbps, LinkSide::Rx);
        result.points.push_back(point);
    }
    return result;
}

void writeSweepCsv(std::ostream& out, const std::vector<SweepPoint>& points)
{
    out << "voltage_v,ber,received_bytes,latency_s,tx_power_w,rx_power_w\n";
    char line[192];
    for (const SweepPoint& p : points)
    {
        std::snprintf(line, sizeof(line), "%.4f,%.12g,%llu,%.12g,%.12g,%.12g\n",
                      p.voltage, p.ber,
                      static_cast<unsigned long long>(p.receivedBytes),
                      p.latencySeconds, p.txPowerWatts, p.rxPowerWatts);
        out << line;
    }
}

std::vector<SweepPoint> readSweepCsv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("voltage_v,", 0) != 0)
    {
        throw std::runtime_error("not a sweep CSV: missing header");
    }
    std::vector<SweepPoint> points;
    size_t lineNo = 1;
    while (std::getline(in, line))
    {
        ++lineNo;
        if (line.empty())
        {
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ','))
        {
            fields.push_back(field);
        }
        if (fields.size() != 6)
        {
            throw std::runtime_error("sweep CSV line " +
                                     std::to_string(lineNo) +
                                     ": expected 6 fields");
        }
        try
        {
            SweepPoint p;
            p.voltage = std::stod(fields[0]);
            p.ber = std::stod(fields[1]);
            p.receivedBytes = std::stoull(fields[2]);
            p.latencySeconds = std::stod(fields[3]);
            p.txPowerWatts = std::stod(fields[4]);
            p.rxPowerWatts = std::stod(fields[5]);
            points.push_back(p);
        }
        catch (const std::exception&)
        {
            throw std::runtime_error("sweep CSV line " +
                                     std::to_string(lineNo) + ": bad number");
        }
    }
    return points;
}

void writeSweepMetadata(std::ostream& out, const SweepResult& result)
{
    const CaseStudyConfig& cfg = result.config;
    char buf[128];
    out << "run = case-study\n";
    out << "calibration = " << result.calibrationName << "\n";
    std::snprintf(buf, sizeof(buf), "speed_gbps = %g\n", cfg.gbps);
    out << buf;
    out << "mode = " << toString(cfg.mode) << "\n";
    out << "seed = " << cfg.seed << "\n";
    std::snprintf(buf, sizeof(buf), "range_v = %.4f -> %.4f\n", cfg.highVolts,
                  cfg.lowVolts);
    out << buf;
    std::snprintf(buf, sizeof(buf), "step_v = %.4f\n", cfg.stepVolts);
    out << buf;
    out << "payload_bytes = " << result.payloadBytes << "\n";
    out << "lane = " << cfg.lane << "\n";
    out << "control_path = " << toString(cfg.path) << "\n";
    out << "scl_hz = " << cfg.bus.sclHz << "\n";
    out << "points = " << result.points.size() << "\n";
    out << "update_policy = first point runs the full protective sequence, "
           "later points write only the set point\n";
    out << "dwell_policy = response delay plus full slew plus 0.1 ms\n";
}

SavingsSummary savingsReport(const std::vector<SweepPoint>& points,
                             LinkSide side,
                             const std::vector<double>& thresholds)
{
    if (points.empty())
    {
        throw std::invalid_argument("empty sweep");
    }
    auto powerOf = [side](const SweepPoint& p) {
        return side == LinkSide::Tx ? p.txPowerWatts : p.rxPowerWatts;
    };
    const SweepPoint* baseline = &points.front();
    for (const SweepPoint& p : points)
    {
        if (p.voltage > baseline->voltage)
        {
            baseline = &p;
        }
    }
    if (powerOf(*baseline) <= 0.0)
    {
        throw std::invalid_argument("baseline power is zero");
    }

    SavingsSummary summary;
    summary.side = side;
    summary.baselineVolts = baseline->voltage;
    summary.baselinePowerWatts = powerOf(*baseline);

    auto lowestWhere = [&](auto&& admissible) {
        const SweepPoint* best = nullptr;
        for (const SweepPoint& p : points)
        {
            if (admissible(p) && (!best || p.voltage < best->voltage))
            {
                best = &p;
            }
        }
        return best;
    };
    auto makeRow = [&](double threshold, const SweepPoint& p) {
        SavingsRow row;
        row.thresholdBer = threshold;
        row.voltageVolts = p.voltage;
        row.powerWatts = powerOf(p);
        row.savingPercent =
            (1.0 - powerOf(p) / summary.baselinePowerWatts) * 100.0;
        return row;
    };

    const SweepPoint* boundary =
        lowestWhere([](const SweepPoint& p) { return p.ber == 0.0; });
    if (boundary == nullptr)
    {
        // Errors everywhere: the strict boundary degenerates to the
        // baseline point itself.
        boundary = baseline;
    }
    summary.rows.push_back(makeRow(0.0, *boundary));

    std::vector<double> sorted = thresholds;
    std::sort(sorted.begin(), sorted.end());
    for (double threshold : sorted)
    {
        const SweepPoint* best = lowestWhere(
            [threshold](const SweepPoint& p) { return p.ber <= threshold; });
        summary.rows.push_back(makeRow(threshold, best ? *best : *baseline));
    }
    return summary;
}

void writeSavingsText(std::ostream& out, const SavingsSummary& summary)
{
    char buf[160];
    out << "side = " << toString(summary.side) << "\n";
    std::snprintf(buf, sizeof(buf), "baseline = %.4f V, %.9g W\n",
                  summary.baselineVolts, summary.baselinePowerWatts);
    out << buf;
    for (const SavingsRow& row : summary.rows)
    {
        if (row.thresholdBer == 0.0)
        {
            std::snprintf(buf, sizeof(buf),
                          "zero-error boundary: %.4f V, %.9g W, saving %.3f %%\n",
                          row.voltageVolts, row.powerWatts,
                          row.savingPercent);
        }
        else
        {
            std::snprintf(buf, sizeof(buf),
                          "ber <= %g: %.4f V, %.9g W, saving %.3f %%\n",
                          row.thresholdBer, row.voltageVolts, row.powerWatts,
                          row.savingPercent);
        }
        out << buf;
    }
}

}  // namespace voltune
