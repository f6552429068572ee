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
#include "voltune/link_models.hpp"

#include "voltune/config_text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace voltune
{

namespace
{

constexpr double kDomainLow = 0.70;
constexpr double kDomainHigh = 1.00;
// Set points quantize to the LINEAR16 grid (1/4096 V); accept queries
// that land just outside the calibrated range because of it.
constexpr double kDomainGrace = 0.002;

double clampDomain(double volts)
{
    if (volts < kDomainLow - kDomainGrace || volts > kDomainHigh + kDomainGrace)
    {
        throw std::domain_error("voltage " + std::to_string(volts) +
                                " outside calibrated range [0.70, 1.00]");
    }
    return std::clamp(volts, kDomainLow, kDomainHigh);
}

/** Deterministic uniform in [0, 1) from a 64-bit state step. */
class SplitMix
{
  public:
    explicit SplitMix(uint64_t seed) : state(seed) {}

    uint64_t next()
    {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform()
    {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

  private:
    uint64_t state;
};

void validateBer(const BerEntry& entry)
{
    if (entry.anchors.empty())
    {
        throw std::invalid_argument("BER entry needs anchors");
    }
    if (entry.onsetVolts < entry.anchors.front().first)
    {
        throw std::invalid_argument("BER onset below first anchor");
    }
    for (size_t i = 1; i < entry.anchors.size(); ++i)
    {
        if (entry.anchors[i].first >= entry.anchors[i - 1].first)
        {
            throw std::invalid_argument("BER anchors not descending in volts");
        }
        if (entry.anchors[i].second < entry.anchors[i - 1].second)
        {
            throw std::invalid_argument(
                "BER must not fall as voltage drops");
        }
    }
}

void validatePower(const PowerEntry& entry)
{
    if (entry.anchors.size() < 2)
    {
        throw std::invalid_argument("power entry needs two anchors");
    }
    for (size_t i = 1; i < entry.anchors.size(); ++i)
    {
        if (entry.anchors[i].first <= entry.anchors[i - 1].first ||
            entry.anchors[i].second <= entry.anchors[i - 1].second)
        {
            throw std::invalid_argument(
                "power anchors must increase in volts and watts");
        }
    }
}

}  // namespace

const char* toString(SweepMode mode)
{
    switch (mode)
    {
        case SweepMode::Both:
            return "both";
        case SweepMode::TxOnly:
            return "tx";
        case SweepMode::RxOnly:
            return "rx";
    }
    return "?";
}

const char* toString(LinkSide side)
{
    return side == LinkSide::Tx ? "tx" : "rx";
}

SweepMode sweepModeFromString(const std::string& name)
{
    if (name == "both")
    {
        return SweepMode::Both;
    }
    if (name == "tx")
    {
        return SweepMode::TxOnly;
    }
    if (name == "rx")
    {
        return SweepMode::RxOnly;
    }
    throw std::invalid_argument("unknown sweep mode: " + name);
}

uint64_t mixSeed(uint64_t seed, uint64_t salt)
{
    SplitMix mix(seed ^ (salt * 0xD6E8FEB86659FD93ULL));
    return mix.next();
}

const BerEntry& LinkCalibration::ber(double gbps, SweepMode mode) const
{
    for (const auto& [key, entry] : berTable)
    {
        if (key.gbps == gbps && key.mode == mode)
        {
            return entry;
        }
    }
    throw std::out_of_range("no BER calibration for " + std::to_string(gbps) +
                            " Gbps, mode " + toString(mode));
}

const CollapseEntry& LinkCalibration::collapse(double gbps,
                                               SweepMode mode) const
{
    for (const auto& [key, entry] : collapseTable)
    {
        if (key.gbps == gbps && key.mode == mode)
        {
            return entry;
        }
    }
    throw std::out_of_range("no collapse calibration for " +
                            std::to_string(gbps) + " Gbps, mode " +
                            toString(mode));
}

const PowerEntry& LinkCalibration::power(double gbps, LinkSide side) const
{
    for (const auto& [key, entry] : powerTable)
    {
        if (key.gbps == gbps && key.side == side)
        {
            return entry;
        }
    }
    throw std::out_of_range("no power calibration for " +
                            std::to_string(gbps) + " Gbps, side " +
                            toString(side));
}

const LatencyEntry& LinkCalibration::latency(double gbps) const
{
    for (const auto& [key, entry] : latencyTable)
    {
        if (key == gbps)
        {
            return entry;
        }
    }
    throw std::out_of_range("no latency calibration for " +
                            std::to_string(gbps) + " Gbps");
}

bool LinkCalibration::hasMode(double gbps, SweepMode mode) const
{
    for (const auto& [key, entry] : berTable)
    {
        if (key.gbps == gbps && key.mode == mode)
        {
            return true;
        }
    }
    return false;
}

std::vector<double> LinkCalibration::speeds() const
{
    std::vector<double> out;
    for (const auto& [key, entry] : berTable)
    {
        if (key.mode == SweepMode::Both)
        {
            out.push_back(key.gbps);
        }
    }
    std::sort(out.rbegin(), out.rend());
    return out;
}

double LinkCalibration::berAt(double volts, double gbps, SweepMode mode) const
{
    const BerEntry& entry = ber(gbps, mode);
    double v = clampDomain(volts);
    if (v >= entry.onsetVolts)
    {
        // Error-free in the measured payload; modeled as exactly zero.
        return 0.0;
    }
    const auto& anchors = entry.anchors;
    double logBer;
    if (v >= anchors.front().first)
    {
        logBer = anchors.front().second;
    }
    else if (v <= anchors.back().first)
    {
        logBer = anchors.back().second;
    }
    else
    {
        logBer = anchors.back().second;
        for (size_t i = 1; i < anchors.size(); ++i)
        {
            if (v >= anchors[i].first)
            {
                double v1 = anchors[i - 1].first;
                double l1 = anchors[i - 1].second;
                double v2 = anchors[i].first;
                double l2 = anchors[i].second;
                logBer = l2 + (v - v2) / (v1 - v2) * (l1 - l2);
                break;
            }
        }
    }
    return std::min(std::pow(10.0, logBer), 0.5);
}

uint64_t LinkCalibration::receivedBytes(double volts, double gbps,
                                        SweepMode mode, uint64_t seed) const
{
    const CollapseEntry& entry = collapse(gbps, mode);
    double v = clampDomain(volts);
    if (!entry.collapseVolts || v >= *entry.collapseVolts)
    {
        return payloadBytes;
    }
    // Sharp drop at the collapse point, decaying toward zero at the low
    // end of the range, with per-point jitter.
    double span = *entry.collapseVolts - kDomainLow;
    double shape = span > 0.0 ? (v - kDomainLow) / span : 0.0;
    double envelope = 0.75 * shape * shape * shape;
    SplitMix rng(seed);
    double jitter = 0.6 + 0.4 * rng.uniform();
    double fraction = std::clamp(envelope * jitter, 0.0, 1.0);
    uint64_t bytes = static_cast<uint64_t>(
        std::llround(fraction * static_cast<double>(payloadBytes)));
    return std::min(bytes, payloadBytes);
}

double LinkCalibration::powerAt(double volts, double gbps, LinkSide side) const
{
    const PowerEntry& entry = power(gbps, side);
    double v = clampDomain(volts);
    const auto& anchors = entry.anchors;
    if (v <= anchors.front().first)
    {
        return anchors.front().second;
    }
    if (v >= anchors.back().first)
    {
        return anchors.back().second;
    }
    for (size_t i = 1; i < anchors.size(); ++i)
    {
        if (v <= anchors[i].first)
        {
            double v1 = anchors[i - 1].first;
            double p1 = anchors[i - 1].second;
            double v2 = anchors[i].first;
            double p2 = anchors[i].second;
            return p1 + (v - v1) / (v2 - v1) * (p2 - p1);
        }
    }
    return anchors.back().second;
}

double LinkCalibration::latencyAt(double volts, double gbps,
                                  uint64_t seed) const
{
    const LatencyEntry& entry = latency(gbps);
    double v = clampDomain(volts);
    if (v >= entry.excursionOnsetVolts)
    {
        return entry.baselineSeconds;
    }
    SplitMix rng(seed);
    double roll = rng.uniform();
    double u = rng.uniform();
    if (roll >= entry.excursionProbability)
    {
        return entry.baselineSeconds;
    }
    double mean = entry.excursionMeanFactor * entry.baselineSeconds;
    double spike = -mean * std::log1p(-u);
    return entry.baselineSeconds + spike;
}

void LinkCalibration::addBer(double gbps, SweepMode mode, BerEntry entry)
{
    validateBer(entry);
    berTable.push_back({ModeKey{gbps, mode}, std::move(entry)});
}

void LinkCalibration::addCollapse(double gbps, SweepMode mode,
                                  CollapseEntry entry)
{
    if (entry.collapseVolts &&
        (*entry.collapseVolts < kDomainLow || *entry.collapseVolts > kDomainHigh))
    {
        throw std::invalid_argument("collapse voltage outside range");
    }
    collapseTable.push_back({ModeKey{gbps, mode}, entry});
}

void LinkCalibration::addPower(double gbps, LinkSide side, PowerEntry entry)
{
    validatePower(entry);
    powerTable.push_back({SideKey{gbps, side}, std::move(entry)});
}

void LinkCalibration::addLatency(double gbps, LatencyEntry entry)
{
    if (entry.baselineSeconds <= 0.0 || entry.excursionProbability < 0.0 ||
        entry.excursionProbability > 1.0 || entry.excursionMeanFactor < 0.0)
    {
        throw std::invalid_argument("bad latency entry");
    }
    latencyTable.push_back({gbps, entry});
}

LinkCalibration LinkCalibration::kc705GtxMeasured()
{
    // Mirrors data/kc705-gtx-measured.cal; the file documents what each
    // number means and a test keeps the two in sync.
    LinkCalibration cal;
    cal.name = "kc705-gtx-measured";
    cal.payloadBytes = 10000000000ULL;

    auto berEntry = [](double onset,
                       std::vector<std::pair<double, double>> anchors) {
        BerEntry entry;
        entry.onsetVolts = onset;
        entry.anchors = std::move(anchors);
        return entry;
    };

    cal.addBer(10.0, SweepMode::Both,
               berEntry(0.8685, {{0.8685, -10.0},
                                 {0.868, -9.0},
                                 {0.866, -7.0},
                                 {0.864, -6.0},
                                 {0.80, -3.0},
                                 {0.70, -0.5}}));
    cal.addBer(10.0, SweepMode::RxOnly,
               berEntry(0.8685, {{0.8685, -10.0},
                                 {0.868, -9.0},
                                 {0.866, -7.0},
                                 {0.864, -6.0},
                                 {0.80, -3.0},
                                 {0.70, -0.5}}));
    cal.addBer(10.0, SweepMode::TxOnly,
               berEntry(0.8195, {{0.8195, -10.0},
                                 {0.819, -9.0},
                                 {0.817, -7.0},
                                 {0.815, -6.0},
                                 {0.75, -3.0},
                                 {0.70, -1.0}}));
    cal.addBer(7.5, SweepMode::Both,
               berEntry(0.7865, {{0.7865, -10.0},
                                 {0.786, -9.0},
                                 {0.784, -7.0},
                                 {0.782, -6.0},
                                 {0.70, -2.0}}));
    cal.addBer(5.0, SweepMode::Both,
               berEntry(0.7445, {{0.7445, -10.0},
                                 {0.744, -9.0},
                                 {0.742, -7.0},
                                 {0.740, -6.0},
                                 {0.72, -3.0},
                                 {0.70, -1.0}}));
    cal.addBer(2.5, SweepMode::Both,
               berEntry(0.7435, {{0.7435, -10.0},
                                 {0.743, -9.0},
                                 {0.741, -7.0},
                                 {0.739, -6.0},
                                 {0.70, -3.0}}));

    cal.addCollapse(10.0, SweepMode::Both, CollapseEntry{0.80});
    cal.addCollapse(10.0, SweepMode::RxOnly, CollapseEntry{0.81});
    cal.addCollapse(10.0, SweepMode::TxOnly, CollapseEntry{std::nullopt});
    cal.addCollapse(7.5, SweepMode::Both, CollapseEntry{std::nullopt});
    cal.addCollapse(5.0, SweepMode::Both, CollapseEntry{0.72});
    cal.addCollapse(2.5, SweepMode::Both, CollapseEntry{std::nullopt});

    auto powerEntry = [](std::vector<std::pair<double, double>> anchors) {
        PowerEntry entry;
        entry.anchors = std::move(anchors);
        return entry;
    };
    cal.addPower(10.0, LinkSide::Tx, powerEntry({{0.70, 0.08},
                                                 {0.80, 0.13},
                                                 {0.864, 0.1414},
                                                 {0.869, 0.1432},
                                                 {1.00, 0.20}}));
    cal.addPower(10.0, LinkSide::Rx,
                 powerEntry({{0.70, 0.075}, {0.80, 0.11}, {1.00, 0.17}}));
    cal.addPower(7.5, LinkSide::Tx,
                 powerEntry({{0.70, 0.075}, {0.80, 0.12}, {1.00, 0.18}}));
    cal.addPower(7.5, LinkSide::Rx,
                 powerEntry({{0.70, 0.065}, {0.80, 0.10}, {1.00, 0.155}}));
    cal.addPower(5.0, LinkSide::Tx,
                 powerEntry({{0.70, 0.06}, {0.80, 0.09}, {1.00, 0.14}}));
    cal.addPower(5.0, LinkSide::Rx,
                 powerEntry({{0.70, 0.055}, {0.80, 0.08}, {1.00, 0.12}}));
    cal.addPower(2.5, LinkSide::Tx,
                 powerEntry({{0.70, 0.055}, {0.80, 0.08}, {1.00, 0.12}}));
    cal.addPower(2.5, LinkSide::Rx,
                 powerEntry({{0.70, 0.05}, {0.80, 0.07}, {1.00, 0.10}}));

    cal.addLatency(10.0, LatencyEntry{100e-9, 0.86, 0.6, 30.0});
    cal.addLatency(7.5, LatencyEntry{130e-9, 0.76, 0.6, 30.0});
    cal.addLatency(5.0, LatencyEntry{200e-9, 0.745, 0.6, 30.0});
    cal.addLatency(2.5, LatencyEntry{410e-9, 0.73, 0.6, 30.0});
    return cal;
}

namespace
{

std::vector<std::pair<double, double>> parseAnchorList(
    const ConfigSection& section, const std::string& key)
{
    // "v:y, v:y, ..." pairs.
    std::vector<std::pair<double, double>> anchors;
    std::istringstream in(section.get(key));
    std::string item;
    while (std::getline(in, item, ','))
    {
        size_t colon = item.find(':');
        if (colon == std::string::npos)
        {
            throw ConfigError(section.line,
                              "anchor '" + item + "' is not volts:value");
        }
        try
        {
            anchors.emplace_back(std::stod(item.substr(0, colon)),
                                 std::stod(item.substr(colon + 1)));
        }
        catch (const std::exception&)
        {
            throw ConfigError(section.line, "bad anchor number in: " + item);
        }
    }
    if (anchors.empty())
    {
        throw ConfigError(section.line, "empty anchor list for " + key);
    }
    return anchors;
}

struct SectionHead
{
    double gbps;
    std::string tail;
};

SectionHead splitSpeed(const ConfigSection& section, size_t prefixLen)
{
    std::istringstream in(section.name.substr(prefixLen));
    SectionHead head{};
    if (!(in >> head.gbps))
    {
        throw ConfigError(section.line, "section needs a speed: [" +
                                            section.name + "]");
    }
    in >> head.tail;
    return head;
}

}  // namespace

LinkCalibration LinkCalibration::load(std::istream& in)
{
    ConfigDoc doc = parseConfig(in);
    LinkCalibration cal;
    const ConfigSection& header = doc.require("calibration");
    cal.name = header.get("name");
    cal.payloadBytes =
        static_cast<uint64_t>(header.getInt("payload_bytes", 10000000000LL));

    for (const ConfigSection* section : doc.withPrefix("link "))
    {
        SectionHead head = splitSpeed(*section, 5);
        SweepMode mode = sweepModeFromString(head.tail);
        BerEntry ber;
        ber.onsetVolts = section->getDouble("ber_onset_v");
        ber.anchors = parseAnchorList(*section, "ber_anchors_v_log10");
        cal.addBer(head.gbps, mode, std::move(ber));
        CollapseEntry collapse;
        if (section->has("collapse_v"))
        {
            collapse.collapseVolts = section->getDouble("collapse_v");
        }
        cal.addCollapse(head.gbps, mode, collapse);
    }
    for (const ConfigSection* section : doc.withPrefix("power "))
    {
        SectionHead head = splitSpeed(*section, 6);
        LinkSide side = head.tail == "tx" ? LinkSide::Tx : LinkSide::Rx;
        if (head.tail != "tx" && head.tail != "rx")
        {
            throw ConfigError(section->line, "power side must be tx or rx");
        }
        PowerEntry entry;
        entry.anchors = parseAnchorList(*section, "anchors_v_w");
        cal.addPower(head.gbps, side, std::move(entry));
    }
    for (const ConfigSection* section : doc.withPrefix("latency "))
    {
        SectionHead head = splitSpeed(*section, 8);
        LatencyEntry entry;
        entry.baselineSeconds = section->getDouble("baseline_s");
        entry.excursionOnsetVolts = section->getDouble("excursion_onset_v");
        entry.excursionProbability =
            section->getDouble("excursion_probability", 0.6);
        entry.excursionMeanFactor =
            section->getDouble("excursion_mean_factor", 30.0);
        cal.addLatency(head.gbps, entry);
    }
    return cal;
}

LinkCalibration LinkCalibration::loadFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open calibration: " + path);
    }
    return load(in);
}

}  // namespace voltune
