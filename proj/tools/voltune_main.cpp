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
#include "voltune/config_text.hpp"
#include "voltune/sweep_harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace
{

using namespace voltune;

struct GlobalOptions
{
    std::string profilePath;
    std::string calibrationPath;
    uint64_t seed = 1;
    std::string outDir = ".";
};

PlatformProfile resolveProfile(const GlobalOptions& global)
{
    if (global.profilePath.empty())
    {
        return kc705Profile();
    }
    return loadProfileFile(global.profilePath);
}

LinkCalibration resolveCalibration(const GlobalOptions& global)
{
    if (global.calibrationPath.empty())
    {
        return LinkCalibration::kc705GtxMeasured();
    }
    return LinkCalibration::loadFile(global.calibrationPath);
}

std::filesystem::path outputPath(const GlobalOptions& global,
                                 const std::string& name)
{
    std::filesystem::path dir(global.outDir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::ofstream openOutput(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

ControlPath parsePath(const std::string& name)
{
    return name == "software" ? ControlPath::Software : ControlPath::Hardware;
}

struct TransitionOptions
{
    int lane = 0;
    double fromVolts = 1.0;
    double toVolts = 0.5;
    std::string path = "hardware";
    uint32_t sclHz = 400000;
    std::string expansion = "prototype";
    size_t window = 5;
    double bandPercent = 1.0;
    size_t maxSamples = 200;
};

void cmdTransition(const GlobalOptions& global, const TransitionOptions& opt)
{
    PlatformProfile profile = resolveProfile(global);
    TransitionConfig config;
    config.lane = opt.lane;
    config.fromVolts = opt.fromVolts;
    config.toVolts = opt.toVolts;
    config.path = parsePath(opt.path);
    config.bus.sclHz = opt.sclHz;
    config.expansion = opt.expansion == "minimal" ? ExpansionMode::Minimal
                                                  : ExpansionMode::Prototype;
    config.settling.window = opt.window;
    config.settling.bandPercent = opt.bandPercent;
    config.maxSamples = opt.maxSamples;

    TransitionResult result = runTransition(config, profile);

    auto tracePath = outputPath(global, "transition-trace.csv");
    auto traceOut = openOutput(tracePath);
    writeTraceCsv(traceOut, result.trace);

    const LaneInfo& info = profile.lane(opt.lane);
    std::printf("lane            = %d (%s)\n", opt.lane,
                info.railName.c_str());
    std::printf("step            = %.4f V -> %.4f V\n", opt.fromVolts,
                opt.toVolts);
    std::printf("control path    = %s, scl %u Hz\n", opt.path.c_str(),
                opt.sclHz);
    std::printf("expansion       = %s (%zu transactions)\n",
                opt.expansion.c_str(), result.setStatus.transactionCount);
    std::printf("window          = %zu samples, band +/- %.3f %%\n",
                opt.window, opt.bandPercent);
    std::printf("samples         = %zu%s\n", result.trace.size(),
                result.timedOut ? " (timed out before target)" : "");
    std::printf("stable average  = %.6f V, band [%.6f, %.6f] V%s\n",
                result.report.stableAverage, result.report.bandLow,
                result.report.bandHigh,
                result.report.absoluteBandUsed ? " (absolute fallback)" : "");
    if (result.report.settlingTime)
    {
        std::printf("settling time   = %.6f ms (settle at sample %zu)\n",
                    toSeconds(*result.report.settlingTime) * 1e3,
                    *result.report.settleIndex);
    }
    else
    {
        std::printf("settling time   = not reached within the trace\n");
    }
    std::printf("trace           = %s\n", tracePath.string().c_str());
}

void cmdIntervals(const GlobalOptions& global, int lane, size_t samples)
{
    PlatformProfile profile = resolveProfile(global);
    auto rows = runIntervalMatrix(profile, lane, samples);

    auto csvPath = outputPath(global, "intervals.csv");
    auto csv = openOutput(csvPath);
    csv << "control_path,scl_hz,mean_interval_s,samples\n";
    std::printf("%-10s %-8s %s\n", "path", "scl", "mean interval");
    for (const auto& row : rows)
    {
        char line[96];
        std::snprintf(line, sizeof(line), "%s,%u,%.9f,%zu\n",
                      toString(row.path), row.sclHz, row.meanIntervalSeconds,
                      row.sampleCount);
        csv << line;
        std::printf("%-10s %-8u %.4f ms\n", toString(row.path), row.sclHz,
                    row.meanIntervalSeconds * 1e3);
    }
    std::printf("table           = %s\n", csvPath.string().c_str());
}

struct CaseStudyOptions
{
    std::string configPath;
    double gbps = 10.0;
    std::string mode = "both";
    double highVolts = 1.0;
    double lowVolts = 0.70;
    double stepVolts = 0.001;
    int lane = 6;
    std::string path = "hardware";
    uint32_t sclHz = 400000;
    std::string side = "tx";
};

void applyCaseStudyFile(CaseStudyConfig& config, const std::string& path)
{
    ConfigDoc doc = parseConfigFile(path);
    const ConfigSection& sweep = doc.require("sweep");
    config.gbps = sweep.getDouble("speed_gbps", config.gbps);
    config.mode = sweepModeFromString(sweep.get("mode", toString(config.mode)));
    config.seed = static_cast<uint64_t>(
        sweep.getInt("seed", static_cast<int64_t>(config.seed)));
    config.highVolts = sweep.getDouble("high_v", config.highVolts);
    config.lowVolts = sweep.getDouble("low_v", config.lowVolts);
    config.stepVolts = sweep.getDouble("step_v", config.stepVolts);
    config.lane = static_cast<int>(sweep.getInt("lane", config.lane));
    config.path = parsePath(sweep.get("control_path", toString(config.path)));
    config.bus.sclHz = static_cast<uint32_t>(
        sweep.getInt("scl_hz", config.bus.sclHz));
}

void cmdCaseStudy(const GlobalOptions& global, const CaseStudyOptions& opt,
                  const CLI::App* sub)
{
    PlatformProfile profile = resolveProfile(global);
    LinkCalibration calibration = resolveCalibration(global);

    CaseStudyConfig config;
    config.seed = global.seed;
    if (!opt.configPath.empty())
    {
        applyCaseStudyFile(config, opt.configPath);
    }
    // Explicit flags win over the config file.
    if (sub->count("--speed") || opt.configPath.empty())
    {
        config.gbps = opt.gbps;
    }
    if (sub->count("--mode") || opt.configPath.empty())
    {
        config.mode = sweepModeFromString(opt.mode);
    }
    if (sub->count("--high") || opt.configPath.empty())
    {
        config.highVolts = opt.highVolts;
    }
    if (sub->count("--low") || opt.configPath.empty())
    {
        config.lowVolts = opt.lowVolts;
    }
    if (sub->count("--step") || opt.configPath.empty())
    {
        config.stepVolts = opt.stepVolts;
    }
    if (sub->count("--lane") || opt.configPath.empty())
    {
        config.lane = opt.lane;
    }
    if (sub->count("--path") || opt.configPath.empty())
    {
        config.path = parsePath(opt.path);
    }
    if (sub->count("--scl") || opt.configPath.empty())
    {
        config.bus.sclHz = opt.sclHz;
    }

    SweepResult result = runCaseStudy(config, profile, calibration);

    char stem[64];
    std::snprintf(stem, sizeof(stem), "sweep-%gg-%s", config.gbps,
                  toString(config.mode));
    auto csvPath = outputPath(global, std::string(stem) + ".csv");
    auto metaPath = outputPath(global, std::string(stem) + ".meta");
    auto csv = openOutput(csvPath);
    writeSweepCsv(csv, result.points);
    auto meta = openOutput(metaPath);
    writeSweepMetadata(meta, result);

    LinkSide side = opt.side == "rx" ? LinkSide::Rx : LinkSide::Tx;
    SavingsSummary savings = savingsReport(result.points, side);
    writeSavingsText(std::cout, savings);
    std::printf("points          = %zu\n", result.points.size());
    std::printf("csv             = %s\n", csvPath.string().c_str());
    std::printf("metadata        = %s\n", metaPath.string().c_str());
}

void cmdSavings(const std::string& inPath, const std::string& sideName)
{
    std::ifstream in(inPath);
    if (!in)
    {
        throw std::runtime_error("cannot open sweep CSV: " + inPath);
    }
    std::vector<SweepPoint> points = readSweepCsv(in);
    LinkSide side = sideName == "rx" ? LinkSide::Rx : LinkSide::Tx;
    writeSavingsText(std::cout, savingsReport(points, side));
}

struct ReplayOptions
{
    std::string scriptPath;
    std::string path = "hardware";
    uint32_t sclHz = 400000;
    std::string expansion = "prototype";
};

void cmdReplay(const GlobalOptions& global, const ReplayOptions& opt)
{
    PlatformProfile profile = resolveProfile(global);
    std::ifstream script(opt.scriptPath);
    if (!script)
    {
        throw std::runtime_error("cannot open script: " + opt.scriptPath);
    }
    std::vector<Request> requests = parseRequestScript(script);

    BoardStack stack(profile, parsePath(opt.path),
                     opt.expansion == "minimal" ? ExpansionMode::Minimal
                                                : ExpansionMode::Prototype,
                     BusConfig{opt.sclHz});
    std::vector<RequestStatus> statuses;
    size_t failed = 0;
    for (const Request& request : requests)
    {
        statuses.push_back(stack.manager().submit(request));
        if (statuses.back().outcome != RequestOutcome::Completed)
        {
            ++failed;
        }
    }

    auto statusPath = outputPath(global, "replay-status.csv");
    auto statusOut = openOutput(statusPath);
    writeStatusLogCsv(statusOut, requests, statuses);
    auto tracePath = outputPath(global, "replay-bus-trace.csv");
    auto traceOut = openOutput(tracePath);
    stack.bus().writeTraceCsv(traceOut);

    std::printf("requests        = %zu (%zu failed)\n", requests.size(),
                failed);
    std::printf("simulated time  = %.6f ms\n",
                toSeconds(stack.bus().now()) * 1e3);
    std::printf("status log      = %s\n", statusPath.string().c_str());
    std::printf("bus trace       = %s\n", tracePath.string().c_str());
    if (failed != 0)
    {
        throw std::runtime_error(std::to_string(failed) +
                                 " requests did not complete");
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Desk-scale simulator of a PMBus rail-voltage control "
                 "stack with calibrated serial-link models"};
    app.require_subcommand(1);
    // Let the global flags (--out, --seed, ...) appear after the
    // subcommand name too.
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--profile", global.profilePath,
                   "Platform profile file (built-in KC705 when omitted)");
    app.add_option("--calibration", global.calibrationPath,
                   "Link calibration file (built-in when omitted)");
    app.add_option("--seed", global.seed, "Seed for all randomized models");
    app.add_option("--out", global.outDir, "Output directory")
        ->default_val(".");

    auto pathValidator = CLI::IsMember({"hardware", "software"});
    auto modeValidator = CLI::IsMember({"both", "tx", "rx"});
    auto expansionValidator = CLI::IsMember({"prototype", "minimal"});
    auto sideValidator = CLI::IsMember({"tx", "rx"});

    TransitionOptions transitionOpt;
    CLI::App* transition = app.add_subcommand(
        "transition", "Program one voltage step and trace the settling");
    transition->add_option("--lane", transitionOpt.lane, "Controller lane");
    transition->add_option("--from", transitionOpt.fromVolts,
                           "Starting voltage");
    transition->add_option("--to", transitionOpt.toVolts, "Target voltage")
        ->required();
    transition->add_option("--path", transitionOpt.path, "Control path")
        ->check(pathValidator);
    transition->add_option("--scl", transitionOpt.sclHz, "Bus clock in Hz");
    transition->add_option("--expansion", transitionOpt.expansion,
                           "Update sequence variant")
        ->check(expansionValidator);
    transition->add_option("--window", transitionOpt.window,
                           "Settling window in samples");
    transition->add_option("--band", transitionOpt.bandPercent,
                           "Stability band, percent of the settled level");
    transition->add_option("--max-samples", transitionOpt.maxSamples,
                           "Sampling budget");
    transition->callback([&]() { cmdTransition(global, transitionOpt); });

    int intervalLane = 0;
    size_t intervalSamples = 32;
    CLI::App* intervals = app.add_subcommand(
        "intervals",
        "Measure sample spacing for both control paths at 400/100 kHz");
    intervals->add_option("--lane", intervalLane, "Controller lane");
    intervals->add_option("--samples", intervalSamples,
                          "Intervals averaged per configuration");
    intervals->callback(
        [&]() { cmdIntervals(global, intervalLane, intervalSamples); });

    CaseStudyOptions caseOpt;
    CLI::App* caseStudy = app.add_subcommand(
        "case-study",
        "Sweep the transceiver supply downward and evaluate link metrics");
    caseStudy->add_option("--config", caseOpt.configPath,
                          "Sweep config file (flags override it)");
    caseStudy->add_option("--speed", caseOpt.gbps, "Line rate in Gbps");
    caseStudy->add_option("--mode", caseOpt.mode, "Which sides are swept")
        ->check(modeValidator);
    caseStudy->add_option("--high", caseOpt.highVolts, "Sweep start voltage");
    caseStudy->add_option("--low", caseOpt.lowVolts, "Sweep end voltage");
    caseStudy->add_option("--step", caseOpt.stepVolts, "Sweep step");
    caseStudy->add_option("--lane", caseOpt.lane, "Swept controller lane");
    caseStudy->add_option("--path", caseOpt.path, "Control path")
        ->check(pathValidator);
    caseStudy->add_option("--scl", caseOpt.sclHz, "Bus clock in Hz");
    caseStudy->add_option("--side", caseOpt.side,
                          "Side used for the savings summary")
        ->check(sideValidator);
    caseStudy->callback(
        [&]() { cmdCaseStudy(global, caseOpt, caseStudy); });

    std::string savingsIn;
    std::string savingsSide = "tx";
    CLI::App* savings = app.add_subcommand(
        "savings", "Summarize power savings from an existing sweep CSV");
    savings->add_option("--in", savingsIn, "Sweep CSV")->required();
    savings->add_option("--side", savingsSide, "Rail power side")
        ->check(sideValidator);
    savings->callback([&]() { cmdSavings(savingsIn, savingsSide); });

    ReplayOptions replayOpt;
    CLI::App* replay = app.add_subcommand(
        "replay", "Execute a request script and log the bus activity");
    replay->add_option("--script", replayOpt.scriptPath,
                       "Request script, one 'opcode lane volts' per line")
        ->required();
    replay->add_option("--path", replayOpt.path, "Control path")
        ->check(pathValidator);
    replay->add_option("--scl", replayOpt.sclHz, "Bus clock in Hz");
    replay->add_option("--expansion", replayOpt.expansion,
                       "Update sequence variant")
        ->check(expansionValidator);
    replay->callback([&]() { cmdReplay(global, replayOpt); });

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
