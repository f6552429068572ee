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
#include "voltune/platform_profile.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace voltune;

namespace
{

size_t errorLine(const std::string& text)
{
    std::istringstream in(text);
    try
    {
        parseConfig(in);
    }
    catch (const ConfigError& e)
    {
        return e.line;
    }
    FAIL("expected a parse error");
    return 0;
}

void checkProfilesEqual(const PlatformProfile& a, const PlatformProfile& b)
{
    CHECK(a.name == b.name);
    CHECK(a.voutExponent == b.voutExponent);
    CHECK(a.dynamics.slewVoltsPerSecond == b.dynamics.slewVoltsPerSecond);
    CHECK(a.dynamics.responseDelay == b.dynamics.responseDelay);
    CHECK(a.dynamics.overshootFraction == b.dynamics.overshootFraction);
    CHECK(a.controlPath.hardwareOverhead == b.controlPath.hardwareOverhead);
    CHECK(a.controlPath.softwareOverhead == b.controlPath.softwareOverhead);
    CHECK(a.thresholds.uvWarnFraction == b.thresholds.uvWarnFraction);
    CHECK(a.thresholds.uvFaultFraction == b.thresholds.uvFaultFraction);
    CHECK(a.thresholds.pgoodOnFraction == b.thresholds.pgoodOnFraction);
    CHECK(a.thresholds.pgoodOffFraction == b.thresholds.pgoodOffFraction);

    REQUIRE(a.lanes.size() == b.lanes.size());
    for (size_t i = 0; i < a.lanes.size(); ++i)
    {
        CHECK(a.lanes[i].lane == b.lanes[i].lane);
        CHECK(a.lanes[i].railName == b.lanes[i].railName);
        CHECK(a.lanes[i].address == b.lanes[i].address);
        CHECK(a.lanes[i].page == b.lanes[i].page);
    }

    REQUIRE(a.regulators.size() == b.regulators.size());
    for (size_t i = 0; i < a.regulators.size(); ++i)
    {
        const RegulatorSpec& ra = a.regulators[i];
        const RegulatorSpec& rb = b.regulators[i];
        CHECK(ra.address == rb.address);
        CHECK(ra.voutExponent == rb.voutExponent);
        REQUIRE(ra.rails.size() == rb.rails.size());
        for (size_t j = 0; j < ra.rails.size(); ++j)
        {
            CHECK(ra.rails[j].name == rb.rails[j].name);
            CHECK(ra.rails[j].nominalVolts == rb.rails[j].nominalVolts);
            CHECK(ra.rails[j].voutMin == rb.rails[j].voutMin);
            CHECK(ra.rails[j].voutMax == rb.rails[j].voutMax);
            CHECK(ra.rails[j].calibrationOffset ==
                  rb.rails[j].calibrationOffset);
            CHECK(ra.rails[j].scale == rb.rails[j].scale);
            CHECK(ra.rails[j].modeledPowerWatts ==
                  rb.rails[j].modeledPowerWatts);
        }
    }
}

}  // namespace

TEST_CASE("structured text parses sections, comments, and typed values")
{
    std::istringstream in(
        "# leading comment\n"
        "; alternate comment style\n"
        "[alpha]\n"
        "key = value\n"
        "  spaced   =   v v \n"
        "[beta one]\n"
        "n = 42\n"
        "x = 0x10\n"
        "d = 2.5\n"
        "[alpha]\n"
        "key = second\n");
    ConfigDoc doc = parseConfig(in);
    REQUIRE(doc.sections.size() == 3);
    CHECK(doc.sections[0].name == "alpha");
    CHECK(doc.sections[0].line == 3);
    CHECK(doc.sections[0].get("key") == "value");
    CHECK(doc.sections[0].get("spaced") == "v v");  // inner spaces survive
    CHECK(doc.find("beta one")->getInt("n") == 42);
    CHECK(doc.find("beta one")->getInt("x") == 16);
    CHECK(doc.find("beta one")->getDouble("d") == 2.5);
    CHECK(doc.all("alpha").size() == 2);
    CHECK(doc.all("alpha")[1]->get("key") == "second");
    CHECK(doc.withPrefix("beta").size() == 1);
    CHECK(doc.find("gamma") == nullptr);
    CHECK_THROWS_AS(doc.require("gamma"), ConfigError);

    CHECK(doc.sections[0].has("key"));
    CHECK_FALSE(doc.sections[0].has("missing"));
    CHECK(doc.sections[0].get("missing", "dflt") == "dflt");
    CHECK(doc.sections[0].getDouble("missing", 1.5) == 1.5);
    CHECK(doc.sections[0].getInt("missing", 7) == 7);
}

TEST_CASE("parse errors carry the offending line number")
{
    CHECK(errorLine("[oops\n") == 1);
    CHECK(errorLine("k = v\n") == 1);            // key outside any section
    CHECK(errorLine("[s]\njunk line\n") == 2);   // no equals sign
    CHECK(errorLine("[s]\n = v\n") == 2);        // empty key
    CHECK(errorLine("[]\n") == 1);               // empty section name
    CHECK(errorLine("# c\n\n[s]\nbroken\n") == 4);
}

TEST_CASE("typed getters reject partial parses")
{
    std::istringstream in("[s]\na = 1.5x\nb = v v\nc = 2.5\n");
    ConfigDoc doc = parseConfig(in);
    const ConfigSection& s = *doc.find("s");
    CHECK_THROWS_AS(s.getDouble("a"), ConfigError);
    CHECK_THROWS_AS(s.getDouble("b"), ConfigError);
    CHECK_THROWS_AS(s.getInt("c"), ConfigError);  // 2.5 is not an integer
    CHECK_THROWS_AS(s.get("nope"), ConfigError);
}

TEST_CASE("the shipped profile file matches the built-in platform")
{
    PlatformProfile fromFile =
        loadProfileFile(std::string(VOLTUNE_DATA_DIR) + "/kc705.profile");
    checkProfilesEqual(fromFile, kc705Profile());
}

TEST_CASE("built-in platform wiring")
{
    PlatformProfile p = kc705Profile();
    CHECK(p.name == "kc705");
    CHECK(p.lanes.size() == 11);
    CHECK(p.regulators.size() == 3);
    CHECK(p.regulator(52).rails.size() == 4);
    CHECK(p.regulator(53).rails.size() == 4);
    CHECK(p.regulator(54).rails.size() == 3);

    const LaneInfo& mgtavcc = p.lane(6);
    CHECK(mgtavcc.railName == "MGTAVCC");
    CHECK(mgtavcc.address == 53);
    CHECK(mgtavcc.page == 2);
    CHECK(p.rail(mgtavcc).nominalVolts == 1.0);
    CHECK(p.rail(mgtavcc).modeledPowerWatts == 0.2);

    CHECK(p.overhead(ControlPath::Hardware) == 80000);
    CHECK(p.overhead(ControlPath::Software) == 560000);
    CHECK(p.dynamics.responseDelay == 150000);

    CHECK_THROWS_AS(p.lane(99), std::out_of_range);
    CHECK_THROWS_AS(p.regulator(99), std::out_of_range);
}

TEST_CASE("profile loader rejects inconsistent lane maps")
{
    auto loadText = [](const std::string& text) {
        std::istringstream in(text);
        return loadProfile(in);
    };
    const std::string head = "[platform]\nname = t\n";
    const std::string lane0 =
        "[lane 0]\nrail = A\naddress = 10\npage = 0\nnominal_v = 1.0\n";

    CHECK_THROWS_AS(loadText(lane0), ConfigError);  // missing [platform]
    CHECK_THROWS_AS(loadText(head), ConfigError);   // no lanes at all
    CHECK_THROWS_AS(
        loadText(head + lane0 +
                 "[lane 0]\nrail = B\naddress = 10\npage = 1\n"
                 "nominal_v = 1.0\n"),
        ConfigError);  // duplicate lane id
    CHECK_THROWS_AS(
        loadText(head + lane0 +
                 "[lane 1]\nrail = B\naddress = 10\npage = 0\n"
                 "nominal_v = 1.0\n"),
        ConfigError);  // duplicate (address, page)
    CHECK_THROWS_AS(
        loadText(head +
                 "[lane 0]\nrail = A\naddress = 10\npage = 1\n"
                 "nominal_v = 1.0\n"),
        ConfigError);  // pages must be dense from 0
    CHECK_THROWS_AS(
        loadText(head +
                 "[lane 0]\nrail = A\naddress = 10\npage = 0\n"
                 "nominal_v = 1.0\nvout_min_v = 2.0\nvout_max_v = 1.0\n"),
        ConfigError);  // inverted limits
    CHECK_THROWS_AS(
        loadText(head +
                 "[lane x]\nrail = A\naddress = 10\npage = 0\n"
                 "nominal_v = 1.0\n"),
        ConfigError);  // lane id is not a number
    CHECK_THROWS_AS(
        loadText(head +
                 "[lane 0]\nrail = A\naddress = 10\npage = 4\n"
                 "nominal_v = 1.0\n"),
        ConfigError);  // page beyond the four-rail controller
}

TEST_CASE("profile loader fills documented defaults")
{
    std::istringstream in(
        "[platform]\n"
        "name = mini\n"
        "[lane 0]\n"
        "rail = A\n"
        "address = 10\n"
        "page = 0\n"
        "nominal_v = 1.0\n");
    PlatformProfile p = loadProfile(in);
    CHECK(p.voutExponent == -12);
    CHECK(p.dynamics.slewVoltsPerSecond == 250.0);
    CHECK(p.dynamics.responseDelay == 150000);
    CHECK(p.controlPath.hardwareOverhead == 80000);
    CHECK(p.controlPath.softwareOverhead == 560000);
    CHECK(p.thresholds.uvWarnFraction == 0.90);
    const RailSpec& rail = p.rail(p.lane(0));
    CHECK(rail.voutMin == 0.0);
    CHECK(rail.voutMax == 1.5);
    CHECK(rail.scale == 1.0);
}
