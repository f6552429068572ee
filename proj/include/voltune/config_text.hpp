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
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace voltune
{

/**
 * Minimal INI-style configuration text:
 *
 *   # comment
 *   [section name]
 *   key = value
 *
 * Sections may repeat; order is preserved. Values are raw strings with
 * surrounding whitespace trimmed; typed access is on the section.
 */
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(size_t line, const std::string& what) :
        std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line)
    {}
    size_t line;
};

struct ConfigSection
{
    std::string name;
    size_t line = 0;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double getDouble(const std::string& key) const;
    double getDouble(const std::string& key, double fallback) const;
    int64_t getInt(const std::string& key) const;
    int64_t getInt(const std::string& key, int64_t fallback) const;
};

struct ConfigDoc
{
    std::vector<ConfigSection> sections;

    /** First section with this name, or null. */
    const ConfigSection* find(const std::string& name) const;
    /** First section with this name; throws when missing. */
    const ConfigSection& require(const std::string& name) const;
    std::vector<const ConfigSection*> all(const std::string& name) const;
    /** Sections whose name starts with the given prefix. */
    std::vector<const ConfigSection*>
        withPrefix(const std::string& prefix) const;
};

ConfigDoc parseConfig(std::istream& in);
ConfigDoc parseConfigFile(const std::string& path);

}  // namespace voltune
