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

#include <fstream>

namespace voltune
{

namespace
{

std::string trim(const std::string& s)
{
    size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos)
    {
        return {};
    }
    size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

bool ConfigSection::has(const std::string& key) const
{
    for (const auto& [k, v] : entries)
    {
        if (k == key)
        {
            return true;
        }
    }
    return false;
}

const std::string& ConfigSection::get(const std::string& key) const
{
    for (const auto& [k, v] : entries)
    {
        if (k == key)
        {
            return v;
        }
    }
    throw ConfigError(line, "section [" + name + "] missing key '" + key + "'");
}

std::string ConfigSection::get(const std::string& key,
                               const std::string& fallback) const
{
    return has(key) ? get(key) : fallback;
}

double ConfigSection::getDouble(const std::string& key) const
{
    const std::string& raw = get(key);
    size_t used = 0;
    double value = 0.0;
    try
    {
        value = std::stod(raw, &used);
    }
    catch (const std::exception&)
    {
        throw ConfigError(line, "key '" + key + "' is not a number: " + raw);
    }
    if (used != raw.size())
    {
        throw ConfigError(line, "key '" + key + "' is not a number: " + raw);
    }
    return value;
}

double ConfigSection::getDouble(const std::string& key, double fallback) const
{
    return has(key) ? getDouble(key) : fallback;
}

int64_t ConfigSection::getInt(const std::string& key) const
{
    const std::string& raw = get(key);
    size_t used = 0;
    int64_t value = 0;
    try
    {
        value = std::stoll(raw, &used, 0);
    }
    catch (const std::exception&)
    {
        throw ConfigError(line, "key '" + key + "' is not an integer: " + raw);
    }
    if (used != raw.size())
    {
        throw ConfigError(line, "key '" + key + "' is not an integer: " + raw);
    }
    return value;
}

int64_t ConfigSection::getInt(const std::string& key, int64_t fallback) const
{
    return has(key) ? getInt(key) : fallback;
}

const ConfigSection* ConfigDoc::find(const std::string& name) const
{
    for (const auto& section : sections)
    {
        if (section.name == name)
        {
            return &section;
        }
    }
    return nullptr;
}

const ConfigSection& ConfigDoc::require(const std::string& name) const
{
    const ConfigSection* section = find(name);
    if (section == nullptr)
    {
        throw ConfigError(0, "missing section [" + name + "]");
    }
    return *section;
}

std::vector<const ConfigSection*>
    ConfigDoc::all(const std::string& name) const
{
    std::vector<const ConfigSection*> out;
    for (const auto& section : sections)
    {
        if (section.name == name)
        {
            out.push_back(&section);
        }
    }
    return out;
}

std::vector<const ConfigSection*>
    ConfigDoc::withPrefix(const std::string& prefix) const
{
    std::vector<const ConfigSection*> out;
    for (const auto& section : sections)
    {
        if (section.name.rfind(prefix, 0) == 0)
        {
            out.push_back(&section);
        }
    }
    return out;
}

ConfigDoc parseConfig(std::istream& in)
{
    ConfigDoc doc;
    std::string raw;
    size_t lineNo = 0;
    ConfigSection* current = nullptr;
    while (std::getline(in, raw))
    {
        ++lineNo;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';')
        {
            continue;
        }
        if (line.front() == '[')
        {
            if (line.back() != ']')
            {
                throw ConfigError(lineNo, "unterminated section header");
            }
            ConfigSection section;
            section.name = trim(line.substr(1, line.size() - 2));
            section.line = lineNo;
            if (section.name.empty())
            {
                throw ConfigError(lineNo, "empty section name");
            }
            doc.sections.push_back(std::move(section));
            current = &doc.sections.back();
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError(lineNo, "expected 'key = value'");
        }
        if (current == nullptr)
        {
            throw ConfigError(lineNo, "key outside any section");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
        {
            throw ConfigError(lineNo, "empty key");
        }
        current->entries.emplace_back(std::move(key), std::move(value));
    }
    return doc;
}

ConfigDoc parseConfigFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot open config file: " + path);
    }
    return parseConfig(in);
}

}  // namespace voltune
