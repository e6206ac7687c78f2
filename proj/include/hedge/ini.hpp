#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hedge/errors.hpp"

namespace hedge {

// Sectioned key/value config text. Parsing keeps section and key order so
// serialization is stable; comments (# or ;) and blank lines are dropped,
// making parse -> serialize -> parse a fixed point.
struct IniFile {
    using Section = std::vector<std::pair<std::string, std::string>>;
    std::vector<std::pair<std::string, Section>> sections;

    const std::string* find(const std::string& section, const std::string& key) const;
    // Inserts or overwrites, creating the section on first use.
    void set(const std::string& section, const std::string& key,
             const std::string& value);
};

// `source` names the file (or "<override>", "<string>") in diagnostics;
// every parse error carries source and line number.
IniFile parse_ini(const std::string& text, const std::string& source);
IniFile read_ini(const std::string& path);
std::string serialize_ini(const IniFile& ini);
void write_ini(const std::string& path, const IniFile& ini);

}  // namespace hedge
