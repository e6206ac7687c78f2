#include "hedge/ini.hpp"

#include <fstream>
#include <sstream>

namespace hedge {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

const std::string* IniFile::find(const std::string& section,
                                 const std::string& key) const {
    for (const auto& [name, entries] : sections)
        if (name == section)
            for (const auto& [k, v] : entries)
                if (k == key) return &v;
    return nullptr;
}

void IniFile::set(const std::string& section, const std::string& key,
                  const std::string& value) {
    for (auto& [name, entries] : sections)
        if (name == section) {
            for (auto& [k, v] : entries)
                if (k == key) {
                    v = value;
                    return;
                }
            entries.emplace_back(key, value);
            return;
        }
    sections.push_back({section, {{key, value}}});
}

IniFile parse_ini(const std::string& text, const std::string& source) {
    IniFile ini;
    IniFile::Section* current = nullptr;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(source, lineno, "unterminated section header");
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) fail(source, lineno, "empty section name");
            for (const auto& [existing, _] : ini.sections)
                if (existing == name)
                    fail(source, lineno, "duplicate section [" + name + "]");
            ini.sections.push_back({name, {}});
            current = &ini.sections.back().second;
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(source, lineno, "expected 'key = value', got '" + line + "'");
        if (current == nullptr)
            fail(source, lineno, "key/value pair before any [section] header");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(source, lineno, "empty key");
        for (const auto& [k, _] : *current)
            if (k == key) fail(source, lineno, "duplicate key '" + key + "'");
        current->emplace_back(key, value);
    }
    return ini;
}

IniFile read_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ini(buf.str(), path);
}

std::string serialize_ini(const IniFile& ini) {
    std::string out;
    for (const auto& [name, entries] : ini.sections) {
        out += "[" + name + "]\n";
        for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
        out += "\n";
    }
    return out;
}

void write_ini(const std::string& path, const IniFile& ini) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write config file '" + path + "'");
    out << serialize_ini(ini);
    if (!out) throw DataError("failed writing config file '" + path + "'");
}

}  // namespace hedge
