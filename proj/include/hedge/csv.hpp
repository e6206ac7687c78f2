#pragma once

#include <string>
#include <vector>

#include "hedge/errors.hpp"

namespace hedge {
namespace csv {

// Minimal CSV support for the formats this project emits and ingests:
// comma-separated, no quoting, first row is the header. Fields are
// whitespace-trimmed.

std::vector<std::string> split_line(const std::string& line);

// Parses a file into header + rows. Empty lines are skipped. Every row must
// have the same field count as the header; violations name the line number.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Table read_file(const std::string& path);

double parse_number(const std::string& field, const std::string& context);

// Shortest round-trippable decimal representation; deterministic for a
// given build so repeated runs produce byte-identical files.
std::string format_number(double v);

void write_file(const std::string& path, const std::string& content);

}  // namespace csv
}  // namespace hedge
