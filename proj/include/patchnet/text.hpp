#pragma once

// Small text helpers shared by the CSV and model readers/writers.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace patchnet::text {

/// Shortest decimal that round-trips to the same double.
std::string format_real(double v);

/// Split on LF; a trailing CR is stripped from each line, and a final empty
/// line after the last LF is dropped.
std::vector<std::string> split_lines(std::string_view text);

/// Split one CSV record on commas. No quoting support: fields never contain
/// commas in any format this library reads.
std::vector<std::string> split_fields(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Strict whole-field parses; return false on any trailing garbage.
bool parse_real(std::string_view s, double& out);
bool parse_int(std::string_view s, std::int64_t& out);
bool parse_uint(std::string_view s, std::uint64_t& out);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace patchnet::text
