#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fluency {

// Run metadata stamped into every file the pipeline writes.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Lines starting with this prefix form a file's metadata block.
inline constexpr std::string_view kMetaPrefix = "#fluency";

std::string meta_line(const Provenance& p);

std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes through a temporary sibling and renames, so a crashed stage never
// leaves a half-written artifact behind.
void write_file(const std::filesystem::path& path, std::string_view content);

// Drops the leading metadata block (lines starting with kMetaPrefix).
std::vector<std::string> strip_meta(std::vector<std::string> lines);

std::vector<std::string_view> split(std::string_view line, char sep);

// printf("%.9g") equivalent.
std::string format_g9(double x);
// Shortest representation that round-trips exactly.
std::string format_exact(double x);

double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

}  // namespace fluency
