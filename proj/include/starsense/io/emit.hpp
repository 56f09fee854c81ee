#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace starsense {

// ---------------------------------------------------------------------------
// CSV and SVG artifact emission. Every file starts with a '#' metadata block
// (command, config hash, seed, convention tags, column schema) so a run is
// reproducible byte-for-byte from its config and seed. No timestamps.
// ---------------------------------------------------------------------------

// Shortest round-trippable-ish decimal; fixed formatting keeps emitted files
// identical across platforms.
std::string format_number(double value);

struct MetadataTag {
  std::string key;
  std::string value;
};

// "# starsense <command>" block plus the column header row.
std::string csv_preamble(const std::string& command, std::uint64_t config_hash,
                         std::uint64_t seed, const std::vector<MetadataTag>& tags,
                         const std::string& columns);

std::string csv_row(const std::vector<double>& values);

// Creates parent directories as needed; throws std::system_error derivatives
// on failure.
void write_text_file(const std::string& path, const std::string& content);

// Minimal polyline chart, axes plus one path per series. Convenience output
// only; nothing downstream parses it.
struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::array<double, 2>> points;  // (x, y)
};

std::string svg_chart(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<SvgSeries>& series,
                      bool log_x = false, bool log_y = false);

}  // namespace starsense
