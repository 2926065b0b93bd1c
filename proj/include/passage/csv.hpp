#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace passage {

// Column-named numeric table, one CSV row per entry of rows.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Provenance header embedded as '#' comment lines ahead of the CSV header.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string version;    // defaults to library_version() when empty
  std::uint64_t seed = 0;
  std::string timestamp;  // defaults to utc_timestamp() when empty
};

// Build-time version label (git describe when available).
std::string library_version();

// Current UTC time, ISO-8601 (e.g. 2026-08-19T12:00:00Z).
std::string utc_timestamp();

// Shortest round-trippable decimal with 12 significant digits.
std::string format_number(double v);

// Manifest comments, then the header row, then %.12g data rows.
void write_csv(std::ostream& os, const RunManifest& manifest,
               const Table& table);

}  // namespace passage
