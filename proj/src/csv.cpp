#include "passage/csv.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>

#ifndef PASSAGE_VERSION
#define PASSAGE_VERSION "0.0.0"
#endif

namespace passage {

std::string library_version() { return PASSAGE_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_csv(std::ostream& os, const RunManifest& manifest,
               const Table& table) {
  if (table.columns.empty()) {
    throw std::invalid_argument("write_csv: table needs at least one column");
  }
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw std::invalid_argument("write_csv: ragged row");
    }
  }
  os << "# command: " << manifest.command << '\n';
  os << "# parameters:";
  for (const auto& [key, value] : manifest.parameters) {
    os << ' ' << key << '=' << value;
  }
  os << '\n';
  os << "# version: "
     << (manifest.version.empty() ? library_version() : manifest.version)
     << '\n';
  os << "# seed: " << manifest.seed << '\n';
  os << "# timestamp: "
     << (manifest.timestamp.empty() ? utc_timestamp() : manifest.timestamp)
     << '\n';
  for (size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << format_number(row[c]);
    }
    os << '\n';
  }
}

}  // namespace passage
