#pragma once

#include <span>
#include <string>
#include <vector>

#include "adactrl/numfmt.hpp"

namespace adactrl {

// One observation in tidy (x, series, value) form — the shape external
// plotting tools ingest directly.
struct TidyRow {
  std::string x;
  std::string series;
  double value = 0.0;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string tidy_csv(std::span<const TidyRow> rows) {
  std::string out = "x,series,value\n";
  for (const auto& r : rows) {
    out += csv_field(r.x);
    out += ',';
    out += csv_field(r.series);
    out += ',';
    out += format_double(r.value);
    out += '\n';
  }
  return out;
}

}  // namespace adactrl
