#pragma once

#include <charconv>
#include <string>

namespace adactrl {

// Shortest decimal form that parses back to the same double. Locale-free.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace adactrl
