#pragma once

#include <stdexcept>
#include <string>

namespace adactrl {

// Input data that fails schema or contract checks (CLI exit code 2).
class MalformedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem / stream failures (CLI exit code 1).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite gradient or objective during an update (CLI exit code 3).
class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adactrl
