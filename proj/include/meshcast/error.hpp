#pragma once

#include <stdexcept>
#include <string>

namespace meshcast {

/// Bad flags, bad config values, malformed requests. CLI exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Missing, corrupt, or inconsistent data files. CLI exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite values or diverging optimization. CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace meshcast
