#pragma once

#include <stdexcept>
#include <string>

namespace soup {

// Malformed or inconsistent input data (bundles, trajectories, configs).
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file written by a different schema version than this build reads.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace soup
