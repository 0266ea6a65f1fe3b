#pragma once

#include <stdexcept>
#include <string>

namespace sgda {

// Invalid configuration (bad JSON, violated invariants). CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unusable input data (malformed CSV, stage mismatch, missing files). CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sgda
