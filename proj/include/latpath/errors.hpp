#pragma once

#include <stdexcept>

namespace latpath {

// Error families map onto CLI exit codes: usage 1, parse/data 2, resource 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tied values where strict ordering is required (breaks the order-statistics
// constructions); callers are advised to jitter or augment.
struct TieError : DataError {
    using DataError::DataError;
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace latpath
