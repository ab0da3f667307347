#pragma once

#include <stdexcept>
#include <string>

namespace ordsim {

// Error taxonomy mirrored by the CLI exit codes:
//   UsageError   -> 1  (bad arguments, bad configuration, shape mismatches)
//   DataError    -> 2  (malformed files, out-of-contract values, degenerate inputs)
//   NumericError -> 3  (non-finite values produced during computation)
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ordsim
