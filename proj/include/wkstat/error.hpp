#pragma once

#include <stdexcept>
#include <string>

namespace wkstat {

/// Bad or inconsistent input data (maps to CLI exit status 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (maps to CLI exit status 1).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace wkstat
