#pragma once

#include <stdexcept>
#include <string>

namespace mollify {

// Malformed or inconsistent input data (shapes, labels, file contents).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values produced during a computation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mollify
