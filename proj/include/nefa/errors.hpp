#pragma once

#include <stdexcept>
#include <string>

namespace nefa {

// Malformed input data (dataset files, traces, config records).
class data_format_error : public std::runtime_error {
public:
    data_format_error(const std::string& what, long line = -1)
        : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// A simulation would exceed an explicit resource budget (e.g. expected
// atom count of a truncated random-measure draw).
class budget_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An estimator was given data it cannot act on (e.g. no feature of size >= 2).
class insufficient_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical routine failed to reach its tolerance (quadrature, optimizer).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nefa
