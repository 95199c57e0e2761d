#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace anchord {

/// Violated input contract: bad file, bad dimensions, missing or
/// insufficient data. `error_class()` is a stable machine-parseable
/// identifier; the CLI maps these to exit code 1.
class InputError : public std::runtime_error {
public:
    InputError(std::string error_class, const std::string& message)
        : std::runtime_error(message), class_(std::move(error_class)) {}

    const std::string& error_class() const noexcept { return class_; }

private:
    std::string class_;
};

/// Numerical failure (divergence, non-finite cost, invalid log argument).
/// The CLI maps these to exit code 2.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string error_class, const std::string& message)
        : std::runtime_error(message), class_(std::move(error_class)) {}

    const std::string& error_class() const noexcept { return class_; }

private:
    std::string class_;
};

}  // namespace anchord
