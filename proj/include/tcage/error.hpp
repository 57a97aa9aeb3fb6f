#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcage {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A single input row could not be parsed.
class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Dataset-level inconsistency (duplicate ids, missing creations, empty tables).
class DatasetError : public Error {
public:
    using Error::Error;
};

/// Fitting or smoothing could not be carried out on the given points.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Invalid synthetic profile.
class ProfileError : public Error {
public:
    using Error::Error;
};

/// Non-fatal findings collected while ingesting and analysing a dataset.
struct Diagnostics {
    std::vector<std::string> warnings;
    std::size_t dropped_outcomes = 0;
    std::size_t rejected_before_creation = 0;
    std::size_t duplicates_removed = 0;
    std::size_t unexecuted_test_cases = 0;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace tcage
