#pragma once

#include <stdexcept>
#include <string>

namespace pivotfuse {

/// Base class for all pivotfuse failures. CLI maps subtypes to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical or algorithmic parameter (outside its mathematical domain).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Grid/node index out of bounds.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Bad input data (unparseable rows, out-of-order streams, schema violations).
class DataError : public Error {
public:
    explicit DataError(const std::string& what, long row = -1)
        : Error(row >= 0 ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}
    long row() const { return row_; }

private:
    long row_ = -1;
};

/// Numerical failure: blowup, stiffness, ill-conditioning.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, long node = -1)
        : Error(node >= 0 ? what + " (node " + std::to_string(node) + ")" : what), node_(node) {}
    long node() const { return node_; }

private:
    long node_ = -1;
};

}  // namespace pivotfuse
