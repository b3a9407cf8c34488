#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace emi {

// Malformed or unusable input data. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation that cannot produce a finite, well-defined result. Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedRatioError : public DataError {
public:
    using DataError::DataError;
};

class ZeroVarianceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularDesignError : public NumericalError {
public:
    SingularDesignError(const std::string& what, std::vector<std::string> collinear)
        : NumericalError(what), collinear_(std::move(collinear)) {}

    const std::vector<std::string>& collinear_columns() const { return collinear_; }

private:
    std::vector<std::string> collinear_;
};

class MissingColumnError : public DataError {
public:
    explicit MissingColumnError(const std::string& column)
        : DataError("missing column '" + column + "'"), column_(column) {}

    const std::string& column() const { return column_; }

private:
    std::string column_;
};

}  // namespace emi
