#ifndef WSBF_ERRORS_HPP
#define WSBF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wsbf {

// Malformed input that could not be parsed (bad date, non-numeric cell, ...).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a schema expectation
// (wrong header, unknown column, empty file).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input that parses but breaks a dataset invariant (duplicate period,
// nonpositive target, gap in the monthly sequence).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller broke an operation contract (mismatched lengths, out-of-range
// argument, missing feature column).
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure at run time (divergent training loss, impossible
// imputation, degenerate reservoir).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace wsbf

#endif // WSBF_ERRORS_HPP
