#pragma once

#include <stdexcept>
#include <string>

namespace catune {

// Error classes map to CLI exit codes: config 3, I/O + parse 4,
// contract/numeric 5, non-convergence 6.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad value in a config file or an argument outside a documented domain.
struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : IoError {
    using IoError::IoError;
};

struct VersionMismatchError : ParseError {
    using ParseError::ParseError;
};

struct ChecksumError : ParseError {
    using ParseError::ParseError;
};

struct TruncatedFileError : ParseError {
    using ParseError::ParseError;
};

struct ArchitectureMismatchError : ParseError {
    using ParseError::ParseError;
};

// Contract violations at runtime: non-finite values, shape mismatches,
// a policy returning an invalid action index.
struct ContractError : Error {
    using Error::Error;
};

struct NumericError : ContractError {
    using ContractError::ContractError;
};

struct ConvergenceError : Error {
    using Error::Error;
};

// Rejection budget exhausted while filling an encounter stratum.
struct GenerationExhaustedError : Error {
    using Error::Error;
};

}  // namespace catune
