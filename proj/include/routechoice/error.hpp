#pragma once

#include <stdexcept>
#include <string>

namespace routechoice {

// Base for every error raised by the library. The CLI maps these to exit
// code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// Malformed input file; message carries "<path>:<line>: ..." when known.
class DataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

// Silhouette with fewer than two clusters, Pearson with zero variance.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

}  // namespace routechoice
