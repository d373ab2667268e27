#pragma once

#include <stdexcept>
#include <string>

namespace rsb {

// Base of every library error. Callers that only care about "something went
// wrong inside rsb" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Too few observations for the requested statistic (e.g. variance with n < 2).
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// MLE iteration did not converge or the likelihood is unbounded.
class FitError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// A requested sample size or allocation exceeds configured limits.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Non-finite or misaligned input data.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace rsb
