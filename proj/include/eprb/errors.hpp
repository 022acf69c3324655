#pragma once

#include <stdexcept>
#include <string>

namespace eprb {

/// Invalid configuration or argument supplied by the caller (CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an estimator.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Estimator asked to summarize an empty sample.
class NoDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A response map or model produced an impossible value.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace eprb
