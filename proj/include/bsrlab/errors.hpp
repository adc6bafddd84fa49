#pragma once

#include <stdexcept>
#include <string>

namespace bsrlab {

// Bad configuration or inputs that violate a documented precondition.
// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Persistent data that fails schema or invariant checks on load.
class ValidationError : public ConfigError {
public:
    explicit ValidationError(const std::string& what) : ConfigError(what) {}
};

// A numerical procedure failed to converge or produced garbage.
// The CLI maps these to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Spectral cap too low: the top harmonic degree still contributes
// eigenvalues below the requested cutoff.
class CapError : public ConfigError {
public:
    CapError(const std::string& what, int offending_degree)
        : ConfigError(what), degree(offending_degree) {}
    int degree;
};

// Pairing between two spectral data sets is not well defined
// (mismatched lengths or incompatible Robin coefficients).
class PairingError : public ConfigError {
public:
    explicit PairingError(const std::string& what) : ConfigError(what) {}
};

// A pairing was requested for an entry whose boundary trace is unknown.
class MissingTraceError : public std::runtime_error {
public:
    explicit MissingTraceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bsrlab
