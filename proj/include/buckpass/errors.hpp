#pragma once

#include <stdexcept>
#include <string>

namespace buckpass {

// Input problems (bad files, invariant violations, exceeded caps). CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// "This should be impossible" failures: a termination guarantee broke, a residual
// check failed, two supposedly equal routes disagreed. CLI exit code 1.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace buckpass
