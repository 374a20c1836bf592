#pragma once

#include <stdexcept>
#include <string>

namespace omcsim {

// Invalid parameters, malformed configs, inconsistent inputs. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse failures carry the offending line number where available. CLI exit code 2.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& msg, long line = -1)
        : ValidationError(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// Ill-conditioned solves, degenerate resonances, unstable loops, failed root
// brackets. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace omcsim
