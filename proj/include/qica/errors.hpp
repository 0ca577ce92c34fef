#pragma once

#include <stdexcept>
#include <string>

namespace qica {

/// Invalid arguments: out-of-domain parameters, mismatched shapes, inconsistent filters.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configured cap (vertex count, node budget, memory) would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input is well formed but lacks a required combinatorial structure.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArithmeticError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed text input. The message carries the offending line number.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace qica
