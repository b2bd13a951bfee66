#pragma once

#include <stdexcept>
#include <string>

namespace predopt {

// Domain failures (infeasible input, over-constrained instances, search caps).
// Usage errors stay std::invalid_argument.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DomainError {
public:
    ParseError(std::string const& what, int line, int column)
        : DomainError(format(what, line, column)), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(std::string const& what, int line, int column) {
        if (line <= 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }

    int line_;
    int column_;
};

class InfeasibleError : public DomainError {
public:
    using DomainError::DomainError;
};

class SearchLimitError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace predopt
