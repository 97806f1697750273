#pragma once

#include <stdexcept>
#include <string>

namespace mixaudit {

// Malformed input file or config; carries a position when one is known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line = -1, int column = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) +
                                             (column >= 0 ? ", column " + std::to_string(column) : "") + ")"
                                       : msg),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// A desk-scale guard was exceeded (state space or enumeration too large).
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A documented precondition of an operation does not hold for the given input.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(std::string msg, long long detail = -1)
        : std::runtime_error(std::move(msg)), detail_(detail) {}

    // e.g. the index of the first partition block that breaks invariance
    long long detail() const { return detail_; }

private:
    long long detail_;
};

}  // namespace mixaudit
