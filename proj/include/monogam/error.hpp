#pragma once

#include <stdexcept>
#include <string>

namespace monogam {

// Error categories map 1:1 onto CLI exit codes (see tools/main.cpp).
enum class ErrorKind {
    Io,       // missing/unreadable/unwritable files
    Schema,   // malformed schema, header mismatch, bad cell, bad config
    Numeric,  // degenerate features, invalid probabilities, precondition failures
    Theorem,  // a lemma check reported unsatisfied: a build defect
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }
[[noreturn]] inline void throw_schema(const std::string& msg) { throw Error(ErrorKind::Schema, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }
[[noreturn]] inline void throw_theorem(const std::string& msg) { throw Error(ErrorKind::Theorem, msg); }

}  // namespace monogam
