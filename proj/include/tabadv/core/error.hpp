#ifndef TABADV_CORE_ERROR_HPP
#define TABADV_CORE_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tabadv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, schema, or file contents.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Lexical or syntax error in the constraint language, with a 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          message_(what), line_(line), column_(column) {}

    /// Same error located in a file: "<file>:<line>:<column>: <what>".
    ParseError(const std::string& file, const ParseError& e)
        : Error(file + ":" + std::to_string(e.line_) + ":" + std::to_string(e.column_) + ": " + e.message_),
          message_(e.message_), line_(e.line_), column_(e.column_) {}

    /// Message without the position prefix.
    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

/// Runtime failure while evaluating an expression (e.g. division by zero).
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// An operation needed more model access than the wrapper grants.
class AccessError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace tabadv

#endif
