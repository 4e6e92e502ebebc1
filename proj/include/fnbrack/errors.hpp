#pragma once

#include <stdexcept>
#include <string>

namespace fnbrack {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Syntax error in an expression source, with 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line(line), col(col) {}
    int line;
    int col;
};

// Runtime domain violation (log of a non-positive value, division by
// zero, ...) located at the offending expression node.
class EvalDomainError : public Error {
public:
    EvalDomainError(const std::string& msg, int line, int col)
        : Error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line(line), col(col) {}
    int line;
    int col;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// A depth-raising combinator was evaluated past the supported jet nesting.
class JetDepthError : public Error {
public:
    using Error::Error;
};

class DomainViolation : public Error {
public:
    using Error::Error;
};

class NotAProjection : public Error {
public:
    using Error::Error;
};

class NotMultiplicative : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fnbrack
