#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dqpt {

// Every library error derives from Error and carries a stable kind name that
// the CLI writes into its machine-readable error record.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Band touching: |d| at or below the gap threshold.
class GapClosure : public Error {
public:
    explicit GapClosure(const std::string& what) : Error("GapClosure", what) {}
};

class InvalidGrid : public Error {
public:
    explicit InvalidGrid(const std::string& what) : Error("InvalidGrid", what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("DimensionMismatch", what) {}
};

class NotCritical : public Error {
public:
    explicit NotCritical(const std::string& what) : Error("NotCritical", what) {}
};

class NonFiniteRate : public Error {
public:
    NonFiniteRate(const std::string& what, double t, double k)
        : Error("NonFiniteRate", what), t_(t), k_(k) {}
    double time() const noexcept { return t_; }
    double momentum() const noexcept { return k_; }

private:
    double t_;
    double k_;
};

class BasisUnavailable : public Error {
public:
    explicit BasisUnavailable(const std::string& what) : Error("BasisUnavailable", what) {}
};

/// Byte range into an expression's source text.
struct Span {
    std::size_t offset = 0;
    std::size_t length = 0;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error("ParseError", what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnboundVariable : public Error {
public:
    UnboundVariable(std::string name, Span span)
        : Error("UnboundVariable", "unbound variable '" + name + "' at offset " +
                                       std::to_string(span.offset)),
          name_(std::move(name)), span_(span) {}
    const std::string& name() const noexcept { return name_; }
    Span span() const noexcept { return span_; }

private:
    std::string name_;
    Span span_;
};

class EvalError : public Error {
public:
    EvalError(std::string operation, Span span)
        : Error("EvalError", "invalid " + operation + " at offset " + std::to_string(span.offset)),
          operation_(std::move(operation)), span_(span) {}
    const std::string& operation() const noexcept { return operation_; }
    Span span() const noexcept { return span_; }

private:
    std::string operation_;
    Span span_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& reason)
        : Error("ConfigError", field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    IoError(std::string path, const std::string& reason)
        : Error("IoError", path + ": " + reason), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace dqpt
