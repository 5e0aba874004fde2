#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace memeattr {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Data errors: malformed or inconsistent input files and records.

class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateId : public DataError {
public:
    explicit DuplicateId(std::string id)
        : DataError("duplicate id: " + id), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class SchemaError : public DataError {
public:
    SchemaError(std::string field, const std::string& what)
        : DataError(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class UnknownDoc : public DataError {
public:
    explicit UnknownDoc(const std::string& id) : DataError("unknown document: " + id) {}
};

class IndexMismatch : public DataError {
public:
    using DataError::DataError;
};

class IndexFormatError : public DataError {
public:
    using DataError::DataError;
};

class IdMismatch : public DataError {
public:
    using DataError::DataError;
};

class LengthMismatch : public DataError {
public:
    using DataError::DataError;
};

class EmptyReference : public DataError {
public:
    EmptyReference() : DataError("at least one reference is required") {}
};

class EmptyQuerySet : public DataError {
public:
    EmptyQuerySet() : DataError("query set is empty: text, description and expansion are all empty") {}
};

// ---------------------------------------------------------------------------
// Argument errors: a caller violated an operation's precondition.

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidWeights : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ZeroVector : public InvalidArgument {
public:
    ZeroVector() : InvalidArgument("cosine undefined for a zero vector") {}
};

class EmptyText : public InvalidArgument {
public:
    EmptyText() : InvalidArgument("cannot embed an empty text") {}
};

// ---------------------------------------------------------------------------
// Model errors: anything that went wrong behind the model gateway.

class ModelError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public ModelError {
public:
    using ModelError::ModelError;
};

class TransportError : public ModelError {
public:
    using ModelError::ModelError;
};

/// 401/403 from the endpoint. Never retried.
class AuthError : public TransportError {
public:
    using TransportError::TransportError;
};

class RateLimited : public ModelError {
public:
    using ModelError::ModelError;
};

class Refusal : public ModelError {
public:
    using ModelError::ModelError;
};

class CapabilityUnsupported : public ModelError {
public:
    using ModelError::ModelError;
};

class NetworkDisabled : public ModelError {
public:
    NetworkDisabled() : ModelError("network access is disabled (mock mode)") {}
};

class JudgeParseError : public ModelError {
public:
    using ModelError::ModelError;
};

// ---------------------------------------------------------------------------
// Usage errors: bad command lines and configuration.

class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigParse : public UsageError {
public:
    using UsageError::UsageError;
};

class ConflictingFlags : public UsageError {
public:
    using UsageError::UsageError;
};

}  // namespace memeattr
