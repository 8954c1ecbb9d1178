#pragma once

#include <stdexcept>
#include <string>

namespace wikicite {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (maps to exit code 1 in the CLI).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Problems with input data: missing files, malformed XML, bad matrix
/// files and so on (maps to exit code 2 in the CLI).
class DataError : public Error {
public:
    using Error::Error;
};

class FileNotFoundError : public DataError {
public:
    explicit FileNotFoundError(const std::string& path)
        : DataError("file not found: " + path) {}
};

/// Malformed XML. `byte_offset` is the offset into the (decompressed)
/// document where the problem was detected, or -1 if unknown.
class XmlError : public DataError {
public:
    XmlError(const std::string& what, long long byte_offset = -1)
        : DataError(what), byte_offset_(byte_offset) {}
    long long byte_offset() const noexcept { return byte_offset_; }

private:
    long long byte_offset_;
};

/// Corrupt or truncated compressed input. `byte_offset` counts
/// decompressed bytes delivered before the failure.
class DecompressionError : public DataError {
public:
    DecompressionError(const std::string& what, long long byte_offset = -1)
        : DataError(what), byte_offset_(byte_offset) {}
    long long byte_offset() const noexcept { return byte_offset_; }

private:
    long long byte_offset_;
};

/// Two lexicon entries claim the same normalized name.
class CollisionError : public DataError {
public:
    using DataError::DataError;
};

class EmptyMatrixError : public DataError {
public:
    using DataError::DataError;
};

class RankTooLargeError : public DataError {
public:
    using DataError::DataError;
};

/// Matrix dimensions do not conform; indicates a caller bug.
class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

/// Models that should share an article axis do not.
class AxisMismatchError : public DataError {
public:
    using DataError::DataError;
};

class IndexOutOfRangeError : public Error {
public:
    using Error::Error;
};

class NonConsecutiveKError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace wikicite
