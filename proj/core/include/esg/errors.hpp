#pragma once

#include <stdexcept>
#include <string>

namespace esg {

// Base class for everything this library throws on purpose. The CLI maps
// esg::Error to exit code 1 (user error); anything else is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: invalid values, missing referenced files, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file or stream could not be decoded. Messages carry line numbers where
// the format is line-oriented.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input violating a domain invariant (duplicate ids,
// out-of-range scores, empty text).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A source adapter failed in a non-retryable way.
class SourceError : public Error {
 public:
  using Error::Error;
};

// Training data unusable for the requested operation.
class DataError : public Error {
 public:
  using Error::Error;
};

// Caller passed an argument outside an operation's contract
// (dimension mismatch, length mismatch).
class InputError : public Error {
 public:
  using Error::Error;
};

// A serialized model payload could not be restored.
class LoadError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage cannot produce output (zero retained companies,
// fully missing feature column).
class PipelineError : public Error {
 public:
  using Error::Error;
};

// Filesystem trouble while reading or writing stage files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace esg
