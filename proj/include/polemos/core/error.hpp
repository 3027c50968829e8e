#pragma once

#include <stdexcept>
#include <string>

namespace polemos {

/// Base of every error the pipeline raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Storage I/O failed; the operation that raised it left no partial output.
class StorageError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace polemos
