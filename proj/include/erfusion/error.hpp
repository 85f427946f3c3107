#pragma once

#include <stdexcept>
#include <string>

namespace erfusion {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating input (corpus, queries, qrels, runs).
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Out-of-range retrieval or fusion parameter.
class ParameterError : public Error {
  public:
    using Error::Error;
};

/// Missing, corrupt or version-mismatched index directory.
class IndexFormatError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace erfusion
