#pragma once

#include <stdexcept>
#include <string>

namespace ipomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input data, bad configuration or a violated precondition.
class InputError : public Error {
public:
  using Error::Error;
};

/// The model client could not produce a response (transport or protocol).
class ClientError : public Error {
public:
  using Error::Error;
};

} // namespace ipomp
