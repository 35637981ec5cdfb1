#pragma once

#include <stdexcept>
#include <string>

namespace bestest {

// Base of every exception thrown by the library. Each module derives its own
// type carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

}  // namespace bestest
