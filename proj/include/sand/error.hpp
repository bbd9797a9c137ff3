#pragma once

#include <stdexcept>
#include <string>

namespace sand {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two points closer than the minimum sender/receiver separation.
class DegenerateDistance : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A detector pointed to a set that is not conflict-free for the node.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sand
