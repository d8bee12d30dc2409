#pragma once

#include <stdexcept>
#include <string>

namespace colorlimits {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when a tree expansion or a branching-process sample exceeds its node budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class NotInvolutionInvariant : public Error {
 public:
  using Error::Error;
};

class InfiniteDegree : public Error {
 public:
  using Error::Error;
};

class NotInMPk : public Error {
 public:
  using Error::Error;
};

class NotSimplifiedUnimodular : public Error {
 public:
  using Error::Error;
};

}  // namespace colorlimits
