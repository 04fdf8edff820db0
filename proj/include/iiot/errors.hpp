#pragma once

#include <stdexcept>

namespace iiot {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation invoked before its precondition holds (e.g. grace period not over).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class RegistrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ElectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ledger failed its structural checks and refuses the operation.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command-line usage; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iiot
