#ifndef CHANEST_ERRORS_HPP
#define CHANEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chanest {

/// A density matrix or Bloch vector that does not describe a quantum state.
class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Out-of-range parameters, bad resolutions, mismatched protocol/channel pairs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Outcome tallies that cannot have come from the given protocol.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested evaluation route does not exist for this cost/protocol.
class UnsupportedMethod : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chanest

#endif  // CHANEST_ERRORS_HPP
