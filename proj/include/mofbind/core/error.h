#pragma once
#include <stdexcept>
#include <string>

namespace mofbind {

/// Malformed textual input (CIF, XYZ, basis, ledger, config).
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied an argument outside the operation's contract.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a usable result.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace mofbind
