#pragma once

#include <stdexcept>
#include <string>

namespace slicereg {

enum class ErrorKind {
  NonInvertible,
  DegeneratePair,
  OutOfDomain,
  DisconnectedDomain,
  Stencil,
  Parameter,
  Precondition,
  Geometry,
  IncompatiblePair,
  Path,
  Inconsistency,
  Input,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace slicereg
