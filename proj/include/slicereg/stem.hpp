#pragma once

#include <functional>

#include "slicereg/domain.hpp"
#include "slicereg/quaternion.hpp"

namespace slicereg {

/// Coefficients of f(x + yI) = b + I c at one point (x, y), y >= 0.
struct Stem {
  Quaternion b;
  Quaternion c;
};

/// J-independent data of a slice regular function on a symmetric domain.
struct StemPair {
  std::function<Stem(double x, double y)> coeffs;
  DomainPtr domain;

  /// f(x + yI); y < 0 is read as x + |y|(-I).
  Quaternion eval(double x, double y, const UnitImaginary& I) const;
  Quaternion eval(const Quaternion& q) const;
  bool contains(double x, double y, const UnitImaginary& I) const;
};

}  // namespace slicereg
