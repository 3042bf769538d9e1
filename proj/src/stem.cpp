#include "slicereg/stem.hpp"

#include "slicereg/error.hpp"

namespace slicereg {

Quaternion StemPair::eval(double x, double y, const UnitImaginary& I) const {
  if (!coeffs) throw Error(ErrorKind::Parameter, "stem pair has no coefficient function");
  if (y >= 0.0) {
    const Stem s = coeffs(x, y);
    return s.b + I.q() * s.c;
  }
  const Stem s = coeffs(x, -y);
  return s.b - I.q() * s.c;
}

Quaternion StemPair::eval(const Quaternion& q) const {
  const SliceCoord z = slice_decompose(q);
  return eval(z.x, z.y, z.unit.value_or(UnitImaginary::i()));
}

bool StemPair::contains(double x, double y, const UnitImaginary& I) const {
  return !domain || domain->contains(x, y, I);
}

}  // namespace slicereg
