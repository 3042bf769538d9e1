#include "slicereg/quaternion.hpp"

#include <algorithm>

#include "slicereg/error.hpp"

namespace slicereg {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonInvertible: return "non-invertible";
    case ErrorKind::DegeneratePair: return "degenerate-pair";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::DisconnectedDomain: return "disconnected-domain";
    case ErrorKind::Stencil: return "stencil";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::IncompatiblePair: return "incompatible-pair";
    case ErrorKind::Path: return "path";
    case ErrorKind::Inconsistency: return "inconsistency";
    case ErrorKind::Input: return "input";
  }
  return "unknown";
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '[' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ']';
}

Quaternion inverse(const Quaternion& q) {
  const double n2 = q.norm2();
  if (n2 == 0.0) {
    throw Error(ErrorKind::NonInvertible, "zero quaternion has no inverse");
  }
  return q.conj() / n2;
}

UnitImaginary::UnitImaginary(double vx, double vy, double vz) {
  const double n = std::sqrt(vx * vx + vy * vy + vz * vz);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::Parameter, "imaginary unit needs a nonzero finite direction");
  }
  v_ = {vx / n, vy / n, vz / n};
}

UnitImaginary UnitImaginary::operator-() const {
  UnitImaginary u;
  u.v_ = {-v_[0], -v_[1], -v_[2]};
  return u;
}

double UnitImaginary::distance(const UnitImaginary& o) const {
  const double dx = v_[0] - o.v_[0];
  const double dy = v_[1] - o.v_[1];
  const double dz = v_[2] - o.v_[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double UnitImaginary::angle(const UnitImaginary& o) const {
  // atan2 form keeps precision for nearly (anti)parallel units.
  const double cx = v_[1] * o.v_[2] - v_[2] * o.v_[1];
  const double cy = v_[2] * o.v_[0] - v_[0] * o.v_[2];
  const double cz = v_[0] * o.v_[1] - v_[1] * o.v_[0];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot(o));
}

UnitImaginary UnitImaginary::rotated_toward(const UnitImaginary& toward, double angle,
                                            const UnitImaginary& fallback) const {
  auto perp = [this](const UnitImaginary& t) {
    const double d = dot(t);
    return std::array<double, 3>{t.v_[0] - d * v_[0], t.v_[1] - d * v_[1], t.v_[2] - d * v_[2]};
  };
  auto u = perp(toward);
  double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  if (n < 1e-8) {
    u = perp(fallback);
    n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  }
  if (n < 1e-8) {
    throw Error(ErrorKind::Parameter, "rotation target and fallback both parallel to the unit");
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle) / n;
  return {c * v_[0] + s * u[0], c * v_[1] + s * u[1], c * v_[2] + s * u[2]};
}

std::ostream& operator<<(std::ostream& os, const UnitImaginary& u) {
  return os << '[' << u.vx() << ", " << u.vy() << ", " << u.vz() << ']';
}

SliceCoord::SliceCoord(double x_, double y_, const UnitImaginary& J) : x(x_), y(y_), unit(J) {
  if (y < 0.0) {
    y = -y;
    unit = -J;
  } else if (y == 0.0) {
    unit.reset();
  }
}

Quaternion SliceCoord::to_quaternion() const {
  if (!unit || y == 0.0) return Quaternion(x);
  return slice_point(x, y, *unit);
}

SliceCoord slice_decompose(const Quaternion& q) {
  const double y = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  if (y == 0.0) return SliceCoord::real(q.w);
  return SliceCoord(q.w, y, UnitImaginary(q.x / y, q.y / y, q.z / y));
}

std::pair<Quaternion, Quaternion> coefficient_identities(const UnitImaginary& J,
                                                         const UnitImaginary& K) {
  if (J == K) {
    throw Error(ErrorKind::DegeneratePair, "coefficient identities need J != K");
  }
  const Quaternion inv = inverse(J.q() - K.q());
  return {inv * J.q() + J.q() * inv, inv * K.q() + J.q() * inv};
}

}  // namespace slicereg
