#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <utility>

namespace slicereg {

/// Element of H with basis 1, i, j, k and the right-handed convention ij = k.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_) : w(w_) {}  // NOLINT: reals embed implicitly
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quaternion i() { return {0, 1, 0, 0}; }
  static constexpr Quaternion j() { return {0, 0, 1, 0}; }
  static constexpr Quaternion k() { return {0, 0, 0, 1}; }

  constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  constexpr double real() const { return w; }
  constexpr bool is_real() const { return x == 0.0 && y == 0.0 && z == 0.0; }

  constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }

  friend constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
  friend constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
  friend constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
  friend constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
  friend constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

  friend constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) {
    return {p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w};
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

inline Quaternion mul(const Quaternion& p, const Quaternion& q) { return p * q; }

/// conj(q)/|q|^2; throws Error(NonInvertible) on zero.
Quaternion inverse(const Quaternion& q);

/// Vector part of q.
constexpr Quaternion im(const Quaternion& q) { return {0.0, q.x, q.y, q.z}; }

/// A point of the sphere S of imaginary units. Stored as a 3-vector so that
/// |I| = 1 holds structurally; the constructor normalizes.
class UnitImaginary {
 public:
  /// Defaults to i.
  UnitImaginary() = default;
  UnitImaginary(double vx, double vy, double vz);
  explicit UnitImaginary(const std::array<double, 3>& v) : UnitImaginary(v[0], v[1], v[2]) {}

  static UnitImaginary i() { return {1, 0, 0}; }
  static UnitImaginary j() { return {0, 1, 0}; }
  static UnitImaginary k() { return {0, 0, 1}; }

  double vx() const { return v_[0]; }
  double vy() const { return v_[1]; }
  double vz() const { return v_[2]; }
  const std::array<double, 3>& vec() const { return v_; }

  Quaternion q() const { return {0.0, v_[0], v_[1], v_[2]}; }
  UnitImaginary operator-() const;

  double dot(const UnitImaginary& o) const {
    return v_[0] * o.v_[0] + v_[1] * o.v_[1] + v_[2] * o.v_[2];
  }
  /// Quaternionic distance |J - K|.
  double distance(const UnitImaginary& o) const;
  /// Angle between the two units in [0, pi].
  double angle(const UnitImaginary& o) const;

  /// Rotates this unit by `angle` radians in the plane spanned by itself and `toward`.
  /// Falls back to `fallback` when `toward` is (anti)parallel.
  UnitImaginary rotated_toward(const UnitImaginary& toward, double angle,
                               const UnitImaginary& fallback) const;

  friend bool operator==(const UnitImaginary&, const UnitImaginary&) = default;

 private:
  std::array<double, 3> v_{1.0, 0.0, 0.0};
};

std::ostream& operator<<(std::ostream& os, const UnitImaginary& u);

/// Point x + yJ with y >= 0. `unit` is meaningless (and unset) on the real axis.
struct SliceCoord {
  double x = 0.0;
  double y = 0.0;
  std::optional<UnitImaginary> unit;

  SliceCoord() = default;
  SliceCoord(double x_, double y_, const UnitImaginary& J);
  static SliceCoord real(double x_) {
    SliceCoord c;
    c.x = x_;
    return c;
  }

  bool is_real_point() const { return y == 0.0; }
  Quaternion to_quaternion() const;
};

/// x + yJ for any real y (no canonicalization).
inline Quaternion slice_point(double x, double y, const UnitImaginary& J) {
  return {x, y * J.vx(), y * J.vy(), y * J.vz()};
}

SliceCoord slice_decompose(const Quaternion& q);

/// ((J-K)^{-1}J + J(J-K)^{-1}, (J-K)^{-1}K + J(J-K)^{-1}); both are (1, 0) in exact arithmetic.
std::pair<Quaternion, Quaternion> coefficient_identities(const UnitImaginary& J,
                                                         const UnitImaginary& K);

/// Complex number a + b*J embedded in the slice L_J.
inline Quaternion in_slice(double a, double b, const UnitImaginary& J) { return slice_point(a, b, J); }

}  // namespace slicereg
