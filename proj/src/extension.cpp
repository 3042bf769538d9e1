#include "slicereg/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "slicereg/error.hpp"

namespace slicereg {

namespace {

constexpr double kSameUnit = 1e-14;

double dot4(const Quaternion& a, const Quaternion& b) { return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z; }

/// +1 if f lives on the slice of U read in U's orientation, -1 if stored on -U.
double orientation(const HoloSliceFunction& f, const UnitImaginary& U) {
  if (f.unit().distance(U) < kSameUnit) return 1.0;
  if (f.unit().distance(-U) < kSameUnit) return -1.0;
  throw Error(ErrorKind::Parameter, "slice function does not live on the requested slice");
}

}  // namespace

Stem rep_coeffs(const Quaternion& fJ, const Quaternion& fK, const UnitImaginary& J, const UnitImaginary& K) {
  if (J.distance(K) < kSameUnit) throw Error(ErrorKind::DegeneratePair, "representation needs two distinct units");
  const Quaternion inv = inverse(J.q() - K.q());
  return {inv * (J.q() * fJ - K.q() * fK), inv * (fJ - fK)};
}

Quaternion rep_eval(const Quaternion& b, const Quaternion& c, const UnitImaginary& I) { return b + I.q() * c; }

// ---------------------------------------------------------------------------
// Extension formula

ExtensionFormula::ExtensionFormula(HoloSliceFunction r, const UnitImaginary& J, HoloSliceFunction s,
                                   const UnitImaginary& K, const ExtensionOptions& opts)
    : r_(std::move(r)), s_(std::move(s)), J_(J), K_(K) {
  if (J.distance(K) < kSameUnit) throw Error(ErrorKind::DegeneratePair, "extension formula needs J != K");
  orientation(r_, J_);
  orientation(s_, K_);
  inv_ = inverse(J_.q() - K_.q());
  const int n = std::max(2, opts.real_samples);
  for (int k = 0; k < n; ++k) {
    const double x = opts.real_xmin + (opts.real_xmax - opts.real_xmin) * k / (n - 1);
    if (!r_.contains(x, 0.0) || !s_.contains(x, 0.0)) continue;
    mismatch_ = std::max(mismatch_, (r_.eval(x, 0.0) - s_.eval(x, 0.0)).norm());
  }
  if (mismatch_ > opts.real_tol) {
    throw Error(ErrorKind::IncompatiblePair, "r and s disagree on the real axis by " + std::to_string(mismatch_));
  }
}

bool ExtensionFormula::contains(double x, double y) const {
  if (y < 0.0) return false;
  return r_.contains(x, orientation(r_, J_) * y) && s_.contains(x, orientation(s_, K_) * y);
}

Stem ExtensionFormula::coeffs(double x, double y) const {
  if (y < 0.0) throw Error(ErrorKind::Precondition, "extension formula is only defined for y >= 0");
  if (y == 0.0) return {r_.eval(x, 0.0), Quaternion()};
  const double sr = orientation(r_, J_), ss = orientation(s_, K_);
  if (!r_.contains(x, sr * y)) throw Error(ErrorKind::OutOfDomain, "x + yJ is outside the domain of r");
  const Quaternion rJ = r_.eval(x, sr * y);
  const Quaternion sK = s_.eval(x, ss * y);
  return {inv_ * (J_.q() * rJ - K_.q() * sK), inv_ * (rJ - sK)};
}

Quaternion ExtensionFormula::operator()(double x, double y, const UnitImaginary& I) const {
  return rep_eval(coeffs(x, y), I);
}

Quaternion ExtensionFormula::eval(const SliceCoord& target) const {
  return (*this)(target.x, target.y, target.unit.value_or(J_));
}

Quaternion extension_formula(const HoloSliceFunction& r, const UnitImaginary& J, const HoloSliceFunction& s,
                             const UnitImaginary& K, const SliceCoord& target, const ExtensionOptions& opts) {
  return ExtensionFormula(r, J, s, K, opts).eval(target);
}

// ---------------------------------------------------------------------------
// Regular extension

StemPair regular_ext(const HoloSliceFunction& fI, DomainPtr domain, const SphereSample* check) {
  const UnitImaginary I = fI.unit();
  if (domain) {
    const SphereSample fallback = SphereSample::fibonacci(16, {I});
    const Verdict v = is_symmetric(*domain, check ? *check : fallback);
    if (!v.yes()) throw Error(ErrorKind::Precondition, "regular extension needs a symmetric domain");
  }
  StemPair out;
  out.domain = domain;
  out.coeffs = [fI, I](double x, double y) -> Stem {
    if (y == 0.0) return {fI.eval(x, 0.0), Quaternion()};
    return rep_coeffs(fI.eval(x, y), fI.eval(x, -y), I, -I);
  };
  return out;
}

// ---------------------------------------------------------------------------
// Tubes

TubeDomain::TubeDomain(const UnitImaginary& carrier, Polyline path, double epsilon, double h)
    : carrier_(carrier), path_(std::move(path)), epsilon_(epsilon) {
  if (path_.empty()) throw Error(ErrorKind::Parameter, "tube needs a non-empty path");
  if (!(epsilon_ > 0.0)) throw Error(ErrorKind::Parameter, "tube radius must be positive");
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  for (const auto& p : path_) {
    y_ref_ = std::max(y_ref_, p.y);
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
  }
  if (y_ref_ > 0.0 && epsilon_ >= y_ref_) throw Error(ErrorKind::Parameter, "tube radius must be below |im q0|");
  const double extent = std::max(xmax - xmin + 2.0 * epsilon_, y_ref_ + epsilon_);
  if (!(h > 0.0)) h = std::min(0.01, epsilon_ / 8.0);
  h = std::max(h, extent / 1200.0);
  DomainSpec s;
  s.name = "tube";
  auto self = std::make_shared<const TubeDomain>(*this);
  s.member = [self](double x, double y, const UnitImaginary& J) { return self->contains(slice_point(x, y, J)); };
  s.real_trace = [self](double x) { return self->contains(Quaternion(x)); };
  s.cell_member = [self](double x, double y, double r, const UnitImaginary& J) {
    return self->contains_within(slice_point(x, y, J), r);
  };
  s.bbox = {xmin - epsilon_, xmax + epsilon_, 0.0, y_ref_ + epsilon_};
  s.h = h;
  spec_ = std::make_shared<const DomainSpec>(std::move(s));
}

double TubeDomain::radius_at(double y) const {
  if (y == 0.0) return epsilon_;
  return epsilon_ * y / y_ref_;
}

bool TubeDomain::contains(const Quaternion& q) const { return contains_within(q, 0.0); }

bool TubeDomain::contains_within(const Quaternion& q, double delta) const {
  const double reach = epsilon_ + delta;
  const double reach2 = reach * reach;
  const double k = y_ref_ > 0.0 ? epsilon_ / y_ref_ : 0.0;
  for (std::size_t s = 0; s < path_.size(); ++s) {
    const Point2 a = path_[s];
    const Quaternion A = slice_point(a.x, a.y, carrier_);
    if (a.y == 0.0 && (q - A).norm2() < reach2) return true;
    if (s + 1 == path_.size()) break;
    const Point2 b = path_[s + 1];
    const Quaternion B = slice_point(b.x, b.y, carrier_);
    const Quaternion d0 = q - A, d1 = A - B;
    if (a.y == 0.0 && b.y == 0.0) {
      // Real segment: balls of radius eps around each of its points.
      const double len2 = d1.norm2();
      const double t = len2 > 0.0 ? std::clamp(-dot4(d0, d1) / len2, 0.0, 1.0) : 0.0;
      if ((d0 + t * d1).norm2() < reach2) return true;
      continue;
    }
    // g(t) = |d0 + t d1|^2 - (k y(t) + delta)^2 with y(t) = a.y + t (b.y - a.y); member iff min g < 0.
    const double alpha = k * a.y + delta, beta = k * (b.y - a.y);
    const double qa = d1.norm2() - beta * beta;
    const double qb = 2.0 * dot4(d0, d1) - 2.0 * alpha * beta;
    const double qc = d0.norm2() - alpha * alpha;
    double best = std::min(qc, qa + qb + qc);
    if (qa > 0.0) {
      const double t = -qb / (2.0 * qa);
      if (t > 0.0 && t < 1.0) best = std::min(best, qc - qb * qb / (4.0 * qa));
    }
    if (best < 0.0) return true;
  }
  return false;
}

std::optional<std::string> tube_path_violation(const Polyline& path, const UnitImaginary& J0, const DomainSpec& Y) {
  if (path.empty()) return "path is empty";
  int first_real = -1, last_real = -1;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k].y < 0.0) return "path leaves the closed upper half-slice";
    if (path[k].y == 0.0) {
      if (first_real < 0) first_real = static_cast<int>(k);
      last_real = static_cast<int>(k);
    }
  }
  if (first_real < 0) return "path does not meet the real axis";
  for (int k = first_real; k <= last_real; ++k) {
    if (path[static_cast<std::size_t>(k)].y != 0.0) return "intersection with the real axis is not an interval";
  }
  const auto cuts = Y.cuts_upper(J0);
  const double step = 0.5 * Y.h;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Point2 a = path[k];
    const Point2 b = k + 1 < path.size() ? path[k + 1] : a;
    const int n = std::max(1, static_cast<int>(std::ceil(length(b - a) / step)));
    for (int s = 0; s <= n; ++s) {
      const double t = static_cast<double>(s) / n;
      const Point2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      const bool inside = p.y == 0.0 ? Y.real_trace(p.x) : Y.member(p.x, p.y, J0);
      if (!inside) return "path leaves the domain";
    }
    if (k + 1 < path.size() && segment_crosses_any(a, b, cuts)) return "path crosses a cut of the domain";
  }
  return std::nullopt;
}

TubeBuild build_tube(const Polyline& path, const UnitImaginary& J0, const DomainSpec& Y, double shrink,
                     const SphereSample* check) {
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error(ErrorKind::Parameter, "shrink must lie in (0, 1)");
  if (auto bad = tube_path_violation(path, J0, Y)) throw Error(ErrorKind::Precondition, "tube path: " + *bad);
  double y_ref = 0.0;
  for (const auto& p : path) y_ref = std::max(y_ref, p.y);
  const double diag = std::hypot(Y.bbox.xmax - Y.bbox.xmin, Y.bbox.ymax - Y.bbox.ymin);
  double best = y_ref > 0.0 ? y_ref : diag;
  const double step = 0.5 * Y.h;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Point2 a = path[k];
    const Point2 b = k + 1 < path.size() ? path[k + 1] : a;
    const int n = std::max(1, static_cast<int>(std::ceil(length(b - a) / step)));
    for (int s = 0; s < n || (s == n && k + 1 == path.size()); ++s) {
      const double t = static_cast<double>(s) / n;
      const Quaternion q = slice_point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), J0);
      best = std::min(best, boundary_distance(Y, q, best));
      if (!(best > 1e-12)) {
        const Point2 at{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        throw Error(ErrorKind::Geometry, "tube radius underflow: the path touches the boundary near (" +
                                             std::to_string(at.x) + ", " + std::to_string(at.y) + ")");
      }
    }
  }
  const double eps = shrink * best;
  TubeDomain tube(J0, path, eps, std::min(Y.h, eps / 8.0));
  const SphereSample fallback = SphereSample::fibonacci(16, {J0});
  Verdict v = is_slice_domain(*tube.spec(), check ? *check : fallback);
  return {std::move(tube), best, std::move(v)};
}

}  // namespace slicereg
