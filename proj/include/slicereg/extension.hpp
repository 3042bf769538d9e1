#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "slicereg/domain.hpp"
#include "slicereg/holo_slice.hpp"
#include "slicereg/quaternion.hpp"
#include "slicereg/stem.hpp"

namespace slicereg {

/// b = (J-K)^{-1}[J fJ - K fK], c = (J-K)^{-1}[fJ - fK].
Stem rep_coeffs(const Quaternion& fJ, const Quaternion& fK, const UnitImaginary& J, const UnitImaginary& K);
/// b + I c
Quaternion rep_eval(const Quaternion& b, const Quaternion& c, const UnitImaginary& I);
inline Quaternion rep_eval(const Stem& s, const UnitImaginary& I) { return rep_eval(s.b, s.c, I); }

struct ExtensionOptions {
  /// Real points x_min..x_max (inclusive, `real_samples` of them) used to compare r and s.
  double real_xmin = -5.0;
  double real_xmax = 5.0;
  int real_samples = 65;
  double real_tol = 1e-9;
};

/// r on T in L_J and s on U in L_K combined into
/// f(x + yI) = (J-K)^{-1}[J r(x+yJ) - K s(x+yK)] + I (J-K)^{-1}[r(x+yJ) - s(x+yK)], y >= 0.
/// r and s may be stored on L_{-J} / L_{-K}; they are read at the points x + yJ, x + yK.
class ExtensionFormula {
 public:
  ExtensionFormula(HoloSliceFunction r, const UnitImaginary& J, HoloSliceFunction s, const UnitImaginary& K,
                   const ExtensionOptions& opts = {});

  const UnitImaginary& J() const { return J_; }
  const UnitImaginary& K() const { return K_; }
  /// Largest |r(x) - s(x)| seen on the sampled real points.
  double real_trace_mismatch() const { return mismatch_; }

  bool contains(double x, double y) const;
  Stem coeffs(double x, double y) const;
  Quaternion operator()(double x, double y, const UnitImaginary& I) const;
  Quaternion eval(const SliceCoord& target) const;

 private:
  HoloSliceFunction r_, s_;
  UnitImaginary J_, K_;
  Quaternion inv_;  // (J - K)^{-1}
  double mismatch_ = 0.0;
};

Quaternion extension_formula(const HoloSliceFunction& r, const UnitImaginary& J, const HoloSliceFunction& s,
                             const UnitImaginary& K, const SliceCoord& target, const ExtensionOptions& opts = {});

/// Stem pair of the regular extension of a function given on one slice L_I of a
/// symmetric domain: (b, c) = rep_coeffs(fI(x + yI), fI(x - yI), I, -I), (fI(x), 0) on R.
/// With `domain`, symmetry is checked on `check` (default: 16 Fibonacci units).
StemPair regular_ext(const HoloSliceFunction& fI, DomainPtr domain = nullptr,
                     const SphereSample* check = nullptr);

/// Union of balls B(p, (|im p| / Y0) eps) over p in C minus R and B(p, eps) over p in C
/// intersected with R, for a polyline C in the closed upper half of L_{J0}.
class TubeDomain {
 public:
  /// h is the grid step of the attached spec (0: epsilon / 8, at most 0.01).
  TubeDomain(const UnitImaginary& carrier, Polyline path, double epsilon, double h = 0.0);

  const UnitImaginary& carrier() const { return carrier_; }
  const Polyline& path() const { return path_; }
  double epsilon() const { return epsilon_; }
  /// Y0 = max over C of |im p|.
  double y_ref() const { return y_ref_; }

  bool contains(const Quaternion& q) const;
  /// Membership in the open delta-neighbourhood of the tube.
  bool contains_within(const Quaternion& q, double delta) const;
  bool contains(double x, double y, const UnitImaginary& J) const { return contains(slice_point(x, y, J)); }
  /// Radius of the ball centred at the point of the path with height y.
  double radius_at(double y) const;
  /// The tube as a domain spec (bounding box and grid step attached).
  DomainPtr spec() const { return spec_; }

 private:
  UnitImaginary carrier_;
  Polyline path_;
  double epsilon_;
  double y_ref_ = 0.0;
  DomainPtr spec_;
};

/// Checks the path hypotheses and returns the violated clause, if any.
std::optional<std::string> tube_path_violation(const Polyline& path, const UnitImaginary& J0, const DomainSpec& Y);

struct TubeBuild {
  TubeDomain tube;
  double min_boundary_distance;
  Verdict slice_domain;
};

/// eps = shrink * min(min over C of dist(p, boundary of Y), Y0), then the tube is
/// checked to be a slice domain on `check` (default: 16 units including J0).
TubeBuild build_tube(const Polyline& path, const UnitImaginary& J0, const DomainSpec& Y, double shrink = 0.5,
                     const SphereSample* check = nullptr);

struct LocalExtension {
  UnitImaginary J0;
  UnitImaginary K0;
  Polyline gamma;
  TubeDomain M;
  DomainPtr N;
  TubeDomain Lambda;
  StemPair g;
  double real_error = 0.0;   ///< max |g - f| on sampled real points of N
  double tube_error = 0.0;   ///< max |g - f| on sampled points of Lambda
  std::size_t tube_points = 0;
  bool lambda_is_slice_domain = false;
};

struct LocalExtensionOptions {
  double shrink = 0.5;
  int real_checks = 50;
  int tube_checks = 100;
  int tube_units = 10;
  std::uint64_t seed = 0;
  double real_tol = 1e-9;
  double tube_tol = 1e-8;
};

/// Neighbourhood N of p0 with a slice regular g agreeing with f near the path to R.
LocalExtension local_extend(FamilyPtr f, DomainPtr omega, const SliceCoord& p0,
                            const LocalExtensionOptions& opts = {});

struct CompletionOptions {
  /// Spheres x + y S sampled at lattice points of this step over the bounding box.
  double step = 0.1;
  double tol = 1e-8;
  /// Agreement required between the pairs a unit forms with its nearest neighbours.
  double local_tol = 1e-6;
  int neighbors = 4;
  bool force = false;
};

struct SphereConsistency {
  double x = 0.0;
  double y = 0.0;
  std::size_t units_in_domain = 0;
  std::size_t resolved_units = 0;
  /// max over resolved units of |b_J - b_ref| + |c_J - c_ref|
  double defect = 0.0;
  /// max over all unordered pairs of |b - b_first| + |c - c_first|
  double all_pairs_spread = 0.0;
  std::vector<UnitImaginary> witnesses;
};

struct CompletionReport {
  std::vector<SphereConsistency> spheres;
  double max_defect = 0.0;
  std::size_t skipped = 0;
  std::size_t over_tolerance = 0;
  double tol = 0.0;
  std::optional<Verdict> simple;
  bool forced = false;
};

struct GlobalExtension {
  StemPair g;
  DomainPtr completion;
  CompletionReport report;
};

/// Stem pair of f on the sampled symmetric completion with the per-sphere consistency defect.
GlobalExtension extend_to_completion(FamilyPtr f, DomainPtr omega, const SphereSample& sample,
                                     const CompletionOptions& opts = {});

}  // namespace slicereg
