#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slicereg/geometry.hpp"
#include "slicereg/grid.hpp"
#include "slicereg/quaternion.hpp"

namespace slicereg {

/// Slice-parameterized membership oracle for an open subset of H.
///
/// `member(x, y, J)` answers for the point x + yJ with y > 0; `real_trace(x)`
/// answers on the real axis. Cut curves are planar polylines in half-slice
/// coordinates: `axial_cuts` are the same in every L_J^+, `slice_cuts(J)` may
/// depend on J. Rasterization blocks the cells they touch (dilated by one cell).
struct DomainSpec {
  std::string name;
  std::function<bool(double x, double y, const UnitImaginary& J)> member;
  std::function<bool(double x)> real_trace;
  std::vector<Polyline> axial_cuts;
  std::function<std::vector<Polyline>(const UnitImaginary&)> slice_cuts;
  /// Optional Euclidean distance from a point of H to the union of all cut curves.
  std::function<double(const Quaternion&)> cut_distance;
  /// Optional: whether the disk of radius r around x + yJ (any real y) meets the set.
  /// When present, rasterization marks every cell this disk test accepts, which keeps
  /// necks thinner than a cell connected.
  std::function<bool(double x, double y, double r, const UnitImaginary& J)> cell_member;
  /// [xmin, xmax] x [0, ymax]
  Box2 bbox{-1.0, 1.0, 0.0, 1.0};
  double h = 0.01;

  /// Membership of x + yJ for any real y (y < 0 means x + |y|(-J)).
  bool contains(double x, double y, const UnitImaginary& J) const;
  bool contains(const Quaternion& q) const;
  /// Axial plus slice cuts of L_J^+.
  std::vector<Polyline> cuts_upper(const UnitImaginary& J) const;
  bool has_cuts() const { return !axial_cuts.empty() || static_cast<bool>(slice_cuts); }
};

using DomainPtr = std::shared_ptr<const DomainSpec>;

/// Euclidean ball B(center, radius). With `wedge_axis`, only half-slices whose
/// unit lies within `wedge_angle` of the axis are kept (the real trace is kept whole).
DomainSpec make_ball(const Quaternion& center, double radius,
                     std::optional<UnitImaginary> wedge_axis = std::nullopt, double wedge_angle = 0.0);
/// {x + yJ : a x + b y < c} in every half-slice; symmetric.
DomainSpec make_halfspace_slicewise(double a, double b, double c, Box2 bbox);
/// J-independent planar predicate (symmetric by construction).
DomainSpec make_slicewise(std::string name, std::function<bool(double, double)> planar, Box2 bbox);

enum class BooleanOp { Union, Intersection, Difference };
DomainSpec make_boolean(BooleanOp op, DomainPtr a, DomainPtr b);

/// Fibonacci lattice of N units, optional pinned units first, antipodes appended.
/// units[i + base_count()] == -units[i].
class SphereSample {
 public:
  static SphereSample fibonacci(int n, const std::vector<UnitImaginary>& pinned = {});

  const std::vector<UnitImaginary>& units() const { return units_; }
  std::size_t size() const { return units_.size(); }
  std::size_t base_count() const { return units_.size() / 2; }
  int requested() const { return requested_; }
  std::size_t antipode(std::size_t i) const { return (i + base_count()) % size(); }
  double min_angle() const { return min_angle_; }

  /// Separation constant: min pairwise angle >= kSeparation / sqrt(N).
  static constexpr double kSeparation = 0.25;

 private:
  std::vector<UnitImaginary> units_;
  int requested_ = 0;
  double min_angle_ = 0.0;
};

enum class SliceExtent {
  UpperHalf,  ///< rows y > 0 of L_J^+
  Full,       ///< the whole slice L_J: L_J^+, the real row, and L_{-J}^+ reflected
};

PlanarRegionGrid rasterize(const DomainSpec& spec, const UnitImaginary& J,
                           SliceExtent extent = SliceExtent::UpperHalf);
/// Raster of Omega_{J,K}^+ = {x + yJ in Omega_J^+ : x + yK in Omega_K^+}.
PlanarRegionGrid omega_jk_plus(const DomainSpec& spec, const UnitImaginary& J, const UnitImaginary& K);

GridFrame upper_frame(const DomainSpec& spec);
GridFrame full_frame(const DomainSpec& spec);

enum class VerdictKind { Yes, No, Indeterminate };
const char* to_string(VerdictKind kind);

/// Verdicts are resolution-qualified: they hold at sphere sample size N and grid step h.
struct Verdict {
  VerdictKind kind = VerdictKind::Yes;
  std::vector<UnitImaginary> witness_units;
  std::vector<Point2> witness_points;
  int components = 0;
  int samples = 0;
  double h = 0.0;
  std::string detail;

  bool yes() const { return kind == VerdictKind::Yes; }
  bool no() const { return kind == VerdictKind::No; }
  /// e.g. "yes@N=64,h=0.01"
  std::string label() const;
};

Verdict is_slice_domain(const DomainSpec& spec, const SphereSample& sample);
Verdict is_symmetric(const DomainSpec& spec, const SphereSample& sample);
Verdict is_simple(const DomainSpec& spec, const SphereSample& sample);
Verdict is_slice_convex(const DomainSpec& spec, const SphereSample& sample, std::uint64_t seed = 0);

/// membership(x, y, J) := OR over sampled K of spec.member(x, y, K). Axial cuts
/// are kept, J-dependent cuts are dropped (they are excluded pointwise by the oracle).
DomainSpec symmetric_completion(const DomainSpec& spec, const SphereSample& sample);

/// Number of worker threads: SLICEREG_THREADS if set, else hardware concurrency.
unsigned worker_threads();
/// Runs fn(i) for i in [0, n) across worker threads; fn must be safe to call concurrently.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Lower estimate of the Euclidean distance from q to the boundary of the domain:
/// radial probing of the oracle combined with the cut distance.
double boundary_distance(const DomainSpec& spec, const Quaternion& q, double max_radius);

/// Distance from q to the cut curves of a spec (infinity when it has none).
double cut_distance(const DomainSpec& spec, const Quaternion& q);

}  // namespace slicereg
