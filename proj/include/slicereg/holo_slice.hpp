#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "slicereg/domain.hpp"
#include "slicereg/geometry.hpp"
#include "slicereg/grid.hpp"
#include "slicereg/quaternion.hpp"
#include "slicereg/stem.hpp"

namespace slicereg {

using Complex = std::complex<double>;

/// u + vJ
inline Quaternion from_complex(Complex w, const UnitImaginary& J) { return slice_point(w.real(), w.imag(), J); }

/// f(q) = sum (q - x0)^n a_n, powers on the left of the coefficients.
struct PowerSeries {
  double center = 0.0;
  double radius = std::numeric_limits<double>::infinity();
  std::vector<Quaternion> coeffs;

  Quaternion eval(const Quaternion& q) const;
  bool converges_at(const Quaternion& q) const { return (q - Quaternion(center)).norm() < radius; }
};

/// One summand log(z - p) a of a continued logarithm.
struct LogTerm {
  Point2 singularity;
  Quaternion coefficient{1.0};
};

struct ContinuedLogSpec {
  UnitImaginary unit;
  std::vector<LogTerm> terms;
  Point2 base;
  Quaternion base_value;
  /// Curves excluded from the planar domain (both half-planes of L_J).
  std::vector<Polyline> cuts;
  Box2 box{-5.0, 5.0, -5.0, 5.0};
  double h = 0.01;
};

/// z |-> base_value + sum_k (integral from base to z of d zeta / (zeta - p_k)) a_k,
/// continued along paths inside box minus cuts. Branch data is memoized per grid
/// cell at construction, so evaluation is read-only and thread-safe.
class ContinuedLog {
 public:
  explicit ContinuedLog(ContinuedLogSpec spec);

  const ContinuedLogSpec& spec() const { return spec_; }
  const GridFrame& frame() const { return frame_; }
  std::size_t reached_cells() const { return reached_; }

  /// In the box, off every cut and singularity.
  bool contains(Point2 z) const;
  Quaternion eval(Point2 z) const;
  /// Fresh BFS path from z back to the base point (neighbour order 0..3 picks the
  /// tie-breaking), shortcut-smoothed and integrated by quadrature.
  Quaternion eval_by_path_search(Point2 z, int neighbor_order = 0) const;
  /// Per-term integrals of d zeta / (zeta - p_k) along a polyline.
  std::vector<Complex> integrate(const Polyline& path) const;

 private:
  std::vector<Complex> anchor_integrals(std::size_t cell) const;
  bool line_of_sight(Point2 a, Point2 b) const;
  std::optional<std::size_t> anchor_for(Point2 z) const;
  Quaternion combine(const std::vector<Complex>& integrals) const;

  ContinuedLogSpec spec_;
  GridFrame frame_;
  std::vector<Box2> cut_boxes_;
  std::vector<std::uint8_t> blocked_;
  std::vector<std::int16_t> branch_;  // cell-major, one entry per term; kUnreached if not reached
  std::size_t base_cell_ = 0;
  std::size_t reached_ = 0;
};

/// Integral of d zeta / (zeta - p) over the segment [a, b]: 16-point Gauss-Legendre,
/// split so that every piece is at most 0.05 dist(segment, p) long.
Complex log_segment_integral(Point2 a, Point2 b, Point2 p);

/// max over terms of |closed-loop integral of d zeta / (zeta - p_k)|.
double loop_consistency(const ContinuedLog& f, const Polyline& loop);

enum class HoloKind { PowerSeries, ContinuedLog, StemRestriction, Callable };
const char* to_string(HoloKind kind);

/// Quaternion-valued function on a planar slice L_J, evaluated in coordinates
/// (x, y) meaning x + yJ (y of either sign).
class HoloSliceFunction {
 public:
  static HoloSliceFunction power_series(PowerSeries series, const UnitImaginary& J);
  static HoloSliceFunction continued_log(std::shared_ptr<const ContinuedLog> log);
  static HoloSliceFunction stem_restriction(std::shared_ptr<const StemPair> stem, const UnitImaginary& J);
  /// Arbitrary planar function; used for test injections and combined families.
  static HoloSliceFunction callable(const UnitImaginary& J, std::function<Quaternion(double, double)> fn,
                                    std::function<bool(double, double)> domain = nullptr);

  HoloKind kind() const { return kind_; }
  const UnitImaginary& unit() const { return unit_; }
  const PowerSeries* series() const { return series_.get(); }
  const ContinuedLog* log() const { return log_.get(); }

  /// Restricts the function to the slice of an owning domain.
  HoloSliceFunction with_domain(DomainPtr domain) const;

  bool contains(double x, double y) const;
  Quaternion eval(double x, double y) const;
  /// Point of the slice given as x + yK with K = +-J (or real).
  Quaternion eval(const SliceCoord& z) const;
  Quaternion operator()(double x, double y) const { return eval(x, y); }

 private:
  HoloKind kind_ = HoloKind::Callable;
  UnitImaginary unit_;
  std::shared_ptr<const PowerSeries> series_;
  std::shared_ptr<const ContinuedLog> log_;
  std::shared_ptr<const StemPair> stem_;
  std::function<Quaternion(double, double)> fn_;
  std::function<bool(double, double)> fn_domain_;
  DomainPtr domain_;
};

/// |1/2 (d/dx f + J d/dy f)| by central differences of step h at x + yJ.
double dbar_residual(const HoloSliceFunction& f, double x, double y, double h);
double dbar_residual(const HoloSliceFunction& f, const SliceCoord& z, double h);

/// A function given slice by slice: J |-> HoloSliceFunction on L_J. Slices are built
/// on demand and cached; safe to share between threads.
class SliceFamily {
 public:
  using Factory = std::function<HoloSliceFunction(const UnitImaginary&)>;
  explicit SliceFamily(Factory make, std::string name = "family");

  const HoloSliceFunction& at(const UnitImaginary& J) const;
  /// f(x + yJ) read on the slice of J.
  Quaternion eval(double x, double y, const UnitImaginary& J) const { return at(J).eval(x, y); }
  Quaternion eval(const Quaternion& q) const;
  const std::string& name() const { return name_; }

 private:
  Factory make_;
  std::string name_;
  mutable std::mutex mutex_;
  mutable std::map<std::array<double, 3>, std::shared_ptr<const HoloSliceFunction>> cache_;
};

using FamilyPtr = std::shared_ptr<const SliceFamily>;

FamilyPtr polynomial_family(const PowerSeries& series);

}  // namespace slicereg
