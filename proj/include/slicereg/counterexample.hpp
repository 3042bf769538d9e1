#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "slicereg/domain.hpp"
#include "slicereg/extension.hpp"
#include "slicereg/holo_slice.hpp"

namespace slicereg {

/// The slice domain built from a fixed unit I0, inside the window
/// (xmin, xmax) x [0, ymax) of every half-slice: L_J^+ minus the
/// half-line (-inf, -2) + 2J and an arc a_J from 2J to -2 + 2J inside the disk
/// D_J = {|z + 1 - 2J| <= 1}, bent from the upper half circle (J = I0) to the
/// lower one (|J - I0| >= 1).
struct CounterexampleConfig {
  UnitImaginary I0;
  double h = 0.01;
  Box2 bbox{-5.0, 5.0, 0.0, 5.0};
  /// Arc polyline vertices (t = k / (2 (n - 1))); odd so that t = 1/4 is a vertex.
  int arc_points = 257;
  /// Grid step of the logarithm continuation fields.
  double log_h = 0.02;
};

/// min(|J - I0|, 1)
double t_of(const UnitImaginary& J, const CounterexampleConfig& cfg);
/// -1 + 2J + (1 - T) e^{2 pi J t} + T e^{-2 pi J t}, t in [0, 1/2].
Quaternion arc_point(const UnitImaginary& J, double t, const CounterexampleConfig& cfg);
/// The same point in coordinates of L_J: (-1 + cos 2 pi t, 2 + (1 - 2T) sin 2 pi t).
Point2 arc_planar(const UnitImaginary& J, double t, const CounterexampleConfig& cfg);
Polyline arc_polyline(const UnitImaginary& J, const CounterexampleConfig& cfg);
/// The half-line y = 2, x < -2, clipped just outside the bounding box.
Polyline half_line(const CounterexampleConfig& cfg);
/// Which endpoint the arc parameter starts from.
std::string arc_orientation();

DomainSpec omega_spec(const CounterexampleConfig& cfg);

/// Cuts of the full slice L_{I0} (upper half of I0, reflected upper half of -I0).
std::vector<Polyline> t_cuts(const CounterexampleConfig& cfg);

struct RSPair {
  /// log(z - 2 I0) on T, based at 1 + 2 I0 with value 0.
  HoloSliceFunction r;
  /// The same germ continued on U = conj(T), stored on L_{I0}; U is read from L_{-I0}.
  HoloSliceFunction s;
};
RSPair r_s_functions(const CounterexampleConfig& cfg);

/// Per-slice G_J = L1 (1 - J I0)/2 + L2 (1 + J I0)/2 with L1 = log(z - 2J), L2 = log(z + 2J)
/// continued through the full slice from the real point 1 (principal values there).
FamilyPtr g_family(const CounterexampleConfig& cfg);

struct JumpStats {
  std::size_t disk_cells = 0;
  std::size_t disk_hits = 0;     ///< cells with ||r - s| - 2 pi| <= 1e-6
  double disk_fraction = 0.0;
  double disk_min = 0.0;
  double disk_max = 0.0;
  int sign = 0;                  ///< sign of (r - s) / (2 pi I0) in the disk
  std::size_t other_cells = 0;
  double other_max = 0.0;        ///< max |r - s| on the other two components
};

struct OrderingStats {
  std::size_t inside_samples = 0;
  std::size_t outside_samples = 0;
  double jump_on_I0 = 0.0;       ///< |f1 - f2| on the slice of I0 inside the disk (min over samples)
  double jump_on_I0_max = 0.0;
  double law_error = 0.0;        ///< max ||f1 - f2| - pi |I0 + I'|| inside
  double outside_max = 0.0;      ///< max |f1 - f2| outside the completed disk
};

struct CounterexampleReport {
  CounterexampleConfig cfg;
  Verdict slice_domain;
  int tu_components = 0;
  std::vector<std::size_t> tu_sizes;
  int omega_pair_components = 0;
  bool omega_pair_geometry = false;
  JumpStats jump;
  OrderingStats orderings;
  Verdict simple;
  bool simple_witness_antipodal = false;
  bool passed = false;

  PlanarRegionGrid slice_grid;
  PlanarRegionGrid tu_grid;
  ComponentLabels tu_labels;
  PlanarRegionGrid omega_pair_grid;
  ComponentLabels omega_pair_labels;
  /// (x, y, |r - s|) on T intersect U, subsampled.
  std::vector<std::array<double, 3>> heat;
};

struct DemonstrateOptions {
  int samples = 64;
  std::uint64_t seed = 0;
  /// Cap on evaluated cells per component for the jump statistics.
  std::size_t max_cells = 40000;
  bool check_slice_domain = true;
};

CounterexampleReport demonstrate(const CounterexampleConfig& cfg, const DemonstrateOptions& opts = {});

/// Raster of T intersect U in the full slice of I0.
PlanarRegionGrid t_cap_u_grid(const CounterexampleConfig& cfg);

}  // namespace slicereg
