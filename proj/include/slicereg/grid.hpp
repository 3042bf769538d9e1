#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "slicereg/geometry.hpp"

namespace slicereg {

/// Cell-centred raster aligned to the lattice hZ^2: cell (i, j) has centre
/// ((i + i0) h, (j + j0) h), so the real axis y = 0 is an exact row whenever it is covered.
struct GridFrame {
  double h = 0.01;
  long i0 = 0;
  long j0 = 0;
  int nx = 0;
  int ny = 0;

  static GridFrame covering(double xmin, double xmax, double ymin, double ymax, double h);

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  int col(std::size_t idx) const { return static_cast<int>(idx % nx); }
  int row(std::size_t idx) const { return static_cast<int>(idx / nx); }
  double cx(int i) const { return static_cast<double>(i + i0) * h; }
  double cy(int j) const { return static_cast<double>(j + j0) * h; }
  Point2 center(std::size_t idx) const { return {cx(col(idx)), cy(row(idx))}; }
  /// Row index of y = 0, if covered.
  std::optional<int> real_row() const;
  /// Cell whose centre is nearest to p, if inside the frame.
  std::optional<std::size_t> cell_of(Point2 p) const;
};

/// Marks every cell touched by the polylines plus its 8-neighbourhood.
void rasterize_cuts(const GridFrame& frame, const std::vector<Polyline>& cuts,
                    std::vector<std::uint8_t>& blocked);

struct ComponentLabels {
  int count = 0;
  std::vector<int> labels;  // -1 for unoccupied cells, else 0..count-1
  std::vector<std::size_t> sizes;
};

/// Occupancy raster of a planar region (a slice, half-slice or Omega_{J,K}^+).
struct PlanarRegionGrid {
  GridFrame frame;
  std::vector<std::uint8_t> occupied;

  std::size_t occupied_count() const;
  bool occupied_at(Point2 p) const;
};

/// 4-connected flood-fill labelling.
ComponentLabels connected_components(const PlanarRegionGrid& grid);

/// Shortest 4-connected path of occupied cells from `start` to the first cell
/// accepted by `goal`, or nullopt.
std::optional<std::vector<std::size_t>> bfs_path(const PlanarRegionGrid& grid, std::size_t start,
                                                 const std::function<bool(std::size_t)>& goal);

}  // namespace slicereg
