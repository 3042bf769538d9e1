#include "slicereg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "slicereg/error.hpp"

namespace slicereg {

GridFrame GridFrame::covering(double xmin, double xmax, double ymin, double ymax, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::Parameter, "grid step h must be positive");
  if (!(xmax > xmin) || !(ymax >= ymin)) throw Error(ErrorKind::Parameter, "empty bounding box");
  GridFrame f;
  f.h = h;
  f.i0 = static_cast<long>(std::ceil(xmin / h - 1e-9));
  f.j0 = static_cast<long>(std::ceil(ymin / h - 1e-9));
  const long i1 = static_cast<long>(std::floor(xmax / h + 1e-9));
  const long j1 = static_cast<long>(std::floor(ymax / h + 1e-9));
  f.nx = static_cast<int>(std::max(0L, i1 - f.i0 + 1));
  f.ny = static_cast<int>(std::max(0L, j1 - f.j0 + 1));
  return f;
}

std::optional<int> GridFrame::real_row() const {
  if (j0 <= 0 && -j0 < ny) return static_cast<int>(-j0);
  return std::nullopt;
}

std::optional<std::size_t> GridFrame::cell_of(Point2 p) const {
  const long i = std::lround(p.x / h) - i0;
  const long j = std::lround(p.y / h) - j0;
  if (i < 0 || j < 0 || i >= nx || j >= ny) return std::nullopt;
  return index(static_cast<int>(i), static_cast<int>(j));
}

void rasterize_cuts(const GridFrame& frame, const std::vector<Polyline>& cuts,
                    std::vector<std::uint8_t>& blocked) {
  blocked.assign(frame.size(), 0);
  std::vector<std::uint8_t> touched(frame.size(), 0);
  const double step = frame.h / 4.0;
  const double lo_x = frame.cx(0) - frame.h, hi_x = frame.cx(frame.nx - 1) + frame.h;
  const double lo_y = frame.cy(0) - frame.h, hi_y = frame.cy(frame.ny - 1) + frame.h;
  for (const auto& line : cuts) {
    for (std::size_t s = 0; s + 1 < line.size(); ++s) {
      Point2 a = line[s];
      Point2 b = line[s + 1];
      // Clip to the frame (Liang-Barsky); cut half-lines are long polylines.
      double t0 = 0.0, t1 = 1.0;
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double p[4] = {-dx, dx, -dy, dy};
      const double q[4] = {a.x - lo_x, hi_x - a.x, a.y - lo_y, hi_y - a.y};
      bool visible = true;
      for (int k = 0; k < 4 && visible; ++k) {
        if (p[k] == 0.0) {
          if (q[k] < 0.0) visible = false;
        } else {
          const double r = q[k] / p[k];
          if (p[k] < 0.0) t0 = std::max(t0, r);
          else t1 = std::min(t1, r);
        }
      }
      if (!visible || t0 > t1) continue;
      const Point2 ca{a.x + t0 * dx, a.y + t0 * dy};
      const Point2 cb{a.x + t1 * dx, a.y + t1 * dy};
      const double len = length(cb - ca);
      const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
      for (int k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / n;
        if (auto c = frame.cell_of({ca.x + t * (cb.x - ca.x), ca.y + t * (cb.y - ca.y)})) {
          touched[*c] = 1;
        }
      }
    }
    if (line.size() == 1) {
      if (auto c = frame.cell_of(line[0])) touched[*c] = 1;
    }
  }
  for (int j = 0; j < frame.ny; ++j) {
    for (int i = 0; i < frame.nx; ++i) {
      if (!touched[frame.index(i, j)]) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii >= 0 && jj >= 0 && ii < frame.nx && jj < frame.ny) blocked[frame.index(ii, jj)] = 1;
        }
      }
    }
  }
}

std::size_t PlanarRegionGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

bool PlanarRegionGrid::occupied_at(Point2 p) const {
  const auto c = frame.cell_of(p);
  return c && occupied[*c];
}

ComponentLabels connected_components(const PlanarRegionGrid& grid) {
  const GridFrame& f = grid.frame;
  ComponentLabels out;
  out.labels.assign(f.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < f.size(); ++seed) {
    if (!grid.occupied[seed] || out.labels[seed] >= 0) continue;
    const int label = out.count++;
    std::size_t size = 0;
    out.labels[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      ++size;
      const int i = f.col(c), j = f.row(c);
      auto visit = [&](int ii, int jj) {
        if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny) return;
        const std::size_t n = f.index(ii, jj);
        if (grid.occupied[n] && out.labels[n] < 0) {
          out.labels[n] = label;
          stack.push_back(n);
        }
      };
      visit(i + 1, j);
      visit(i - 1, j);
      visit(i, j + 1);
      visit(i, j - 1);
    }
    out.sizes.push_back(size);
  }
  return out;
}

std::optional<std::vector<std::size_t>> bfs_path(const PlanarRegionGrid& grid, std::size_t start,
                                                 const std::function<bool(std::size_t)>& goal) {
  const GridFrame& f = grid.frame;
  if (start >= f.size() || !grid.occupied[start]) return std::nullopt;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(f.size(), kNone);
  std::deque<std::size_t> queue{start};
  parent[start] = start;
  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    if (goal(c)) {
      std::vector<std::size_t> path{c};
      for (std::size_t p = c; p != start;) {
        p = parent[p];
        path.push_back(p);
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    const int i = f.col(c), j = f.row(c);
    const int nbr[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& nb : nbr) {
      if (nb[0] < 0 || nb[1] < 0 || nb[0] >= f.nx || nb[1] >= f.ny) continue;
      const std::size_t n = f.index(nb[0], nb[1]);
      if (grid.occupied[n] && parent[n] == kNone) {
        parent[n] = c;
        queue.push_back(n);
      }
    }
  }
  return std::nullopt;
}

}  // namespace slicereg
