#include "slicereg/domain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "slicereg/error.hpp"

namespace slicereg {

bool DomainSpec::contains(double x, double y, const UnitImaginary& J) const {
  if (y == 0.0) return real_trace(x);
  if (y < 0.0) return member(x, -y, -J);
  return member(x, y, J);
}

bool DomainSpec::contains(const Quaternion& q) const {
  const SliceCoord c = slice_decompose(q);
  if (c.is_real_point()) return real_trace(c.x);
  return member(c.x, c.y, *c.unit);
}

std::vector<Polyline> DomainSpec::cuts_upper(const UnitImaginary& J) const {
  std::vector<Polyline> out = axial_cuts;
  if (slice_cuts) {
    auto extra = slice_cuts(J);
    out.insert(out.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shapes

DomainSpec make_ball(const Quaternion& center, double radius, std::optional<UnitImaginary> wedge_axis,
                     double wedge_angle) {
  if (!(radius > 0.0)) throw Error(ErrorKind::Parameter, "ball radius must be positive");
  DomainSpec s;
  s.name = "ball";
  const Quaternion v = im(center);
  const double v2 = v.norm2();
  // |x + yJ - c|^2 expanded so that a real centre gives a J-independent value.
  s.member = [center, v, v2, radius, wedge_axis, wedge_angle](double x, double y, const UnitImaginary& J) {
    if (wedge_axis && J.angle(*wedge_axis) > wedge_angle) return false;
    const double dx = x - center.w;
    const double cross = v2 == 0.0 ? 0.0 : 2.0 * y * (J.vx() * v.x + J.vy() * v.y + J.vz() * v.z);
    return dx * dx + y * y - cross + v2 < radius * radius;
  };
  s.real_trace = [center, radius](double x) { return (Quaternion(x) - center).norm2() < radius * radius; };
  s.bbox = {center.w - radius, center.w + radius, 0.0, im(center).norm() + radius};
  s.h = 0.01;
  return s;
}

DomainSpec make_halfspace_slicewise(double a, double b, double c, Box2 bbox) {
  DomainSpec s;
  s.name = "halfspace-slicewise";
  s.member = [a, b, c](double x, double y, const UnitImaginary&) { return a * x + b * y < c; };
  s.real_trace = [a, c](double x) { return a * x < c; };
  s.bbox = bbox;
  return s;
}

DomainSpec make_slicewise(std::string name, std::function<bool(double, double)> planar, Box2 bbox) {
  DomainSpec s;
  s.name = std::move(name);
  s.member = [planar](double x, double y, const UnitImaginary&) { return planar(x, y); };
  s.real_trace = [planar](double x) { return planar(x, 0.0); };
  s.bbox = bbox;
  return s;
}

DomainSpec make_boolean(BooleanOp op, DomainPtr a, DomainPtr b) {
  if (!a || !b) throw Error(ErrorKind::Parameter, "boolean domain needs two operands");
  DomainSpec s;
  s.h = std::min(a->h, b->h);
  switch (op) {
    case BooleanOp::Union:
      s.name = "union";
      s.member = [a, b](double x, double y, const UnitImaginary& J) { return a->member(x, y, J) || b->member(x, y, J); };
      s.real_trace = [a, b](double x) { return a->real_trace(x) || b->real_trace(x); };
      s.bbox = {std::min(a->bbox.xmin, b->bbox.xmin), std::max(a->bbox.xmax, b->bbox.xmax), 0.0,
                std::max(a->bbox.ymax, b->bbox.ymax)};
      break;
    case BooleanOp::Intersection:
      s.name = "intersection";
      s.member = [a, b](double x, double y, const UnitImaginary& J) { return a->member(x, y, J) && b->member(x, y, J); };
      s.real_trace = [a, b](double x) { return a->real_trace(x) && b->real_trace(x); };
      s.bbox = {std::max(a->bbox.xmin, b->bbox.xmin), std::min(a->bbox.xmax, b->bbox.xmax), 0.0,
                std::min(a->bbox.ymax, b->bbox.ymax)};
      if (!(s.bbox.xmax > s.bbox.xmin)) s.bbox = a->bbox;
      break;
    case BooleanOp::Difference:
      s.name = "difference";
      s.member = [a, b](double x, double y, const UnitImaginary& J) { return a->member(x, y, J) && !b->member(x, y, J); };
      s.real_trace = [a, b](double x) { return a->real_trace(x) && !b->real_trace(x); };
      s.bbox = a->bbox;
      break;
  }
  s.axial_cuts = a->axial_cuts;
  s.axial_cuts.insert(s.axial_cuts.end(), b->axial_cuts.begin(), b->axial_cuts.end());
  if (a->slice_cuts || b->slice_cuts) {
    s.slice_cuts = [a, b](const UnitImaginary& J) {
      std::vector<Polyline> out;
      if (a->slice_cuts) out = a->slice_cuts(J);
      if (b->slice_cuts) {
        auto extra = b->slice_cuts(J);
        out.insert(out.end(), extra.begin(), extra.end());
      }
      return out;
    };
  }
  if (a->has_cuts() || b->has_cuts()) {
    s.cut_distance = [a, b](const Quaternion& q) { return std::min(cut_distance(*a, q), cut_distance(*b, q)); };
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sphere sampling

SphereSample SphereSample::fibonacci(int n, const std::vector<UnitImaginary>& pinned) {
  if (n < 1) throw Error(ErrorKind::Parameter, "sphere sample needs N >= 1");
  const double min_sep = kSeparation / std::sqrt(static_cast<double>(n));
  std::vector<UnitImaginary> base;
  auto far_enough = [&](const UnitImaginary& u) {
    for (const auto& b : base) {
      if (u.angle(b) < min_sep || u.angle(-b) < min_sep) return false;
    }
    return true;
  };
  for (const auto& p : pinned) {
    if (far_enough(p)) base.push_back(p);
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    UnitImaginary u(r * std::cos(phi), r * std::sin(phi), z);
    if (far_enough(u)) base.push_back(u);
  }
  SphereSample s;
  s.requested_ = n;
  s.units_ = base;
  for (const auto& b : base) s.units_.push_back(-b);
  double best = std::numbers::pi;
  for (std::size_t a = 0; a < s.units_.size(); ++a) {
    for (std::size_t b = a + 1; b < s.units_.size(); ++b) best = std::min(best, s.units_[a].angle(s.units_[b]));
  }
  s.min_angle_ = best;
  if (s.units_.size() > 1 && best < min_sep) {
    throw Error(ErrorKind::Geometry, "sphere sample violates its separation bound");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Parallel helpers

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SLICEREG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Rasterization

GridFrame upper_frame(const DomainSpec& spec) {
  return GridFrame::covering(spec.bbox.xmin, spec.bbox.xmax, 0.5 * spec.h, spec.bbox.ymax, spec.h);
}

GridFrame full_frame(const DomainSpec& spec) {
  return GridFrame::covering(spec.bbox.xmin, spec.bbox.xmax, -spec.bbox.ymax, spec.bbox.ymax, spec.h);
}

namespace {

struct Raster {
  PlanarRegionGrid grid;
  std::vector<std::uint8_t> blocked;
};

Raster raster_full(const DomainSpec& spec, const UnitImaginary& J, SliceExtent extent) {
  Raster r;
  r.grid.frame = extent == SliceExtent::Full ? full_frame(spec) : upper_frame(spec);
  const GridFrame& f = r.grid.frame;
  std::vector<Polyline> cuts = spec.cuts_upper(J);
  if (extent == SliceExtent::Full) {
    for (const auto& c : spec.cuts_upper(-J)) cuts.push_back(reflected(c));
  }
  if (cuts.empty()) {
    r.blocked.assign(f.size(), 0);
  } else {
    rasterize_cuts(f, cuts, r.blocked);
  }
  r.grid.occupied.assign(f.size(), 0);
  const UnitImaginary negJ = -J;
  const double cell_radius = std::sqrt(0.5) * f.h;
  for (int j = 0; j < f.ny; ++j) {
    const double y = f.cy(j);
    for (int i = 0; i < f.nx; ++i) {
      const std::size_t c = f.index(i, j);
      if (r.blocked[c]) continue;
      const double x = f.cx(i);
      bool in;
      if (spec.cell_member) in = spec.cell_member(x, y, cell_radius, J);
      else if (y > 0.0) in = spec.member(x, y, J);
      else if (y < 0.0) in = spec.member(x, -y, negJ);
      else in = spec.real_trace(x);
      r.grid.occupied[c] = in ? 1 : 0;
    }
  }
  return r;
}

std::string format_h(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", h);
  return buf;
}

}  // namespace

PlanarRegionGrid rasterize(const DomainSpec& spec, const UnitImaginary& J, SliceExtent extent) {
  if (!(spec.h > 0.0)) throw Error(ErrorKind::Parameter, "grid step h must be positive");
  return raster_full(spec, J, extent).grid;
}

PlanarRegionGrid omega_jk_plus(const DomainSpec& spec, const UnitImaginary& J, const UnitImaginary& K) {
  PlanarRegionGrid a = rasterize(spec, J, SliceExtent::UpperHalf);
  if (J == K) return a;
  const PlanarRegionGrid b = rasterize(spec, K, SliceExtent::UpperHalf);
  for (std::size_t c = 0; c < a.occupied.size(); ++c) a.occupied[c] &= b.occupied[c];
  return a;
}

const char* to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Yes: return "yes";
    case VerdictKind::No: return "no";
    case VerdictKind::Indeterminate: return "indeterminate";
  }
  return "?";
}

std::string Verdict::label() const {
  return std::string(to_string(kind)) + "@N=" + std::to_string(samples) + ",h=" + format_h(h);
}

Verdict is_slice_domain(const DomainSpec& spec, const SphereSample& sample) {
  Verdict v;
  v.samples = sample.requested();
  v.h = spec.h;
  const GridFrame f = full_frame(spec);
  bool real_nonempty = false;
  for (int i = 0; i < f.nx && !real_nonempty; ++i) {
    real_nonempty = spec.cell_member ? spec.cell_member(f.cx(i), 0.0, std::sqrt(0.5) * f.h, UnitImaginary::i())
                                     : spec.real_trace(f.cx(i));
  }
  if (!real_nonempty) {
    v.kind = VerdictKind::No;
    v.detail = "empty real trace";
    return v;
  }
  const auto& units = sample.units();
  std::vector<int> counts(units.size(), 0);
  std::vector<std::uint8_t> touches(units.size(), 0);
  parallel_for(units.size(), [&](std::size_t u) {
    const PlanarRegionGrid g = rasterize(spec, units[u], SliceExtent::Full);
    const ComponentLabels labels = connected_components(g);
    counts[u] = labels.count;
    if (auto row = g.frame.real_row()) {
      for (int i = 0; i < g.frame.nx; ++i) {
        if (g.occupied[g.frame.index(i, *row)]) touches[u] = 1;
      }
    }
  });
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (counts[u] != 1) {
      v.kind = VerdictKind::No;
      v.witness_units = {units[u]};
      v.components = counts[u];
      v.detail = "slice has " + std::to_string(counts[u]) + " components";
      return v;
    }
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (!touches[u]) {
      v.kind = VerdictKind::Indeterminate;
      v.witness_units = {units[u]};
      v.components = 1;
      v.detail = "connected slice does not meet the real axis at this resolution";
      return v;
    }
  }
  v.components = 1;
  return v;
}

Verdict is_symmetric(const DomainSpec& spec, const SphereSample& sample) {
  Verdict v;
  v.samples = sample.requested();
  v.h = spec.h;
  const auto& units = sample.units();
  if (units.empty()) return v;
  const PlanarRegionGrid ref = rasterize(spec, units[0], SliceExtent::UpperHalf);
  for (std::size_t u = 1; u < units.size(); ++u) {
    const PlanarRegionGrid g = rasterize(spec, units[u], SliceExtent::UpperHalf);
    for (std::size_t c = 0; c < g.occupied.size(); ++c) {
      if (g.occupied[c] != ref.occupied[c]) {
        v.kind = VerdictKind::No;
        v.witness_points = {g.frame.center(c)};
        v.witness_units = {units[0], units[u]};
        v.detail = "membership differs between the two witness units";
        return v;
      }
    }
  }
  return v;
}

Verdict is_simple(const DomainSpec& spec, const SphereSample& sample) {
  Verdict v;
  v.samples = sample.requested();
  v.h = spec.h;
  const auto& units = sample.units();
  const std::size_t n = units.size();
  std::vector<PlanarRegionGrid> halves(n);
  std::vector<std::uint8_t> ready(n, 0);
  auto half = [&](std::size_t u) -> const PlanarRegionGrid& {
    if (!ready[u]) {
      halves[u] = rasterize(spec, units[u], SliceExtent::UpperHalf);
      ready[u] = 1;
    }
    return halves[u];
  };
  // Omega_{J,K}^+ and Omega_{K,J}^+ are the same planar set, so unordered pairs suffice.
  // Far-apart pairs go first: antipodal pairs are the usual witnesses.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n + 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) pairs.emplace_back(a, b);
  }
  auto antipodal = [&](const std::pair<std::size_t, std::size_t>& p) {
    return n > 1 && p.second == sample.antipode(p.first);
  };
  std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& p, const auto& q) {
    const bool ap = antipodal(p), aq = antipodal(q);
    if (ap != aq) return ap;
    if (ap) return false;
    return units[p.first].distance(units[p.second]) > units[q.first].distance(units[q.second]);
  });
  PlanarRegionGrid work;
  for (const auto& [a, b] : pairs) {
    const PlanarRegionGrid& ga = half(a);
    const PlanarRegionGrid& gb = half(b);
    work.frame = ga.frame;
    work.occupied = ga.occupied;
    for (std::size_t c = 0; c < work.occupied.size(); ++c) work.occupied[c] &= gb.occupied[c];
    const int count = connected_components(work).count;
    if (count > 1) {
      v.kind = VerdictKind::No;
      v.witness_units = {units[a], units[b]};
      v.components = count;
      v.detail = "Omega_{J,K}^+ has " + std::to_string(count) + " components";
      return v;
    }
  }
  v.components = 1;
  return v;
}

Verdict is_slice_convex(const DomainSpec& spec, const SphereSample& sample, std::uint64_t seed) {
  Verdict v;
  v.samples = sample.requested();
  v.h = spec.h;
  std::mt19937_64 rng(seed);
  for (const auto& J : sample.units()) {
    const Raster r = raster_full(spec, J, SliceExtent::Full);
    const GridFrame& f = r.grid.frame;
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (r.grid.occupied[c]) cells.push_back(c);
    }
    if (cells.size() < 2) continue;
    const std::size_t pairs = std::min<std::size_t>(10 * cells.size(), 100000);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    for (std::size_t m = 0; m < pairs; ++m) {
      const Point2 a = f.center(cells[pick(rng)]);
      const Point2 b = f.center(cells[pick(rng)]);
      const int steps = std::max(1, static_cast<int>(std::ceil(length(b - a) / f.h)));
      for (int s = 1; s < steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const Point2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        const auto c = f.cell_of(p);
        // Boundary cells of a digitized convex set can have centres outside it, so
        // an unoccupied cell is only a witness if the point itself fails the oracle.
        bool return_no = false;
        if (!c) return_no = true;
        else if (!r.grid.occupied[*c]) return_no = r.blocked[*c] || !spec.contains(p.x, p.y, J);
        if (return_no) {
          v.kind = VerdictKind::No;
          v.witness_units = {J};
          v.witness_points = {a, b, p};
          v.detail = "segment leaves the slice";
          return v;
        }
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Completion

DomainSpec symmetric_completion(const DomainSpec& spec, const SphereSample& sample) {
  auto base = std::make_shared<const DomainSpec>(spec);
  auto units = std::make_shared<const std::vector<UnitImaginary>>(sample.units());
  DomainSpec s;
  s.name = spec.name + "~";
  s.member = [base, units](double x, double y, const UnitImaginary&) {
    for (const auto& K : *units) {
      if (base->member(x, y, K)) return true;
    }
    return false;
  };
  s.real_trace = spec.real_trace;
  s.axial_cuts = spec.axial_cuts;
  s.bbox = spec.bbox;
  s.h = spec.h;
  return s;
}

// ---------------------------------------------------------------------------
// Distances

double cut_distance(const DomainSpec& spec, const Quaternion& q) {
  if (spec.cut_distance) return spec.cut_distance(q);
  double best = std::numeric_limits<double>::infinity();
  const SliceCoord c = slice_decompose(q);
  const Point2 planar{c.x, c.y};
  for (const auto& line : spec.axial_cuts) best = std::min(best, point_polyline_distance(planar, line));
  if (spec.slice_cuts) {
    // |q - (x' + y'J)|^2 = (x - x')^2 + (y' - y cos)^2 + y^2 sin^2 with cos = <J_q, J>.
    static const SphereSample dense = SphereSample::fibonacci(512);
    std::vector<UnitImaginary> units = dense.units();
    if (c.unit) {
      units.push_back(*c.unit);
      units.push_back(-*c.unit);
    }
    for (const auto& J : units) {
      const double cs = c.unit ? c.unit->dot(J) : 0.0;
      const double extra = c.y * c.y * (1.0 - cs * cs);
      if (extra >= best * best) continue;
      for (const auto& line : spec.slice_cuts(J)) {
        const double d = point_polyline_distance({c.x, c.y * cs}, line);
        best = std::min(best, std::sqrt(d * d + extra));
      }
    }
  }
  return best;
}

double boundary_distance(const DomainSpec& spec, const Quaternion& q, double max_radius) {
  static const std::vector<Quaternion> random_dirs = [] {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> n01;
    std::vector<Quaternion> d;
    for (int k = 0; k < 4; ++k) {
      Quaternion e;
      (k == 0 ? e.w : k == 1 ? e.x : k == 2 ? e.y : e.z) = 1.0;
      d.push_back(e);
      d.push_back(-e);
    }
    for (int k = 0; k < 64; ++k) {
      Quaternion e(n01(rng), n01(rng), n01(rng), n01(rng));
      d.push_back(e / e.norm());
    }
    return d;
  }();
  std::vector<Quaternion> dirs = random_dirs;
  const SliceCoord c = slice_decompose(q);
  const UnitImaginary J = c.unit.value_or(UnitImaginary::i());
  for (int k = 0; k < 16; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 16.0;
    dirs.push_back(slice_point(std::cos(a), std::sin(a), J));
  }
  const double limit = std::min(max_radius, cut_distance(spec, q));
  if (!spec.contains(q)) return 0.0;
  auto all_inside = [&](double rho) {
    for (const auto& d : dirs) {
      if (!spec.contains(q + rho * d)) return false;
    }
    return true;
  };
  // March outward; after a miss, march again from the last good radius with a finer step.
  double lo = 0.0, step = 0.5 * spec.h;
  for (int level = 0; level < 14; ++level) {
    double rho = lo + step;
    while (rho <= limit && all_inside(rho)) rho += step;
    if (rho > limit) return limit;
    lo = rho - step;
    if (lo > 0.0 && step <= 0.05 * lo) break;
    step /= 8.0;
  }
  // Probing only sees finitely many directions; keep a margin below the first miss.
  return 0.9 * lo;
}

}  // namespace slicereg
