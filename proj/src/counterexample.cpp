#include "slicereg/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "slicereg/error.hpp"

namespace slicereg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOnCurve = 1e-12;

double t_of_angle(double psi) { return std::min(2.0 * std::sin(0.5 * psi), 1.0); }

/// Squared distance from (w, y J_q) to the arc point of parameter theta on a unit at
/// angle psi from I0, with the unit chosen closest to J_q on that circle.
double arc_dist2(double w, double y, double psi_q, double psi, double theta) {
  const double r = 2.0 + (1.0 - 2.0 * t_of_angle(psi)) * std::sin(theta);
  const double dx = w + 1.0 - std::cos(theta);
  return dx * dx + y * y - 2.0 * y * r * std::cos(psi - psi_q) + r * r;
}

double arc_distance_exact(const Quaternion& q, const UnitImaginary& I0) {
  const SliceCoord c = slice_decompose(q);
  const double psi_q = c.unit ? c.unit->angle(I0) : 0.0;
  const double w = c.x, y = c.y;
  double best = std::numeric_limits<double>::infinity();
  double bp = 0.0, bt = 0.0;
  constexpr int n = 64;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      const double psi = kPi * a / n, theta = kPi * b / n;
      const double d = arc_dist2(w, y, psi_q, psi, theta);
      if (d < best) {
        best = d;
        bp = psi;
        bt = theta;
      }
    }
  }
  double span = kPi / n;
  for (int it = 0; it < 30; ++it) {
    const double p0 = bp, t0 = bt;
    for (int a = -4; a <= 4; ++a) {
      for (int b = -4; b <= 4; ++b) {
        const double psi = std::clamp(p0 + span * a / 4.0, 0.0, kPi);
        const double theta = std::clamp(t0 + span * b / 4.0, 0.0, kPi);
        const double d = arc_dist2(w, y, psi_q, psi, theta);
        if (d < best) {
          best = d;
          bp = psi;
          bt = theta;
        }
      }
    }
    span *= 0.5;
  }
  return std::sqrt(std::max(0.0, best));
}

/// The continuation fields reach one unit past the domain box so tubes near its edge stay covered.
Box2 log_box(const CounterexampleConfig& cfg) {
  return {cfg.bbox.xmin - 1.0, cfg.bbox.xmax + 1.0, -cfg.bbox.ymax - 1.0, cfg.bbox.ymax + 1.0};
}

std::optional<std::size_t> cell_at(const PlanarRegionGrid& g, Point2 p) { return g.frame.cell_of(p); }

}  // namespace

double t_of(const UnitImaginary& J, const CounterexampleConfig& cfg) { return std::min(J.distance(cfg.I0), 1.0); }

Point2 arc_planar(const UnitImaginary& J, double t, const CounterexampleConfig& cfg) {
  if (!(t >= 0.0 && t <= 0.5)) throw Error(ErrorKind::Parameter, "arc parameter must lie in [0, 1/2]");
  const double T = t_of(J, cfg);
  const double a = 2.0 * kPi * t;
  return {-1.0 + std::cos(a), 2.0 + (1.0 - 2.0 * T) * std::sin(a)};
}

Quaternion arc_point(const UnitImaginary& J, double t, const CounterexampleConfig& cfg) {
  // -1 + 2J + (1 - T) e^{2 pi J t} + T e^{-2 pi J t}, all inside L_J.
  if (!(t >= 0.0 && t <= 0.5)) throw Error(ErrorKind::Parameter, "arc parameter must lie in [0, 1/2]");
  const double T = t_of(J, cfg);
  const double a = 2.0 * kPi * t;
  const Quaternion e_plus = slice_point(std::cos(a), std::sin(a), J);
  const Quaternion e_minus = slice_point(std::cos(a), -std::sin(a), J);
  return Quaternion(-1.0) + 2.0 * J.q() + (1.0 - T) * e_plus + T * e_minus;
}

Polyline arc_polyline(const UnitImaginary& J, const CounterexampleConfig& cfg) {
  const int n = std::max(3, cfg.arc_points);
  Polyline out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(arc_planar(J, 0.5 * k / (n - 1), cfg));
  out.back() = {-2.0, 2.0};
  out.front() = {0.0, 2.0};
  return out;
}

Polyline half_line(const CounterexampleConfig& cfg) { return {{cfg.bbox.xmin - 2.0, 2.0}, {-2.0, 2.0}}; }

std::string arc_orientation() { return "t=0 -> 2J, t=1/2 -> -2+2J"; }

std::vector<Polyline> t_cuts(const CounterexampleConfig& cfg) {
  return {half_line(cfg), reflected(half_line(cfg)), arc_polyline(cfg.I0, cfg), reflected(arc_polyline(-cfg.I0, cfg))};
}

DomainSpec omega_spec(const CounterexampleConfig& cfg) {
  DomainSpec s;
  s.name = "counterexample";
  const int n = std::max(3, cfg.arc_points);
  const double dtheta = kPi / (n - 1);
  const Box2 box = cfg.bbox;
  s.member = [cfg, n, dtheta, box](double x, double y, const UnitImaginary& J) {
    if (!(x > box.xmin && x < box.xmax && y < box.ymax)) return false;
    if (std::abs(y - 2.0) <= kOnCurve && x < -2.0 + kOnCurve) return false;
    if (x < -2.0 - kOnCurve || x > kOnCurve || y < 1.0 - kOnCurve || y > 3.0 + kOnCurve) return true;
    // The arc vertices sit at theta_k = k dtheta with x = -1 + cos theta_k, so x locates the segment.
    const double theta = std::acos(std::clamp(x + 1.0, -1.0, 1.0));
    const int k = static_cast<int>(theta / dtheta);
    const double s = 1.0 - 2.0 * t_of(J, cfg);
    auto vertex = [&](int m) {
      const double a = m * dtheta;
      return Point2{-1.0 + std::cos(a), 2.0 + s * std::sin(a)};
    };
    for (int m = std::max(0, k - 1); m <= std::min(n - 2, k + 1); ++m) {
      if (point_segment_distance({x, y}, vertex(m), vertex(m + 1)) <= kOnCurve) return false;
    }
    return true;
  };
  s.real_trace = [box](double x) { return x > box.xmin && x < box.xmax; };
  s.axial_cuts = {half_line(cfg)};
  s.slice_cuts = [cfg](const UnitImaginary& J) { return std::vector<Polyline>{arc_polyline(J, cfg)}; };
  const UnitImaginary I0 = cfg.I0;
  const Polyline h = half_line(cfg);
  s.cut_distance = [I0, h](const Quaternion& q) {
    const SliceCoord c = slice_decompose(q);
    const double dh = point_polyline_distance({c.x, c.y}, h);
    return std::min(dh, arc_distance_exact(q, I0));
  };
  s.bbox = cfg.bbox;
  s.h = cfg.h;
  return s;
}

RSPair r_s_functions(const CounterexampleConfig& cfg) {
  ContinuedLogSpec rs;
  rs.unit = cfg.I0;
  rs.terms = {{{0.0, 2.0}, Quaternion(1.0)}};
  rs.base = {1.0, 2.0};
  rs.base_value = Quaternion();
  rs.cuts = t_cuts(cfg);
  rs.box = log_box(cfg);
  rs.h = cfg.log_h;
  ContinuedLogSpec ss = rs;
  ss.cuts.clear();
  for (const auto& c : rs.cuts) ss.cuts.push_back(reflected(c));
  return {HoloSliceFunction::continued_log(std::make_shared<const ContinuedLog>(rs)),
          HoloSliceFunction::continued_log(std::make_shared<const ContinuedLog>(ss))};
}

FamilyPtr g_family(const CounterexampleConfig& cfg) {
  return std::make_shared<const SliceFamily>(
      [cfg](const UnitImaginary& J) {
        const Quaternion JI = J.q() * cfg.I0.q();
        const Quaternion a1 = 0.5 * (Quaternion(1.0) - JI);
        const Quaternion a2 = 0.5 * (Quaternion(1.0) + JI);
        ContinuedLogSpec spec;
        spec.unit = J;
        spec.terms = {{{0.0, 2.0}, a1}, {{0.0, -2.0}, a2}};
        spec.base = {1.0, 0.0};
        spec.base_value = from_complex(std::log(Complex(1.0, -2.0)), J) * a1 +
                          from_complex(std::log(Complex(1.0, 2.0)), J) * a2;
        spec.cuts = {half_line(cfg), arc_polyline(J, cfg), reflected(half_line(cfg)),
                     reflected(arc_polyline(-J, cfg))};
        spec.box = log_box(cfg);
        spec.h = cfg.log_h;
        return HoloSliceFunction::continued_log(std::make_shared<const ContinuedLog>(std::move(spec)));
      },
      "G");
}

PlanarRegionGrid t_cap_u_grid(const CounterexampleConfig& cfg) {
  DomainSpec tmp;
  tmp.bbox = cfg.bbox;
  tmp.h = cfg.h;
  PlanarRegionGrid g;
  g.frame = full_frame(tmp);
  std::vector<Polyline> cuts = t_cuts(cfg);
  for (const auto& c : t_cuts(cfg)) cuts.push_back(reflected(c));
  std::vector<std::uint8_t> blocked;
  rasterize_cuts(g.frame, cuts, blocked);
  g.occupied.resize(blocked.size());
  for (std::size_t c = 0; c < blocked.size(); ++c) g.occupied[c] = blocked[c] ? 0 : 1;
  return g;
}

CounterexampleReport demonstrate(const CounterexampleConfig& cfg, const DemonstrateOptions& opts) {
  CounterexampleReport rep;
  rep.cfg = cfg;
  const SphereSample sample = SphereSample::fibonacci(opts.samples, {cfg.I0});
  const DomainSpec omega = omega_spec(cfg);
  const Point2 disk_probe{-1.0, 2.5};
  const Point2 outer_probe{3.0, 1.0};

  if (opts.check_slice_domain) rep.slice_domain = is_slice_domain(omega, sample);
  rep.slice_grid = rasterize(omega, cfg.I0, SliceExtent::Full);

  // (b) T intersect U
  rep.tu_grid = t_cap_u_grid(cfg);
  rep.tu_labels = connected_components(rep.tu_grid);
  rep.tu_components = rep.tu_labels.count;
  rep.tu_sizes = rep.tu_labels.sizes;

  // (c) Omega_{I0,-I0}^+
  rep.omega_pair_grid = omega_jk_plus(omega, cfg.I0, -cfg.I0);
  rep.omega_pair_labels = connected_components(rep.omega_pair_grid);
  rep.omega_pair_components = rep.omega_pair_labels.count;
  {
    const auto cd = cell_at(rep.omega_pair_grid, disk_probe);
    const auto co = cell_at(rep.omega_pair_grid, outer_probe);
    const int ld = cd ? rep.omega_pair_labels.labels[*cd] : -1;
    const int lo = co ? rep.omega_pair_labels.labels[*co] : -1;
    bool ok = ld >= 0 && lo >= 0 && ld != lo;
    if (ok) {
      const GridFrame& f = rep.omega_pair_grid.frame;
      for (std::size_t c = 0; c < f.size() && ok; ++c) {
        if (rep.omega_pair_labels.labels[c] != ld) continue;
        const Point2 p = f.center(c);
        ok = std::hypot(p.x + 1.0, p.y - 2.0) < 1.0;
      }
    }
    rep.omega_pair_geometry = ok;
  }

  // (d) jump of r - s on the components of T intersect U
  const RSPair rs = r_s_functions(cfg);
  {
    const GridFrame& f = rep.tu_grid.frame;
    const auto cd = cell_at(rep.tu_grid, disk_probe);
    const int disk_label = cd ? rep.tu_labels.labels[*cd] : -1;
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(std::max(0, rep.tu_labels.count)));
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (rep.tu_labels.labels[c] >= 0) members[static_cast<std::size_t>(rep.tu_labels.labels[c])].push_back(c);
    }
    JumpStats& js = rep.jump;
    js.disk_min = std::numeric_limits<double>::infinity();
    int positive = 0, negative = 0;
    for (std::size_t comp = 0; comp < members.size(); ++comp) {
      const auto& cells = members[comp];
      const std::size_t stride = std::max<std::size_t>(1, (cells.size() + opts.max_cells - 1) / opts.max_cells);
      const bool disk = static_cast<int>(comp) == disk_label;
      std::vector<double> values((cells.size() + stride - 1) / stride, 0.0);
      std::vector<double> along(values.size(), 0.0);
      parallel_for(values.size(), [&](std::size_t k) {
        const Point2 p = f.center(cells[k * stride]);
        const Quaternion d = rs.r.eval(p.x, p.y) - rs.s.eval(p.x, p.y);
        values[k] = d.norm();
        along[k] = d.x * cfg.I0.vx() + d.y * cfg.I0.vy() + d.z * cfg.I0.vz();
      });
      for (std::size_t k = 0; k < values.size(); ++k) {
        const Point2 p = f.center(cells[k * stride]);
        if (k % 4 == 0) rep.heat.push_back({p.x, p.y, values[k]});
        if (disk) {
          ++js.disk_cells;
          if (std::abs(values[k] - 2.0 * kPi) <= 1e-6) ++js.disk_hits;
          js.disk_min = std::min(js.disk_min, values[k]);
          js.disk_max = std::max(js.disk_max, values[k]);
          (along[k] > 0.0 ? positive : negative)++;
        } else {
          ++js.other_cells;
          js.other_max = std::max(js.other_max, values[k]);
        }
      }
    }
    js.disk_fraction = js.disk_cells ? static_cast<double>(js.disk_hits) / js.disk_cells : 0.0;
    js.sign = positive > negative ? 1 : (negative > positive ? -1 : 0);
  }

  // (d) the two orderings of the extension formula
  {
    ExtensionOptions eo;
    eo.real_xmin = cfg.bbox.xmin + cfg.h;
    eo.real_xmax = cfg.bbox.xmax - cfg.h;
    const ExtensionFormula f1(rs.r, cfg.I0, rs.s, -cfg.I0, eo);
    const ExtensionFormula f2(rs.r, -cfg.I0, rs.s, cfg.I0, eo);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n01;
    OrderingStats& os = rep.orderings;
    os.jump_on_I0 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 64; ++k) {
      const double rad = 0.9 * std::sqrt(u(rng)), ang = 2.0 * kPi * u(rng);
      const double x = -1.0 + rad * std::cos(ang), y = 2.0 + rad * std::sin(ang);
      const UnitImaginary I = k % 4 == 0 ? cfg.I0 : UnitImaginary(n01(rng), n01(rng), n01(rng));
      const double diff = (f1(x, y, I) - f2(x, y, I)).norm();
      ++os.inside_samples;
      if (I == cfg.I0) {
        os.jump_on_I0 = std::min(os.jump_on_I0, diff);
        os.jump_on_I0_max = std::max(os.jump_on_I0_max, diff);
      }
      os.law_error = std::max(os.law_error, std::abs(diff - kPi * (cfg.I0.q() + I.q()).norm()));
    }
    while (os.outside_samples < 64) {
      const double x = cfg.bbox.xmin + 0.1 + (cfg.bbox.xmax - cfg.bbox.xmin - 0.2) * u(rng);
      const double y = 0.1 + (cfg.bbox.ymax - 0.2) * u(rng);
      if (std::hypot(x + 1.0, y - 2.0) < 1.05 || (std::abs(y - 2.0) < 0.05 && x < -1.95)) continue;
      const UnitImaginary I(n01(rng), n01(rng), n01(rng));
      os.outside_max = std::max(os.outside_max, (f1(x, y, I) - f2(x, y, I)).norm());
      ++os.outside_samples;
    }
  }

  // (e) simplicity
  rep.simple = is_simple(omega, sample);
  if (rep.simple.witness_units.size() == 2) {
    rep.simple_witness_antipodal = rep.simple.witness_units[0].distance(-rep.simple.witness_units[1]) < 1e-12;
  }

  const double two_pi = 2.0 * kPi;
  rep.passed = (!opts.check_slice_domain || rep.slice_domain.yes()) && rep.tu_components == 3 &&
               rep.omega_pair_components == 2 && rep.omega_pair_geometry && rep.jump.disk_fraction >= 0.95 &&
               rep.jump.other_max <= 1e-8 && std::abs(rep.orderings.jump_on_I0 - two_pi) <= 1e-6 &&
               std::abs(rep.orderings.jump_on_I0_max - two_pi) <= 1e-6 && rep.orderings.law_error <= 1e-6 &&
               rep.orderings.outside_max <= 1e-8 && rep.simple.no() && rep.simple_witness_antipodal;
  return rep;
}

}  // namespace slicereg
