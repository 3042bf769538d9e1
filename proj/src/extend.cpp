#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>

#include "slicereg/error.hpp"
#include "slicereg/extension.hpp"

namespace slicereg {

namespace {

/// 4-connected distance (in cells) from every occupied cell to the nearest
/// unoccupied cell or to the outside of the frame.
std::vector<int> clearance(const PlanarRegionGrid& g) {
  const GridFrame& f = g.frame;
  std::vector<int> d(f.size(), -1);
  std::deque<std::size_t> queue;
  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      const std::size_t c = f.index(i, j);
      if (!g.occupied[c]) {
        d[c] = 0;
        queue.push_back(c);
      } else if (i == 0 || j == 0 || i == f.nx - 1 || j == f.ny - 1) {
        d[c] = 1;
        queue.push_back(c);
      }
    }
  }
  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    const int i = f.col(c), j = f.row(c);
    const int nbr[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (const auto& nb : nbr) {
      if (nb[0] < 0 || nb[1] < 0 || nb[0] >= f.nx || nb[1] >= f.ny) continue;
      const std::size_t n = f.index(nb[0], nb[1]);
      if (d[n] < 0) {
        d[n] = d[c] + 1;
        queue.push_back(n);
      }
    }
  }
  return d;
}

/// Grid path in the full slice of J0 from p0 to the real axis, trimmed at the
/// first real cell and shortcut-smoothed. Prefers routes away from the boundary.
Polyline path_to_real(const DomainSpec& omega, const UnitImaginary& J0, Point2 p0) {
  const PlanarRegionGrid grid = rasterize(omega, J0, SliceExtent::Full);
  const GridFrame& f = grid.frame;
  const auto real_row = f.real_row();
  if (!real_row) throw Error(ErrorKind::Path, "slice raster does not contain the real axis");
  const auto start = f.cell_of(p0);
  if (!start || !grid.occupied[*start]) throw Error(ErrorKind::Path, "start point is not in an open cell of the slice");
  std::vector<Polyline> cuts = omega.cuts_upper(J0);
  for (const auto& c : omega.cuts_upper(-J0)) cuts.push_back(reflected(c));
  const std::vector<int> clear = clearance(grid);
  for (int margin : {12, 6, 3, 1}) {
    const int m = std::min(margin, clear[*start]);
    PlanarRegionGrid eroded = grid;
    for (std::size_t c = 0; c < f.size(); ++c) eroded.occupied[c] = clear[c] >= m ? 1 : 0;
    eroded.occupied[*start] = 1;
    const auto cells = bfs_path(eroded, *start, [&](std::size_t c) { return f.row(c) == *real_row; });
    if (!cells) continue;
    Polyline pts{p0};
    for (std::size_t k = 1; k < cells->size(); ++k) pts.push_back(f.center((*cells)[k]));
    if (pts.size() == 1) pts.push_back({p0.x, 0.0});
    auto visible = [&](Point2 a, Point2 b) {
      if (segment_crosses_any(a, b, cuts)) return false;
      const int n = std::max(1, static_cast<int>(std::ceil(length(b - a) / (0.5 * f.h))));
      for (int s = 1; s < n; ++s) {
        const double t = static_cast<double>(s) / n;
        const auto c = f.cell_of({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        if (!c || !eroded.occupied[*c]) return false;
      }
      return true;
    };
    Polyline smooth{pts.front()};
    std::size_t i = 0;
    while (i + 1 < pts.size()) {
      std::size_t j = i + 1;
      while (j + 1 < pts.size() && visible(pts[i], pts[j + 1])) ++j;
      smooth.push_back(pts[j]);
      i = j;
    }
    return smooth;
  }
  throw Error(ErrorKind::Path, "no path to the real axis inside the slice");
}

double stem_distance(const Stem& a, const Stem& b) { return (a.b - b.b).norm() + (a.c - b.c).norm(); }

}  // namespace

LocalExtension local_extend(FamilyPtr f, DomainPtr omega, const SliceCoord& p0,
                            const LocalExtensionOptions& opts) {
  if (!f || !omega) throw Error(ErrorKind::Parameter, "local extension needs a function and a domain");
  const DomainSpec& Om = *omega;
  if (p0.is_real_point() ? !Om.real_trace(p0.x) : !Om.member(p0.x, p0.y, *p0.unit)) {
    throw Error(ErrorKind::OutOfDomain, "starting point is not in the domain");
  }
  const bool real_start = p0.is_real_point();
  const UnitImaginary J0 = real_start ? UnitImaginary::i() : *p0.unit;
  const Polyline gamma = real_start ? Polyline{{p0.x, 0.0}} : path_to_real(Om, J0, {p0.x, p0.y});

  TubeBuild M = build_tube(gamma, J0, Om, opts.shrink);
  const TubeDomain tubeM = M.tube;
  UnitImaginary K0 = -J0;
  if (!real_start) {
    const double bound = M.tube.epsilon() / M.tube.y_ref();
    K0 = J0.rotated_toward(UnitImaginary::k(), std::asin(0.5 * bound), UnitImaginary::i());
  }
  DomainSpec n;
  n.name = "N";
  if (real_start) {
    n = *tubeM.spec();
    n.name = "N";
  } else {
    n.member = [tubeM, K0](double x, double y, const UnitImaginary&) { return tubeM.contains(x, y, K0); };
    n.real_trace = [tubeM](double x) { return tubeM.contains(Quaternion(x)); };
    n.bbox = tubeM.spec()->bbox;
    n.h = tubeM.spec()->h;
  }
  auto N = std::make_shared<const DomainSpec>(std::move(n));

  StemPair g;
  g.domain = N;
  g.coeffs = [fam = f, J0, K0](double x, double y) -> Stem {
    if (y == 0.0) return {fam->eval(x, 0.0, J0), Quaternion()};
    return rep_coeffs(fam->eval(x, y, J0), fam->eval(x, y, K0), J0, K0);
  };

  DomainSpec both = make_boolean(BooleanOp::Intersection, N, omega);
  both.h = N->h;
  both.bbox = N->bbox;
  TubeBuild L = build_tube(gamma, J0, both, opts.shrink);

  LocalExtension out{J0, K0, gamma, tubeM, N, L.tube, g};
  out.lambda_is_slice_domain = L.slice_domain.yes() && M.slice_domain.yes();

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  // Real points of N.
  const Box2 box = N->bbox;
  int found = 0;
  for (int attempt = 0; attempt < 100 * opts.real_checks && found < opts.real_checks; ++attempt) {
    const double x = box.xmin + (box.xmax - box.xmin) * unif(rng);
    if (!N->real_trace(x) || !Om.real_trace(x)) continue;
    out.real_error = std::max(out.real_error, (g.eval(x, 0.0, J0) - f->eval(x, 0.0, J0)).norm());
    ++found;
  }
  // Points of Lambda on several slices: J0, K0, units close to J0 and arbitrary ones.
  const TubeDomain& lam = out.Lambda;
  std::vector<UnitImaginary> units{J0, K0};
  std::normal_distribution<double> n01;
  const double theta0 = lam.y_ref() > 0.0 ? std::asin(std::min(1.0, lam.epsilon() / lam.y_ref())) : 1.0;
  while (static_cast<int>(units.size()) < opts.tube_units) {
    const UnitImaginary dir(n01(rng), n01(rng), n01(rng));
    if (units.size() % 2 == 0) units.push_back(J0.rotated_toward(dir, theta0 * unif(rng), UnitImaginary::k()));
    else units.push_back(dir);
  }
  const int per_unit = std::max(1, opts.tube_checks / opts.tube_units);
  auto sample_on = [&](const UnitImaginary& U, int wanted) {
    int got = 0;
    for (int attempt = 0; attempt < 400 * wanted && got < wanted; ++attempt) {
      const std::size_t seg = static_cast<std::size_t>(unif(rng) * lam.path().size()) % lam.path().size();
      const Point2 a = lam.path()[seg];
      const Point2 b = seg + 1 < lam.path().size() ? lam.path()[seg + 1] : a;
      const double t = unif(rng);
      const Point2 c{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
      const double rho = lam.radius_at(c.y);
      const double cy = c.y * U.dot(J0);
      const double x = c.x + rho * (2.0 * unif(rng) - 1.0);
      const double y = cy + rho * (2.0 * unif(rng) - 1.0);
      if (!(y > 0.0) || !lam.contains(x, y, U) || !Om.member(x, y, U)) continue;
      const double err = (g.eval(x, y, U) - f->eval(x, y, U)).norm();
      out.tube_error = std::max(out.tube_error, err);
      ++out.tube_points;
      ++got;
    }
    return got;
  };
  int short_by = 0;
  for (const auto& U : units) short_by += per_unit - sample_on(U, per_unit);
  if (short_by > 0) sample_on(J0, short_by);
  return out;
}

// ---------------------------------------------------------------------------

GlobalExtension extend_to_completion(FamilyPtr f, DomainPtr omega, const SphereSample& sample,
                                     const CompletionOptions& opts) {
  if (!f || !omega) throw Error(ErrorKind::Parameter, "global extension needs a function and a domain");
  if (!(opts.step > 0.0)) throw Error(ErrorKind::Parameter, "sphere sampling step must be positive");
  const DomainSpec& Om = *omega;
  CompletionReport report;
  report.tol = opts.tol;
  report.forced = opts.force;
  report.simple = is_simple(Om, sample);
  if (!report.simple->yes() && !opts.force) {
    throw Error(ErrorKind::Precondition, "domain is not simple at " + report.simple->label());
  }

  const auto& units = sample.units();
  const std::size_t nu = units.size();
  // Neighbour lists by angle, fixed order.
  std::vector<std::vector<std::size_t>> nearest(nu);
  for (std::size_t a = 0; a < nu; ++a) {
    auto& list = nearest[a];
    for (std::size_t b = 0; b < nu; ++b) {
      if (b != a) list.push_back(b);
    }
    std::stable_sort(list.begin(), list.end(), [&](std::size_t p, std::size_t q) {
      return units[a].angle(units[p]) < units[a].angle(units[q]);
    });
  }

  const long i0 = static_cast<long>(std::ceil(Om.bbox.xmin / opts.step - 1e-9));
  const long i1 = static_cast<long>(std::floor(Om.bbox.xmax / opts.step + 1e-9));
  const long j1 = static_cast<long>(std::floor(Om.bbox.ymax / opts.step + 1e-9));
  std::vector<Point2> points;
  for (long j = 1; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) points.push_back({i * opts.step, j * opts.step});
  }

  std::vector<std::optional<SphereConsistency>> rows(points.size());
  parallel_for(points.size(), [&](std::size_t idx) {
    const double x = points[idx].x, y = points[idx].y;
    std::vector<std::size_t> valid;
    std::vector<Quaternion> fv(nu);
    std::vector<std::uint8_t> ok(nu, 0);
    for (std::size_t u = 0; u < nu; ++u) {
      if (!Om.member(x, y, units[u]) || !f->at(units[u]).contains(x, y)) continue;
      valid.push_back(u);
      ok[u] = 1;
      fv[u] = f->eval(x, y, units[u]);
    }
    if (valid.size() < 2) return;
    SphereConsistency sc;
    sc.x = x;
    sc.y = y;
    sc.units_in_domain = valid.size();
    const Stem first = rep_coeffs(fv[valid[0]], fv[valid[1]], units[valid[0]], units[valid[1]]);
    for (std::size_t a = 0; a < valid.size(); ++a) {
      for (std::size_t b = a + 1; b < valid.size(); ++b) {
        const Stem s = rep_coeffs(fv[valid[a]], fv[valid[b]], units[valid[a]], units[valid[b]]);
        sc.all_pairs_spread = std::max(sc.all_pairs_spread, stem_distance(s, first));
      }
    }
    // A unit is resolved when the pairs it forms with its nearest valid neighbours agree.
    std::optional<std::size_t> ref;
    Stem ref_stem;
    std::size_t worst = 0;
    for (std::size_t u : valid) {
      std::vector<Stem> local;
      for (std::size_t v : nearest[u]) {
        if (!ok[v]) continue;
        local.push_back(rep_coeffs(fv[u], fv[v], units[u], units[v]));
        if (static_cast<int>(local.size()) == opts.neighbors) break;
      }
      if (local.size() < 2) continue;
      double spread = 0.0;
      for (const auto& s : local) spread = std::max(spread, stem_distance(s, local[0]));
      const double scale = 1.0 + local[0].b.norm() + local[0].c.norm();
      if (spread > opts.local_tol * scale) continue;
      ++sc.resolved_units;
      if (!ref) {
        ref = u;
        ref_stem = local[0];
        worst = u;
        continue;
      }
      const double d = stem_distance(local[0], ref_stem);
      if (d > sc.defect) {
        sc.defect = d;
        worst = u;
      }
    }
    if (ref) sc.witnesses = {units[*ref], units[worst]};
    rows[idx] = std::move(sc);
  });

  for (auto& r : rows) {
    if (!r) {
      ++report.skipped;
      continue;
    }
    report.max_defect = std::max(report.max_defect, r->defect);
    if (r->defect > opts.tol) ++report.over_tolerance;
    report.spheres.push_back(std::move(*r));
  }

  GlobalExtension out;
  out.completion = std::make_shared<const DomainSpec>(symmetric_completion(Om, sample));
  out.g.domain = out.completion;
  out.g.coeffs = [f, omega, units](double x, double y) -> Stem {
    if (y == 0.0) return {f->eval(x, 0.0, units.front()), Quaternion()};
    std::optional<std::size_t> a;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (!omega->member(x, y, units[u]) || !f->at(units[u]).contains(x, y)) continue;
      if (!a) {
        a = u;
        continue;
      }
      return rep_coeffs(f->eval(x, y, units[*a]), f->eval(x, y, units[u]), units[*a], units[u]);
    }
    throw Error(ErrorKind::OutOfDomain, "sphere meets the domain in fewer than two sampled units");
  };
  out.report = std::move(report);
  if (out.report.over_tolerance > 0 && !opts.force) {
    throw Error(ErrorKind::Inconsistency,
                "consistency defect " + std::to_string(out.report.max_defect) + " exceeds tolerance");
  }
  return out;
}

}  // namespace slicereg
