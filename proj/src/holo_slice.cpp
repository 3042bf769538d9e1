#include "slicereg/holo_slice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <numbers>

#include "slicereg/error.hpp"

namespace slicereg {

namespace {

constexpr std::int16_t kUnreached = std::numeric_limits<std::int16_t>::min();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kOnCut = 1e-12;

constexpr std::array<double, 8> kGaussNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGaussWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

Complex to_c(Point2 p) { return {p.x, p.y}; }

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

constexpr std::array<std::array<int, 2>, 4> kSteps = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<std::array<int, 4>, 4> kOrders = {{{0, 1, 2, 3}, {3, 2, 1, 0}, {2, 0, 3, 1}, {1, 3, 0, 2}}};

}  // namespace

// ---------------------------------------------------------------------------

Quaternion PowerSeries::eval(const Quaternion& q) const {
  const Quaternion s = q - Quaternion(center);
  Quaternion acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = s * acc + *it;
  return acc;
}

Complex log_segment_integral(Point2 a, Point2 b, Point2 p) {
  const double d = point_segment_distance(p, a, b);
  if (!(d > 0.0)) throw Error(ErrorKind::Path, "integration segment passes through a singularity");
  const double len = length(b - a);
  if (len == 0.0) return {0.0, 0.0};
  const double pieces = std::ceil(len / (0.05 * d));
  if (pieces > 1e7) throw Error(ErrorKind::Path, "integration segment too close to a singularity");
  const int n = std::max(1, static_cast<int>(pieces));
  const Complex ca = to_c(a);
  const Complex step = (to_c(b) - ca) / static_cast<double>(n);
  const Complex cp = to_c(p);
  Complex total{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    const Complex mid = ca + step * (k + 0.5);
    const Complex half = 0.5 * step;
    Complex piece{0.0, 0.0};
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
      piece += kGaussWeights[g] * (1.0 / (mid + kGaussNodes[g] * half - cp) + 1.0 / (mid - kGaussNodes[g] * half - cp));
    }
    total += piece * half;
  }
  return total;
}

// ---------------------------------------------------------------------------
// ContinuedLog

ContinuedLog::ContinuedLog(ContinuedLogSpec spec) : spec_(std::move(spec)) {
  if (spec_.terms.empty()) throw Error(ErrorKind::Parameter, "continued logarithm needs at least one term");
  if (!(spec_.h > 0.0)) throw Error(ErrorKind::Parameter, "grid step h must be positive");
  for (const auto& c : spec_.cuts) cut_boxes_.push_back(bounding_box(c));
  if (!contains(spec_.base)) throw Error(ErrorKind::Parameter, "base point is not in the cut domain");
  const Box2& b = spec_.box;
  frame_ = GridFrame::covering(b.xmin, b.xmax, b.ymin, b.ymax, spec_.h);
  if (spec_.cuts.empty()) blocked_.assign(frame_.size(), 0);
  else rasterize_cuts(frame_, spec_.cuts, blocked_);
  for (const auto& t : spec_.terms) {
    const auto c = frame_.cell_of(t.singularity);
    if (!c) continue;
    const int ci = frame_.col(*c), cj = frame_.row(*c);
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int i = ci + di, j = cj + dj;
        if (i >= 0 && j >= 0 && i < frame_.nx && j < frame_.ny) blocked_[frame_.index(i, j)] = 1;
      }
    }
  }
  const std::size_t nt = spec_.terms.size();
  branch_.assign(frame_.size() * nt, kUnreached);
  const auto base = frame_.cell_of(spec_.base);
  if (!base || blocked_[*base]) throw Error(ErrorKind::Parameter, "base point lies in a blocked cell");
  base_cell_ = *base;

  std::vector<double> theta_base(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const Point2 d = spec_.base - spec_.terms[k].singularity;
    theta_base[k] = std::atan2(d.y, d.x);
  }
  auto arg_at = [&](std::size_t cell, std::size_t k) {
    const Point2 d = frame_.center(cell) - spec_.terms[k].singularity;
    return std::atan2(d.y, d.x);
  };
  for (std::size_t k = 0; k < nt; ++k) {
    const double tc = arg_at(base_cell_, k);
    const double turned = theta_base[k] + wrap_angle(tc - theta_base[k]);
    branch_[base_cell_ * nt + k] = static_cast<std::int16_t>(std::lround((turned - tc) / kTwoPi));
  }
  std::deque<std::size_t> queue{base_cell_};
  reached_ = 1;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const int ci = frame_.col(cur), cj = frame_.row(cur);
    for (const auto& s : kSteps) {
      const int i = ci + s[0], j = cj + s[1];
      if (i < 0 || j < 0 || i >= frame_.nx || j >= frame_.ny) continue;
      const std::size_t nb = frame_.index(i, j);
      if (blocked_[nb] || branch_[nb * nt] != kUnreached) continue;
      for (std::size_t k = 0; k < nt; ++k) {
        const double tp = arg_at(cur, k);
        const double tn = arg_at(nb, k);
        const double turned = tp + wrap_angle(tn - tp);
        branch_[nb * nt + k] = static_cast<std::int16_t>(branch_[cur * nt + k] + std::lround((turned - tn) / kTwoPi));
      }
      ++reached_;
      queue.push_back(nb);
    }
  }
}

bool ContinuedLog::contains(Point2 z) const {
  const Box2& b = spec_.box;
  if (!(z.x >= b.xmin && z.x <= b.xmax && z.y >= b.ymin && z.y <= b.ymax)) return false;
  for (const auto& t : spec_.terms) {
    if (length(z - t.singularity) <= kOnCut) return false;
  }
  for (std::size_t k = 0; k < spec_.cuts.size(); ++k) {
    if (!cut_boxes_.empty() && !cut_boxes_[k].contains(z, kOnCut)) continue;
    if (point_polyline_distance(z, spec_.cuts[k]) <= kOnCut) return false;
  }
  return true;
}

bool ContinuedLog::line_of_sight(Point2 a, Point2 b) const {
  for (const auto& t : spec_.terms) {
    if (point_segment_distance(t.singularity, a, b) <= kOnCut) return false;
  }
  const Box2 seg{std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
  for (std::size_t k = 0; k < spec_.cuts.size(); ++k) {
    const Box2& c = cut_boxes_[k];
    if (seg.xmax < c.xmin || seg.xmin > c.xmax || seg.ymax < c.ymin || seg.ymin > c.ymax) continue;
    if (segment_crosses(a, b, spec_.cuts[k])) return false;
  }
  return true;
}

std::vector<Complex> ContinuedLog::anchor_integrals(std::size_t cell) const {
  const std::size_t nt = spec_.terms.size();
  std::vector<Complex> out(nt);
  const Point2 c = frame_.center(cell);
  for (std::size_t k = 0; k < nt; ++k) {
    const Point2 p = spec_.terms[k].singularity;
    const Point2 dc = c - p, db = spec_.base - p;
    const double re = std::log(length(dc)) - std::log(length(db));
    const double im = std::atan2(dc.y, dc.x) - std::atan2(db.y, db.x) + kTwoPi * branch_[cell * nt + k];
    out[k] = {re, im};
  }
  return out;
}

std::optional<std::size_t> ContinuedLog::anchor_for(Point2 z) const {
  const std::size_t nt = spec_.terms.size();
  auto usable = [&](std::size_t c) { return branch_[c * nt] != kUnreached && line_of_sight(frame_.center(c), z); };
  const long ci = std::lround(z.x / frame_.h) - frame_.i0;
  const long cj = std::lround(z.y / frame_.h) - frame_.j0;
  for (int ring = 0; ring <= 4; ++ring) {
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (long j = cj - ring; j <= cj + ring; ++j) {
      for (long i = ci - ring; i <= ci + ring; ++i) {
        if (std::max(std::labs(i - ci), std::labs(j - cj)) != ring) continue;
        if (i < 0 || j < 0 || i >= frame_.nx || j >= frame_.ny) continue;
        const std::size_t c = frame_.index(static_cast<int>(i), static_cast<int>(j));
        const double d = length(frame_.center(c) - z);
        if (d < best_d && usable(c)) {
          best = c;
          best_d = d;
        }
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

Quaternion ContinuedLog::combine(const std::vector<Complex>& integrals) const {
  Quaternion v = spec_.base_value;
  for (std::size_t k = 0; k < integrals.size(); ++k) {
    v += from_complex(integrals[k], spec_.unit) * spec_.terms[k].coefficient;
  }
  return v;
}

Quaternion ContinuedLog::eval(Point2 z) const {
  if (!contains(z)) {
    throw Error(ErrorKind::OutOfDomain, "point (" + std::to_string(z.x) + ", " + std::to_string(z.y) +
                                            ") is outside the cut domain of the logarithm");
  }
  const auto anchor = anchor_for(z);
  if (!anchor) throw Error(ErrorKind::DisconnectedDomain, "no continuation path reaches the point");
  auto integrals = anchor_integrals(*anchor);
  const Point2 c = frame_.center(*anchor);
  for (std::size_t k = 0; k < integrals.size(); ++k) {
    integrals[k] += log_segment_integral(c, z, spec_.terms[k].singularity);
  }
  return combine(integrals);
}

Quaternion ContinuedLog::eval_by_path_search(Point2 z, int neighbor_order) const {
  if (!contains(z)) throw Error(ErrorKind::OutOfDomain, "point is outside the cut domain of the logarithm");
  const auto& order = kOrders[static_cast<std::size_t>(((neighbor_order % 4) + 4) % 4)];
  // Start from the nearest open cell visible from z.
  std::optional<std::size_t> start;
  {
    const long ci = std::lround(z.x / frame_.h) - frame_.i0;
    const long cj = std::lround(z.y / frame_.h) - frame_.j0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= 4 && !start; ++ring) {
      for (long j = cj - ring; j <= cj + ring; ++j) {
        for (long i = ci - ring; i <= ci + ring; ++i) {
          if (std::max(std::labs(i - ci), std::labs(j - cj)) != ring) continue;
          if (i < 0 || j < 0 || i >= frame_.nx || j >= frame_.ny) continue;
          const std::size_t c = frame_.index(static_cast<int>(i), static_cast<int>(j));
          const double d = length(frame_.center(c) - z);
          if (!blocked_[c] && d < best_d && line_of_sight(frame_.center(c), z)) {
            start = c;
            best_d = d;
          }
        }
      }
    }
  }
  if (!start) throw Error(ErrorKind::DisconnectedDomain, "no open cell is visible from the point");
  std::vector<std::int64_t> parent(frame_.size(), -1);
  std::deque<std::size_t> queue{*start};
  parent[*start] = static_cast<std::int64_t>(*start);
  bool found = *start == base_cell_;
  while (!queue.empty() && !found) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const int ci = frame_.col(cur), cj = frame_.row(cur);
    for (int o : order) {
      const int i = ci + kSteps[o][0], j = cj + kSteps[o][1];
      if (i < 0 || j < 0 || i >= frame_.nx || j >= frame_.ny) continue;
      const std::size_t nb = frame_.index(i, j);
      if (blocked_[nb] || parent[nb] >= 0) continue;
      parent[nb] = static_cast<std::int64_t>(cur);
      if (nb == base_cell_) {
        found = true;
        break;
      }
      queue.push_back(nb);
    }
  }
  if (!found) throw Error(ErrorKind::DisconnectedDomain, "no continuation path reaches the point");
  // Polyline from the base point to z.
  Polyline pts{spec_.base};
  for (std::size_t c = base_cell_;; c = static_cast<std::size_t>(parent[c])) {
    pts.push_back(frame_.center(c));
    if (c == *start) break;
  }
  pts.push_back(z);
  Polyline smooth{pts.front()};
  std::size_t i = 0;
  while (i + 1 < pts.size()) {
    std::size_t j = i + 1;
    while (j + 1 < pts.size() && line_of_sight(pts[i], pts[j + 1])) ++j;
    smooth.push_back(pts[j]);
    i = j;
  }
  return combine(integrate(smooth));
}

std::vector<Complex> ContinuedLog::integrate(const Polyline& path) const {
  std::vector<Complex> out(spec_.terms.size(), Complex{0.0, 0.0});
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += log_segment_integral(path[s], path[s + 1], spec_.terms[k].singularity);
    }
  }
  return out;
}

double loop_consistency(const ContinuedLog& f, const Polyline& loop) {
  Polyline closed = loop;
  if (!closed.empty() && !(closed.front() == closed.back())) closed.push_back(closed.front());
  double worst = 0.0;
  for (const auto& v : f.integrate(closed)) worst = std::max(worst, std::abs(v));
  return worst;
}

// ---------------------------------------------------------------------------
// HoloSliceFunction

const char* to_string(HoloKind kind) {
  switch (kind) {
    case HoloKind::PowerSeries: return "PowerSeries";
    case HoloKind::ContinuedLog: return "ContinuedLog";
    case HoloKind::StemRestriction: return "StemRestriction";
    case HoloKind::Callable: return "Callable";
  }
  return "?";
}

HoloSliceFunction HoloSliceFunction::power_series(PowerSeries series, const UnitImaginary& J) {
  HoloSliceFunction f;
  f.kind_ = HoloKind::PowerSeries;
  f.unit_ = J;
  f.series_ = std::make_shared<const PowerSeries>(std::move(series));
  return f;
}

HoloSliceFunction HoloSliceFunction::continued_log(std::shared_ptr<const ContinuedLog> log) {
  if (!log) throw Error(ErrorKind::Parameter, "null logarithm");
  HoloSliceFunction f;
  f.kind_ = HoloKind::ContinuedLog;
  f.unit_ = log->spec().unit;
  f.log_ = std::move(log);
  return f;
}

HoloSliceFunction HoloSliceFunction::stem_restriction(std::shared_ptr<const StemPair> stem, const UnitImaginary& J) {
  if (!stem) throw Error(ErrorKind::Parameter, "null stem pair");
  HoloSliceFunction f;
  f.kind_ = HoloKind::StemRestriction;
  f.unit_ = J;
  f.stem_ = std::move(stem);
  return f;
}

HoloSliceFunction HoloSliceFunction::callable(const UnitImaginary& J, std::function<Quaternion(double, double)> fn,
                                              std::function<bool(double, double)> domain) {
  if (!fn) throw Error(ErrorKind::Parameter, "null slice function");
  HoloSliceFunction f;
  f.kind_ = HoloKind::Callable;
  f.unit_ = J;
  f.fn_ = std::move(fn);
  f.fn_domain_ = std::move(domain);
  return f;
}

HoloSliceFunction HoloSliceFunction::with_domain(DomainPtr domain) const {
  HoloSliceFunction f = *this;
  f.domain_ = std::move(domain);
  return f;
}

bool HoloSliceFunction::contains(double x, double y) const {
  if (domain_ && !domain_->contains(x, y, unit_)) return false;
  switch (kind_) {
    case HoloKind::PowerSeries: return series_->converges_at(slice_point(x, y, unit_));
    case HoloKind::ContinuedLog: return log_->contains({x, y});
    case HoloKind::StemRestriction: return stem_->contains(x, y, unit_);
    case HoloKind::Callable: return !fn_domain_ || fn_domain_(x, y);
  }
  return false;
}

Quaternion HoloSliceFunction::eval(double x, double y) const {
  if (domain_ && !domain_->contains(x, y, unit_)) {
    throw Error(ErrorKind::OutOfDomain, "point is outside the domain of the slice function");
  }
  switch (kind_) {
    case HoloKind::PowerSeries: {
      const Quaternion q = slice_point(x, y, unit_);
      if (!series_->converges_at(q)) throw Error(ErrorKind::OutOfDomain, "point is outside the disk of convergence");
      return series_->eval(q);
    }
    case HoloKind::ContinuedLog: return log_->eval({x, y});
    case HoloKind::StemRestriction: return stem_->eval(x, y, unit_);
    case HoloKind::Callable:
      if (fn_domain_ && !fn_domain_(x, y)) {
        throw Error(ErrorKind::OutOfDomain, "point is outside the domain of the slice function");
      }
      return fn_(x, y);
  }
  return {};
}

Quaternion HoloSliceFunction::eval(const SliceCoord& z) const {
  if (z.is_real_point()) return eval(z.x, 0.0);
  if (*z.unit == unit_) return eval(z.x, z.y);
  if (*z.unit == -unit_) return eval(z.x, -z.y);
  if (z.unit->distance(unit_) < 1e-14) return eval(z.x, z.y);
  if (z.unit->distance(-unit_) < 1e-14) return eval(z.x, -z.y);
  throw Error(ErrorKind::OutOfDomain, "point does not lie on the slice of the function");
}

double dbar_residual(const HoloSliceFunction& f, double x, double y, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::Parameter, "finite-difference step must be positive");
  const std::array<Point2, 4> stencil = {{{x + h, y}, {x - h, y}, {x, y + h}, {x, y - h}}};
  for (const auto& p : stencil) {
    if (!f.contains(p.x, p.y)) throw Error(ErrorKind::Stencil, "finite-difference stencil leaves the domain");
  }
  const Quaternion dx = (f.eval(x + h, y) - f.eval(x - h, y)) / (2.0 * h);
  const Quaternion dy = (f.eval(x, y + h) - f.eval(x, y - h)) / (2.0 * h);
  return (0.5 * (dx + f.unit().q() * dy)).norm();
}

double dbar_residual(const HoloSliceFunction& f, const SliceCoord& z, double h) {
  if (z.is_real_point() || *z.unit == f.unit()) return dbar_residual(f, z.x, z.y, h);
  if (*z.unit == -f.unit()) return dbar_residual(f, z.x, -z.y, h);
  throw Error(ErrorKind::OutOfDomain, "point does not lie on the slice of the function");
}

// ---------------------------------------------------------------------------
// SliceFamily

SliceFamily::SliceFamily(Factory make, std::string name) : make_(std::move(make)), name_(std::move(name)) {
  if (!make_) throw Error(ErrorKind::Parameter, "slice family needs a factory");
}

const HoloSliceFunction& SliceFamily::at(const UnitImaginary& J) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(J.vec());
  if (it == cache_.end()) {
    it = cache_.emplace(J.vec(), std::make_shared<const HoloSliceFunction>(make_(J))).first;
  }
  return *it->second;
}

Quaternion SliceFamily::eval(const Quaternion& q) const {
  const SliceCoord z = slice_decompose(q);
  if (z.is_real_point()) return at(UnitImaginary::i()).eval(z.x, 0.0);
  return at(*z.unit).eval(z.x, z.y);
}

FamilyPtr polynomial_family(const PowerSeries& series) {
  return std::make_shared<const SliceFamily>(
      [series](const UnitImaginary& J) { return HoloSliceFunction::power_series(series, J); }, "polynomial");
}

}  // namespace slicereg
