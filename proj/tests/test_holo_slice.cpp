#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "slicereg/error.hpp"
#include "slicereg/holo_slice.hpp"

using namespace slicereg;

namespace {

constexpr double kPi = std::numbers::pi;

PowerSeries cube() { return PowerSeries{0.0, std::numeric_limits<double>::infinity(), {0.0, 0.0, 0.0, 1.0}}; }

/// Polygonal circle, counter-clockwise.
Polyline circle(Point2 c, double r, int n) {
  Polyline out;
  for (int k = 0; k <= n; ++k) {
    const double t = 2.0 * kPi * k / n;
    out.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return out;
}

}  // namespace

TEST_CASE("power series evaluates with powers on the left") {
  const PowerSeries sq{0.0, std::numeric_limits<double>::infinity(), {0.0, 0.0, 1.0}};
  const Quaternion v = sq.eval(Quaternion(1.0, 1.0, 0.0, 0.0));
  CHECK(v == Quaternion(0.0, 2.0, 0.0, 0.0));

  // q a with a = j: left powers give q j, not j q.
  const PowerSeries lin{0.0, std::numeric_limits<double>::infinity(), {0.0, Quaternion::j()}};
  const Quaternion q(0.0, 1.0, 0.0, 0.0);
  CHECK(lin.eval(q) == q * Quaternion::j());
  CHECK(!(lin.eval(q) == Quaternion::j() * q));
}

TEST_CASE("power series around a real center") {
  const PowerSeries s{1.0, 2.0, {1.0, 0.0, 1.0}};
  const HoloSliceFunction f = HoloSliceFunction::power_series(s, UnitImaginary::j());
  const Quaternion v = f.eval(1.0, 1.0);
  CHECK(v == Quaternion(0.0));
  CHECK(f.contains(2.5, 0.0));
  CHECK_FALSE(f.contains(3.5, 0.0));
  CHECK_THROWS_AS(f.eval(3.5, 0.0), Error);
}

TEST_CASE("dbar residual of q^3 matches its Taylor remainder") {
  // For holomorphic f the central-difference residual is |h^2 f'''(z)| / 6 + O(h^4);
  // f''' = 6 for q^3 so the residual is h^2 up to rounding.
  const HoloSliceFunction f = HoloSliceFunction::power_series(cube(), UnitImaginary::i());
  const double h = 1e-4;
  const double r = dbar_residual(f, 0.5, 0.5, h);
  CHECK(r <= 1e-7);
  CHECK(r == doctest::Approx(h * h).epsilon(0.05));

  const double r1 = dbar_residual(f, 0.5, 0.5, 1e-2);
  const double r2 = dbar_residual(f, 0.5, 0.5, 5e-3);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("dbar residual of a constant and of conjugation") {
  const Quaternion a(1.0, 2.0, -3.0, 0.5);
  const HoloSliceFunction c = HoloSliceFunction::power_series({0.0, 10.0, {a}}, UnitImaginary::k());
  CHECK(dbar_residual(c, 0.2, 0.3, 1e-4) == 0.0);

  const UnitImaginary J = UnitImaginary::i();
  const HoloSliceFunction conj =
      HoloSliceFunction::callable(J, [J](double x, double y) { return slice_point(x, -y, J); });
  CHECK(dbar_residual(conj, 1.0, 1.0, 1e-4) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stencil leaving the domain is reported") {
  const HoloSliceFunction f = HoloSliceFunction::power_series({0.0, 1.0, {0.0, 1.0}}, UnitImaginary::i());
  CHECK_THROWS_AS(dbar_residual(f, 0.0, 0.99995, 1e-4), Error);
  try {
    dbar_residual(f, 0.0, 0.99995, 1e-4);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Stencil);
  }
}

TEST_CASE("segment integral of 1/(z-p) is the logarithm difference") {
  const Point2 p{0.0, 2.0};
  const Complex v = log_segment_integral({1.0, 2.0}, {std::exp(1.0), 2.0}, p);
  CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(v.imag()) < 1e-15);
  // Segment passing close by: half-turn around p.
  const Complex w = log_segment_integral({1.0, 2.001}, {-1.0, 2.001}, p);
  CHECK(std::abs(w.real()) < 1e-12);
  CHECK(w.imag() == doctest::Approx(kPi - 2.0 * std::atan(0.001)).epsilon(1e-12));
  CHECK_THROWS_AS(log_segment_integral({-1.0, 2.0}, {1.0, 2.0}, p), Error);
}

TEST_CASE("continued log restricts to the real logarithm on the base ray") {
  ContinuedLogSpec spec;
  spec.unit = UnitImaginary::k();
  spec.terms = {{{0.0, 2.0}, 1.0}};
  spec.base = {1.0, 2.0};
  spec.cuts = {{{-5.0, 2.0}, {0.0, 2.0}}};
  spec.box = {-5.0, 5.0, -5.0, 5.0};
  spec.h = 0.02;
  const auto log = std::make_shared<const ContinuedLog>(spec);
  const Quaternion v = log->eval({std::exp(1.0), 2.0});
  CHECK((v - Quaternion(1.0)).norm() < 1e-9);

  // Principal branch off the cut: log(z - 2k) at z = 2k + i*r*e^{i t} is ln r + t k.
  const Quaternion w = log->eval({0.0, 3.0});
  CHECK((w - slice_point(0.0, kPi / 2, UnitImaginary::k())).norm() < 1e-9);
  const Quaternion u = log->eval({0.0, 1.0});
  CHECK((u - slice_point(0.0, -kPi / 2, UnitImaginary::k())).norm() < 1e-9);
  const Quaternion a = log->eval({-3.0, 2.5});
  CHECK((a - slice_point(0.5 * std::log(9.25), std::atan2(0.5, -3.0), UnitImaginary::k())).norm() < 1e-9);
  const Quaternion b = log->eval({-3.0, 1.5});
  CHECK((b - slice_point(0.5 * std::log(9.25), std::atan2(-0.5, -3.0), UnitImaginary::k())).norm() < 1e-9);

  CHECK_THROWS_AS(log->eval({-2.0, 2.0}), Error);
  CHECK_THROWS_AS(log->eval({0.0, 2.0}), Error);
  CHECK_THROWS_AS(log->eval({7.0, 0.0}), Error);
}

TEST_CASE("values on opposite sides of a cut differ by a full loop") {
  ContinuedLogSpec spec;
  spec.unit = UnitImaginary::i();
  spec.terms = {{{0.0, 0.0}, 1.0}};
  spec.base = {1.0, 0.0};
  spec.cuts = {{{-4.0, 0.0}, {0.0, 0.0}}};
  spec.box = {-4.0, 4.0, -4.0, 4.0};
  spec.h = 0.02;
  const ContinuedLog log(spec);
  const Quaternion above = log.eval({-2.0, 1e-3});
  const Quaternion below = log.eval({-2.0, -1e-3});
  // Independent oracle: the same jump as a closed loop integral around the singularity.
  const Complex loop = log.integrate(circle({0.0, 0.0}, 2.0, 64))[0];
  CHECK(std::abs(loop.imag() - 2.0 * kPi) < 1e-12);
  const Quaternion jump = above - below;
  const Quaternion expected = slice_point(0.0, loop.imag() - 2.0 * std::atan(1e-3 / 2.0), UnitImaginary::i());
  CHECK((jump - expected).norm() < 1e-8);
}

TEST_CASE("loop consistency") {
  ContinuedLogSpec spec;
  spec.unit = UnitImaginary::i();
  spec.terms = {{{0.0, 2.0}, 1.0}};
  spec.base = {1.0, 2.0};
  spec.box = {-5.0, 5.0, -5.0, 5.0};
  spec.h = 0.05;
  const ContinuedLog uncut(spec);
  const Polyline square{{3.0, -3.0}, {4.0, -3.0}, {4.0, -2.0}, {3.0, -2.0}};
  CHECK(loop_consistency(uncut, square) < 1e-12);
  CHECK(loop_consistency(uncut, circle({0.0, 2.0}, 1.0, 40)) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(loop_consistency(uncut, circle({0.5, 1.5}, 2.0, 17)) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("two independent path searches agree") {
  ContinuedLogSpec spec;
  spec.unit = UnitImaginary::j();
  spec.terms = {{{0.0, 2.0}, 1.0}, {{0.0, -2.0}, Quaternion(0.0, 1.0, 0.0, 0.0)}};
  spec.base = {1.0, 0.0};
  spec.cuts = {{{-5.0, 2.0}, {0.0, 2.0}}, {{-5.0, -2.0}, {0.0, -2.0}}, {{-1.0, 0.5}, {-1.0, -3.5}}};
  spec.box = {-5.0, 5.0, -5.0, 5.0};
  spec.h = 0.05;
  const ContinuedLog log(spec);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.9, 4.9);
  int compared = 0;
  for (int n = 0; n < 40; ++n) {
    const Point2 z{u(rng), u(rng)};
    if (!log.contains(z)) continue;
    const Quaternion a = log.eval(z);
    const Quaternion b = log.eval_by_path_search(z, 0);
    const Quaternion c = log.eval_by_path_search(z, 1);
    CHECK((a - b).norm() < 1e-9);
    CHECK((b - c).norm() < 1e-9);
    ++compared;
  }
  CHECK(compared > 30);
}

TEST_CASE("continued log is holomorphic on its slice") {
  ContinuedLogSpec spec;
  spec.unit = UnitImaginary(1.0, 1.0, 0.0);
  spec.terms = {{{0.0, 2.0}, Quaternion(1.0, 0.0, 2.0, 0.0)}};
  spec.base = {1.0, 2.0};
  spec.cuts = {{{-5.0, 2.0}, {0.0, 2.0}}};
  spec.h = 0.05;
  const auto f = HoloSliceFunction::continued_log(std::make_shared<const ContinuedLog>(spec));
  for (const Point2 z : {Point2{1.5, 0.5}, Point2{-2.0, 3.0}, Point2{-1.0, 1.0}}) {
    CHECK(dbar_residual(f, z.x, z.y, 1e-4) < 1e-6);
  }
}

TEST_CASE("slice family caches per unit") {
  const FamilyPtr fam = polynomial_family(cube());
  const UnitImaginary J(0.0, 0.6, 0.8);
  const HoloSliceFunction& a = fam->at(J);
  const HoloSliceFunction& b = fam->at(J);
  CHECK(&a == &b);
  const Quaternion q = slice_point(0.3, 0.7, J);
  CHECK((fam->eval(q) - q * q * q).norm() < 1e-14);
}
