#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "slicereg/error.hpp"
#include "slicereg/extension.hpp"

using namespace slicereg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

UnitImaginary random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  return UnitImaginary(n01(rng), n01(rng), n01(rng));
}

PowerSeries random_poly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PowerSeries p{0.0, kInf, {}};
  for (int k = 0; k <= degree; ++k) p.coeffs.emplace_back(u(rng), u(rng), u(rng), u(rng));
  return p;
}

PowerSeries square() { return PowerSeries{0.0, kInf, {0.0, 0.0, 1.0}}; }

DomainPtr ball(double r = 1.0) { return std::make_shared<const DomainSpec>(make_ball(Quaternion(), r)); }

}  // namespace

TEST_CASE("representation coefficients by hand") {
  const UnitImaginary i = UnitImaginary::i(), j = UnitImaginary::j();
  const Stem sq = rep_coeffs(Quaternion(-1.0), Quaternion(-1.0), i, j);
  CHECK((sq.b - Quaternion(-1.0)).norm() < 1e-15);
  CHECK(sq.c.norm() < 1e-15);
  const Stem id = rep_coeffs(Quaternion::i(), Quaternion::j(), i, j);
  CHECK(id.b.norm() < 1e-15);
  CHECK((id.c - Quaternion(1.0)).norm() < 1e-15);
  const Quaternion a(0.5, -1.0, 2.0, 0.25);
  const Stem cst = rep_coeffs(a, a, UnitImaginary(1, 2, 3), UnitImaginary(-1, 0, 1));
  CHECK((cst.b - a).norm() < 1e-14);
  CHECK(cst.c.norm() < 1e-15);
  CHECK_THROWS_AS(rep_coeffs(a, a, i, i), Error);

  CHECK(rep_eval(Quaternion(-1.0), Quaternion(), UnitImaginary(0.3, 0.1, 2)) == Quaternion(-1.0));
  CHECK(rep_eval(Quaternion(), Quaternion(1.0), UnitImaginary::k()) == Quaternion::k());
}

TEST_CASE("representation round trip and pair independence for random polynomials") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 10; ++n) {
    const PowerSeries p = random_poly(rng, 1 + n % 8);
    for (int m = 0; m < 20; ++m) {
      const double x = u(rng), y = std::abs(u(rng)) + 0.01;
      const UnitImaginary I = random_unit(rng), J = random_unit(rng), K = random_unit(rng);
      const UnitImaginary L = random_unit(rng), M = random_unit(rng);
      const Stem s1 = rep_coeffs(p.eval(slice_point(x, y, J)), p.eval(slice_point(x, y, K)), J, K);
      const Stem s2 = rep_coeffs(p.eval(slice_point(x, y, L)), p.eval(slice_point(x, y, M)), L, M);
      const Quaternion direct = p.eval(slice_point(x, y, I));
      CHECK((rep_eval(s1, I) - direct).norm() < 1e-10);
      CHECK((s1.b - s2.b).norm() + (s1.c - s2.c).norm() < 1e-10);
    }
  }
}

TEST_CASE("extension formula on identity and square") {
  const UnitImaginary i = UnitImaginary::i(), j = UnitImaginary::j(), k = UnitImaginary::k();
  const PowerSeries id{0.0, kInf, {0.0, 1.0}};
  const auto r = HoloSliceFunction::power_series(id, i);
  const auto s = HoloSliceFunction::power_series(id, j);
  const Quaternion v = extension_formula(r, i, s, j, SliceCoord(1.0, 2.0, k));
  CHECK((v - Quaternion(1.0, 0.0, 0.0, 2.0)).norm() < 1e-14);

  const auto r2 = HoloSliceFunction::power_series(square(), i);
  const auto s2 = HoloSliceFunction::power_series(square(), j);
  const ExtensionFormula ext(r2, i, s2, j);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 50; ++n) {
    const double x = u(rng), y = std::abs(u(rng));
    const UnitImaginary I = random_unit(rng);
    const Quaternion expected = slice_point(x * x - y * y, 2.0 * x * y, I);
    CHECK((ext(x, y, I) - expected).norm() < 1e-12);
  }
  CHECK_THROWS_AS(ext(0.5, -0.5, i), Error);
  CHECK_THROWS_AS(ExtensionFormula(r2, i, s2, i), Error);
}

TEST_CASE("extension formula restricts to r and s") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PowerSeries pr = random_poly(rng, 5);
  // Same real trace, different storage: s carries a trailing zero coefficient.
  PowerSeries ps = pr;
  ps.coeffs.push_back(Quaternion());
  const UnitImaginary J = random_unit(rng), K = random_unit(rng);
  const ExtensionFormula ext(HoloSliceFunction::power_series(pr, J), J, HoloSliceFunction::power_series(ps, K), K);
  for (int n = 0; n < 50; ++n) {
    const double x = u(rng), y = std::abs(u(rng));
    CHECK((ext(x, y, J) - pr.eval(slice_point(x, y, J))).norm() < 1e-12);
    CHECK((ext(x, y, K) - ps.eval(slice_point(x, y, K))).norm() < 1e-12);
  }
}

TEST_CASE("incompatible real traces are rejected") {
  const UnitImaginary i = UnitImaginary::i(), j = UnitImaginary::j();
  const auto r = HoloSliceFunction::power_series({0.0, kInf, {1.0}}, i);
  const auto s = HoloSliceFunction::power_series({0.0, kInf, {1.0 + 1e-6}}, j);
  try {
    ExtensionFormula(r, i, s, j);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatiblePair);
  }
}

TEST_CASE("regular extension of the identity and of conjugation") {
  const UnitImaginary i = UnitImaginary::i();
  const auto id = HoloSliceFunction::power_series({0.0, kInf, {0.0, 1.0}}, i);
  const StemPair g = regular_ext(id, ball());
  const Stem s = g.coeffs(0.3, 0.4);
  CHECK((s.b - Quaternion(0.3)).norm() < 1e-15);
  CHECK((s.c - Quaternion(0.4)).norm() < 1e-15);

  const auto conj = HoloSliceFunction::callable(i, [i](double x, double y) { return slice_point(x, -y, i); });
  const StemPair h = regular_ext(conj);
  const Stem t = h.coeffs(0.3, 0.4);
  CHECK((t.b - Quaternion(0.3)).norm() < 1e-15);
  CHECK((t.c - Quaternion(-0.4)).norm() < 1e-15);
  const UnitImaginary J(0.0, 0.6, 0.8);
  CHECK((h.eval(0.3, 0.4, J) - slice_point(0.3, -0.4, J)).norm() < 1e-15);
  CHECK((h.eval(0.3, 0.4, i) - conj.eval(0.3, 0.4)).norm() < 1e-15);
}

TEST_CASE("regular extension of a series matches direct evaluation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const PowerSeries p = random_poly(rng, 6);
  const UnitImaginary I = random_unit(rng);
  const StemPair g = regular_ext(HoloSliceFunction::power_series(p, I));
  for (int m = 0; m < 10; ++m) {
    const UnitImaginary J = random_unit(rng);
    for (int n = 0; n < 100; ++n) {
      const double x = u(rng), y = u(rng);
      CHECK((g.eval(x, y, J) - p.eval(slice_point(x, y, J))).norm() < 1e-10);
    }
  }
}

TEST_CASE("regular extension needs a symmetric domain") {
  auto wedge = std::make_shared<const DomainSpec>(
      make_ball(Quaternion(), 1.0, UnitImaginary::i(), std::numbers::pi / 6));
  const auto f = HoloSliceFunction::power_series(square(), UnitImaginary::i());
  try {
    regular_ext(f, wedge);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("tube membership") {
  const UnitImaginary i = UnitImaginary::i();
  const TubeDomain t(i, {{0.0, 2.0}, {0.0, 0.0}}, 0.5);
  CHECK(t.y_ref() == 2.0);
  CHECK(t.contains(slice_point(0.0, 1.9, i)));
  CHECK(t.contains(slice_point(0.4, 2.0, i)));
  CHECK_FALSE(t.contains(slice_point(0.6, 2.0, i)));
  CHECK(t.contains(Quaternion(0.45)));
  // Along j only the real ball and the thin part near R are reached.
  CHECK(t.contains(slice_point(0.0, 0.3, UnitImaginary::j())));
  CHECK_FALSE(t.contains(slice_point(0.0, 1.0, UnitImaginary::j())));
  // Radius shrinks linearly: at height 1 it is 0.25.
  CHECK(t.contains(slice_point(0.24, 1.0, i)));
  CHECK_FALSE(t.contains(slice_point(0.26, 1.0, i)));
  CHECK_THROWS_AS(TubeDomain(i, {{0.0, 0.4}, {0.0, 0.0}}, 0.5), Error);
}

TEST_CASE("built tubes are slice domains") {
  const UnitImaginary i = UnitImaginary::i();
  const DomainSpec Y = make_ball(Quaternion(), 3.0);
  const TubeBuild b = build_tube({{0.0, 2.0}, {0.0, 0.0}}, i, Y, 0.5);
  CHECK(b.tube.epsilon() == doctest::Approx(0.5 * b.min_boundary_distance));
  CHECK(b.min_boundary_distance <= 1.0 + 1e-12);
  CHECK(b.min_boundary_distance > 0.85);
  CHECK(b.slice_domain.yes());
  // Slice at a small angle from the carrier: one component containing projected centres.
  const UnitImaginary close = i.rotated_toward(UnitImaginary::j(), 0.05, UnitImaginary::k());
  const PlanarRegionGrid g = rasterize(*b.tube.spec(), close, SliceExtent::Full);
  CHECK(connected_components(g).count == 1);
  CHECK(g.occupied_at({0.0, 1.5 * std::cos(0.05)}));

  const TubeBuild real = build_tube({{-0.5, 0.0}, {0.5, 0.0}}, i, Y, 0.5);
  CHECK(real.slice_domain.yes());
  CHECK(is_symmetric(*real.tube.spec(), SphereSample::fibonacci(8)).yes());
}

TEST_CASE("tube hypotheses are validated") {
  const UnitImaginary i = UnitImaginary::i();
  const DomainSpec Y = make_ball(Quaternion(), 3.0);
  CHECK(tube_path_violation({{0.0, 2.0}, {0.0, 1.0}}, i, Y).value() == "path does not meet the real axis");
  CHECK(tube_path_violation({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}, i, Y).value() ==
        "intersection with the real axis is not an interval");
  CHECK(tube_path_violation({{0.0, 4.0}, {0.0, 0.0}}, i, Y).value() == "path leaves the domain");
  CHECK(tube_path_violation({{0.0, -1.0}, {0.0, 0.0}}, i, Y).has_value());
  CHECK_THROWS_AS(build_tube({{0.0, 2.0}, {0.0, 1.0}}, i, Y), Error);
  CHECK_FALSE(tube_path_violation({{0.0, 2.0}, {0.0, 0.0}}, i, Y).has_value());
}

TEST_CASE("local extension in the ball") {
  const FamilyPtr f = polynomial_family(square());
  const LocalExtension le = local_extend(f, ball(), SliceCoord(0.3, 0.4, UnitImaginary::i()));
  CHECK(le.gamma.front() == Point2{0.3, 0.4});
  CHECK(le.gamma.back().y == 0.0);
  CHECK(le.lambda_is_slice_domain);
  CHECK(le.real_error <= 1e-9);
  CHECK(le.tube_error <= 1e-8);
  CHECK(le.tube_points == 100);
  CHECK(le.J0.angle(le.K0) > 0.0);
  CHECK(le.J0.distance(le.K0) < le.M.epsilon() / le.M.y_ref());
  const Stem s = le.g.coeffs(0.2, 0.1);
  CHECK((s.b - Quaternion(0.04 - 0.01)).norm() < 1e-12);
  CHECK((s.c - Quaternion(0.04)).norm() < 1e-12);

  const LocalExtension re = local_extend(f, ball(), SliceCoord::real(0.2));
  CHECK(re.gamma.size() == 1);
  CHECK(re.tube_error <= 1e-8);
  CHECK(is_symmetric(*re.N, SphereSample::fibonacci(8)).yes());
}

TEST_CASE("global extension on a simple star-shaped domain") {
  auto a = std::make_shared<const DomainSpec>(make_ball(Quaternion(), 1.0));
  auto b = std::make_shared<const DomainSpec>(make_ball(Quaternion(0.0, 0.6, 0.0, 0.0), 0.8));
  DomainSpec star = make_boolean(BooleanOp::Union, a, b);
  star.h = 0.02;
  auto omega = std::make_shared<const DomainSpec>(std::move(star));
  std::mt19937_64 rng(4);
  const PowerSeries p = random_poly(rng, 4);
  CompletionOptions opts;
  opts.step = 0.1;
  const SphereSample sample = SphereSample::fibonacci(16);
  const GlobalExtension ge = extend_to_completion(polynomial_family(p), omega, sample, opts);
  CHECK(ge.report.max_defect <= 1e-8);
  CHECK(ge.report.spheres.size() > 100);
  for (const auto& s : ge.report.spheres) CHECK(s.all_pairs_spread < 1e-8);
  const UnitImaginary J(0.2, -0.5, 0.7);
  CHECK((ge.g.eval(0.3, 0.5, J) - p.eval(slice_point(0.3, 0.5, J))).norm() < 1e-10);
}

TEST_CASE("global extension of a constant") {
  const Quaternion c(1.0, -2.0, 0.5, 3.0);
  const FamilyPtr f = polynomial_family({0.0, kInf, {c}});
  CompletionOptions opts;
  opts.step = 0.25;
  DomainSpec d = make_ball(Quaternion(), 1.0);
  d.h = 0.02;
  const GlobalExtension ge =
      extend_to_completion(f, std::make_shared<const DomainSpec>(d), SphereSample::fibonacci(8), opts);
  CHECK(ge.report.max_defect < 1e-13);
  CHECK((ge.g.eval(0.1, 0.2, UnitImaginary::k()) - c).norm() < 1e-14);
}
