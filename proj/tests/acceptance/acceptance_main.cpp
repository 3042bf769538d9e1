// Acceptance checks: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "slicereg/counterexample.hpp"
#include "slicereg/error.hpp"
#include "slicereg/extension.hpp"

using namespace slicereg;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Result {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

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

PowerSeries test_poly() {
  return PowerSeries{0.0, kInf,
                     {Quaternion(1.0, 0.5, 0.0, 0.0), Quaternion(0.0, 0.0, 1.0, 0.0), Quaternion(0.0, 0.0, 0.0, -0.5),
                      Quaternion(0.25, 0.25, 0.25, 0.25)}};
}

CounterexampleConfig counterexample_config(double h = 0.01) {
  CounterexampleConfig cfg;
  cfg.I0 = UnitImaginary::k();
  cfg.h = h;
  return cfg;
}

DomainPtr ball_domain() { return std::make_shared<const DomainSpec>(make_ball(Quaternion(), 1.0)); }

/// Star-shaped about 0: unit ball union the slicewise half-plane x + 2y < 1/2.
DomainPtr star_domain() {
  auto a = ball_domain();
  auto b = std::make_shared<const DomainSpec>(make_halfspace_slicewise(1.0, 2.0, 0.5, Box2{-2.0, 2.0, 0.0, 2.0}));
  DomainSpec s = make_boolean(BooleanOp::Union, a, b);
  s.bbox = {-2.0, 2.0, 0.0, 2.0};
  s.h = 0.01;
  return std::make_shared<const DomainSpec>(std::move(s));
}

// 1. Coefficient identities.
void criterion1(Result& r) {
  std::mt19937_64 rng(101);
  double e1 = 0.0, e2 = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const UnitImaginary J = random_unit(rng), K = random_unit(rng);
    const Quaternion inv = inverse(J.q() - K.q());
    e1 = std::max(e1, (inv * J.q() + J.q() * inv - Quaternion(1.0)).norm());
    e2 = std::max(e2, (inv * K.q() + J.q() * inv).norm());
  }
  r.detail << "max errors " << e1 << ", " << e2;
  r.require(e1 <= 1e-12 && e2 <= 1e-12, "identities within 1e-12");
}

// 2. Representation round trip and pair independence.
void criterion2(Result& r) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(1, 8);
  double round_trip = 0.0, spread = 0.0;
  for (int p = 0; p < 20; ++p) {
    const PowerSeries f = random_poly(rng, deg(rng));
    for (int k = 0; k < 200; ++k) {
      const double x = u(rng), y = std::abs(u(rng)) + 1e-3;
      const UnitImaginary I = random_unit(rng), J = random_unit(rng), K = random_unit(rng);
      const UnitImaginary J2 = random_unit(rng), K2 = random_unit(rng);
      const auto at = [&](const UnitImaginary& U) { return f.eval(slice_point(x, y, U)); };
      const Stem s = rep_coeffs(at(J), at(K), J, K);
      const Stem s2 = rep_coeffs(at(J2), at(K2), J2, K2);
      round_trip = std::max(round_trip, (rep_eval(s, I) - at(I)).norm());
      spread = std::max(spread, std::max((s.b - s2.b).norm(), (s.c - s2.c).norm()));
    }
  }
  r.detail << "round trip " << round_trip << ", pair spread " << spread;
  r.require(round_trip <= 1e-10, "round trip within 1e-10");
  r.require(spread <= 1e-10, "pair independence within 1e-10");
}

// 3. Extension formula restricts to r on L_J and to s on L_K.
void criterion3(Result& r) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double same = 0.0, independent = 0.0;
  for (int t = 0; t < 20; ++t) {
    const UnitImaginary J = random_unit(rng), K = random_unit(rng);
    const PowerSeries p = random_poly(rng, 5), q = random_poly(rng, 5);
    // A compatible pair (one polynomial on both slices) and an arbitrary pair of
    // polynomials (real traces differ, so the real-axis validation is switched off).
    const ExtensionFormula f1(HoloSliceFunction::power_series(p, J), J, HoloSliceFunction::power_series(p, K), K);
    ExtensionOptions loose;
    loose.real_tol = kInf;
    const ExtensionFormula f2(HoloSliceFunction::power_series(p, J), J, HoloSliceFunction::power_series(q, K), K, loose);
    for (int k = 0; k < 50; ++k) {
      const double x = 2.0 * u(rng), y = 1e-3 + 2.0 * std::abs(u(rng));
      const Quaternion rJ = p.eval(slice_point(x, y, J)), pK = p.eval(slice_point(x, y, K));
      const Quaternion sK = q.eval(slice_point(x, y, K));
      same = std::max({same, (f1(x, y, J) - rJ).norm() / (1.0 + rJ.norm()),
                       (f1(x, y, K) - pK).norm() / (1.0 + pK.norm())});
      independent = std::max({independent, (f2(x, y, J) - rJ).norm() / (1.0 + rJ.norm()),
                              (f2(x, y, K) - sK).norm() / (1.0 + sK.norm())});
    }
  }
  r.detail << "compatible pair " << same << ", independent pair " << independent << " (relative)";
  r.require(same <= 1e-12 && independent <= 1e-12, "restrictions within 1e-12");
}

struct DbarStats {
  double worst = 0.0;      ///< max residual / (1 + |f|) at h = 1e-4
  double coarse = 0.0;     ///< sum of residuals at h = 1e-3
  double fine = 0.0;       ///< sum of residuals at h = 5e-4
  int points = 0;
};

/// Residuals of the slices of a stem pair, at points drawn by `draw` on each of 10 units.
void dbar_on(const StemPair& pair, const std::function<bool(const UnitImaginary&, std::mt19937_64&, double&, double&)>& draw,
             const std::vector<UnitImaginary>& units, std::mt19937_64& rng, DbarStats& st) {
  auto shared = std::make_shared<const StemPair>(pair);
  for (const auto& I : units) {
    const HoloSliceFunction fI = HoloSliceFunction::stem_restriction(shared, I);
    int got = 0;
    for (int tries = 0; got < 100 && tries < 20000; ++tries) {
      double x, y;
      if (!draw(I, rng, x, y)) continue;
      try {
        const double scale = 1.0 + fI.eval(x, y).norm();
        const double r0 = dbar_residual(fI, x, y, 1e-4);
        const double r1 = dbar_residual(fI, x, y, 1e-3);
        const double r2 = dbar_residual(fI, x, y, 5e-4);
        st.worst = std::max(st.worst, r0 / scale);
        st.coarse += r1;
        st.fine += r2;
        ++got;
      } catch (const Error&) {
        continue;
      }
    }
    st.points += got;
  }
}

// 4. dbar residual of produced stem pairs.
void criterion4(Result& r) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const PowerSeries f = test_poly();
  const DomainPtr ball = ball_domain();
  std::vector<UnitImaginary> units;
  for (int k = 0; k < 10; ++k) units.push_back(random_unit(rng));
  auto in_ball = [&](const UnitImaginary&, std::mt19937_64& g, double& x, double& y) {
    std::uniform_real_distribution<double> v(-0.95, 0.95);
    x = v(g);
    y = std::abs(v(g));
    return std::hypot(x, y) < 0.95 && y > 1e-2;
  };
  auto report = [&](const char* name, const DbarStats& st) {
    const double ratio = st.coarse / st.fine;
    r.detail << name << ": worst " << st.worst << ", ratio " << ratio << ", points " << st.points << "; ";
    r.require(st.points == 1000, std::string(name) + " sampled 10 x 100 points");
    r.require(st.worst <= 1e-6, std::string(name) + " residual <= 1e-6 (1 + |f|)");
    r.require(ratio >= 3.2 && ratio <= 4.8, std::string(name) + " convergence ratio 4 +- 20%");
  };

  DbarStats a;
  dbar_on(regular_ext(HoloSliceFunction::power_series(f, UnitImaginary::i()), ball), in_ball, units, rng, a);
  report("regular_ext", a);

  const FamilyPtr fam = polynomial_family(f);
  const LocalExtension le = local_extend(fam, ball, SliceCoord(0.1, 0.5, UnitImaginary::j()));
  const TubeDomain lam = le.Lambda;
  auto in_lambda = [&](const UnitImaginary& I, std::mt19937_64& g, double& x, double& y) {
    std::uniform_real_distribution<double> v(0.0, 1.0);
    const auto& path = lam.path();
    const std::size_t seg = static_cast<std::size_t>(v(g) * path.size()) % path.size();
    const Point2 p = path[seg], q = seg + 1 < path.size() ? path[seg + 1] : p;
    const double t = v(g);
    const Point2 c{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
    const double rho = lam.radius_at(c.y);
    x = c.x + rho * (2.0 * v(g) - 1.0);
    y = c.y * I.dot(lam.carrier()) + rho * (2.0 * v(g) - 1.0);
    return y > 2e-3 && le.N->contains(x, y, I);
  };
  DbarStats b;
  dbar_on(le.g, in_lambda, units, rng, b);
  report("local_extend", b);

  CounterexampleConfig cfg = counterexample_config();
  const auto omega = std::make_shared<const DomainSpec>(omega_spec(cfg));
  const LocalExtension lc = local_extend(g_family(cfg), omega, SliceCoord(2.0, 1.0, cfg.I0));
  const TubeDomain lam_c = lc.Lambda;
  auto in_lambda_c = [&](const UnitImaginary& I, std::mt19937_64& g, double& x, double& y) {
    std::uniform_real_distribution<double> v(0.0, 1.0);
    const auto& path = lam_c.path();
    const std::size_t seg = static_cast<std::size_t>(v(g) * path.size()) % path.size();
    const Point2 p = path[seg], q = seg + 1 < path.size() ? path[seg + 1] : p;
    const double t = v(g);
    const Point2 c{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
    const double rho = lam_c.radius_at(c.y);
    x = c.x + rho * (2.0 * v(g) - 1.0);
    y = c.y * I.dot(lam_c.carrier()) + rho * (2.0 * v(g) - 1.0);
    return y > 2e-3 && lc.N->contains(x, y, I);
  };
  DbarStats c;
  dbar_on(lc.g, in_lambda_c, units, rng, c);
  report("local_extend(counterexample)", c);

  CompletionOptions co;
  co.step = 0.1;
  const GlobalExtension ge = extend_to_completion(fam, ball, SphereSample::fibonacci(16), co);
  DbarStats d;
  dbar_on(ge.g, in_ball, units, rng, d);
  report("extend_to_completion", d);
}

// 5. Counterexample discrete facts at two resolutions, and the ball is simple.
void criterion5(Result& r) {
  for (double h : {0.01, 0.005}) {
    const CounterexampleConfig cfg = counterexample_config(h);
    const DomainSpec omega = omega_spec(cfg);
    const int tu = connected_components(t_cap_u_grid(cfg)).count;
    const int pair = connected_components(omega_jk_plus(omega, cfg.I0, -cfg.I0)).count;
    const Verdict simple = is_simple(omega, SphereSample::fibonacci(64, {cfg.I0}));
    const bool antipodal = simple.witness_units.size() == 2 &&
                           simple.witness_units[0].distance(-simple.witness_units[1]) < 1e-12;
    r.detail << "h=" << h << ": T&U " << tu << ", Omega+ " << pair << ", simple " << simple.label()
             << (antipodal ? " (antipodal witness)" : "") << "; ";
    r.require(tu == 3, "T&U has 3 components");
    r.require(pair == 2, "Omega_{I0,-I0}^+ has 2 components");
    r.require(simple.no() && antipodal, "not simple with an antipodal witness");
  }
  const Verdict ball = is_simple(*ball_domain(), SphereSample::fibonacci(64));
  r.detail << "ball " << ball.label();
  r.require(ball.yes(), "ball simple at N=64");
}

// 6. Jump reproduction.
void criterion6(Result& r) {
  const CounterexampleReport rep = demonstrate(counterexample_config(), DemonstrateOptions{});
  r.detail << "disk fraction " << rep.jump.disk_fraction << " of " << rep.jump.disk_cells << ", other max "
           << rep.jump.other_max << " on " << rep.jump.other_cells << ", orderings: on I0 " << rep.orderings.jump_on_I0
           << ".." << rep.orderings.jump_on_I0_max << ", law error " << rep.orderings.law_error << ", outside max "
           << rep.orderings.outside_max;
  r.require(rep.jump.disk_fraction >= 0.95, "|r - s| = 2 pi on >= 95% of disk cells");
  r.require(rep.jump.other_max <= 1e-8, "|r - s| <= 1e-8 on the other components");
  r.require(std::abs(rep.orderings.jump_on_I0 - 2.0 * kPi) <= 1e-6 &&
                std::abs(rep.orderings.jump_on_I0_max - 2.0 * kPi) <= 1e-6,
            "orderings differ by 2 pi inside the completed disk");
  r.require(rep.orderings.law_error <= 1e-6, "difference follows pi |I0 + I'|");
  r.require(rep.orderings.outside_max <= 1e-8, "orderings agree outside");
}

// 7. Local extension end to end.
void criterion7(Result& r) {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> ux(-4.9, 4.9), uy(0.02, 4.9), ub(-1.0, 1.0);
  const CounterexampleConfig cfg = counterexample_config();
  const auto omega = std::make_shared<const DomainSpec>(omega_spec(cfg));
  const FamilyPtr G = g_family(cfg);
  const FamilyPtr poly = polynomial_family(test_poly());
  const DomainPtr ball = ball_domain();
  double real_err = 0.0, tube_err = 0.0;
  int ok_tubes = 0, runs = 0, short_samples = 0;
  auto run = [&](const FamilyPtr& f, const DomainPtr& dom, const SliceCoord& p) {
    LocalExtensionOptions lo;
    lo.seed = static_cast<std::uint64_t>(runs);
    const LocalExtension le = local_extend(f, dom, p, lo);
    real_err = std::max(real_err, le.real_error);
    tube_err = std::max(tube_err, le.tube_error);
    ok_tubes += le.lambda_is_slice_domain ? 1 : 0;
    short_samples += le.tube_points < 100 ? 1 : 0;
    ++runs;
  };
  for (int k = 0; k < 10;) {
    const double x = ux(rng), y = uy(rng);
    const UnitImaginary J = random_unit(rng);
    if (!omega->contains(x, y, J) || omega->cut_distance(slice_point(x, y, J)) < 0.02) continue;
    run(G, omega, SliceCoord(x, y, J));
    ++k;
  }
  for (int k = 0; k < 10;) {
    const double x = ub(rng), y = std::abs(ub(rng));
    if (std::hypot(x, y) >= 0.98 || y < 0.02) continue;
    run(poly, ball, SliceCoord(x, y, random_unit(rng)));
    ++k;
  }
  r.detail << runs << " runs, real error " << real_err << ", tube error " << tube_err << ", slice-domain tubes "
           << ok_tubes << "/" << runs;
  r.require(real_err <= 1e-9, "g = f on N & R within 1e-9");
  r.require(tube_err <= 1e-8, "g = f on Lambda within 1e-8");
  r.require(short_samples == 0, "100 points of Lambda per run");
  r.require(ok_tubes == runs, "every tube is a slice domain");
}

// 8. Global extension dichotomy.
void criterion8(Result& r) {
  CompletionOptions co;
  co.step = 0.1;
  const GlobalExtension star = extend_to_completion(polynomial_family(test_poly()), star_domain(),
                                                    SphereSample::fibonacci(64), co);
  double worst = 0.0;
  for (const auto& s : star.report.spheres) worst = std::max(worst, s.defect);
  r.detail << "star: " << star.report.spheres.size() << " spheres, max defect " << worst << "; ";
  r.require(!star.report.spheres.empty() && worst <= 1e-8, "star-shaped domain defect <= 1e-8");

  const CounterexampleConfig cfg = counterexample_config();
  co.force = true;
  const GlobalExtension ce = extend_to_completion(g_family(cfg),
                                                  std::make_shared<const DomainSpec>(omega_spec(cfg)),
                                                  SphereSample::fibonacci(64, {cfg.I0}), co);
  int disk = 0, jump = 0;
  for (const auto& s : ce.report.spheres) {
    if (std::hypot(s.x + 1.0, s.y - 2.0) >= 1.0) continue;
    ++disk;
    if (std::abs(s.defect - 2.0 * kPi) <= 1e-3) ++jump;
  }
  r.detail << "counterexample: " << jump << " of " << disk << " disk spheres with defect 2 pi +- 1e-3, max defect "
           << ce.report.max_defect;
  r.require(jump >= 1, "defect 2 pi on a sphere through the completed disk");
}

// 9. Identity principle: extensions from two slices agree.
void criterion9(Result& r) {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DomainPtr ball = ball_domain();
  double worst = 0.0;
  int points = 0;
  for (int p = 0; p < 5; ++p) {
    const PowerSeries f = random_poly(rng, 6);
    const StemPair a = regular_ext(HoloSliceFunction::power_series(f, UnitImaginary::i()), ball);
    const StemPair b = regular_ext(HoloSliceFunction::power_series(f, UnitImaginary::j()), ball);
    for (int k = 0; k < 200;) {
      const double x = u(rng), y = std::abs(u(rng));
      if (std::hypot(x, y) >= 1.0) continue;
      const UnitImaginary I = random_unit(rng);
      worst = std::max(worst, (a.eval(x, y, I) - b.eval(x, y, I)).norm());
      ++points;
      ++k;
    }
  }
  r.detail << points << " points, max difference " << worst;
  r.require(worst <= 1e-8, "agreement within 1e-8");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    void (*run)(Result&);
  };
  const Criterion criteria[] = {
      {1, "coefficient identities", 1.0, criterion1},
      {2, "representation round trip", 5.0, criterion2},
      {3, "extension formula restrictions", 5.0, criterion3},
      {4, "dbar verification of stem pairs", 30.0, criterion4},
      {5, "counterexample discrete facts", 120.0, criterion5},
      {6, "jump reproduction", 120.0, criterion6},
      {7, "local extension end to end", 120.0, criterion7},
      {8, "global extension dichotomy", 180.0, criterion8},
      {9, "identity principle", 10.0, criterion9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Result r;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.limit_seconds) {
      r.pass = false;
      r.detail << " [over time limit " << c.limit_seconds << " s]";
    }
    std::printf("criterion %d (%s): %s in %.2f s | %s\n", c.id, c.name, r.pass ? "PASS" : "FAIL", seconds,
                r.detail.str().c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
