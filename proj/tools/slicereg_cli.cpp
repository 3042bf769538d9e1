#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "slicereg/counterexample.hpp"
#include "slicereg/error.hpp"
#include "slicereg/extension.hpp"
#include "slicereg/io.hpp"

using namespace slicereg;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string spec;
  std::string out = "slicereg-out";
  std::string fn;
  double h = 0.0;
  int samples = 64;
  std::optional<double> tol;
  std::uint64_t seed = 0;
  bool force = false;
  bool plots = false;
  std::vector<double> J{1.0, 0.0, 0.0};
  std::vector<double> K{0.0, 1.0, 0.0};
  std::vector<double> point;
  std::vector<double> path;
  double step = 0.1;
};

/// Exit status of a check that ran to completion.
struct Outcome {
  Json report;
  bool passed = true;
};

UnitImaginary unit_of(const std::vector<double>& v, const char* flag) {
  if (v.size() != 3) throw Error(ErrorKind::Input, std::string(flag) + " expects three comma-separated numbers");
  return UnitImaginary(v[0], v[1], v[2]);
}

LoadedDomain load(const RunConfig& rc, bool required = true) {
  if (rc.spec.empty()) {
    if (required) throw Error(ErrorKind::Input, "a domain spec file is required");
    return {};
  }
  LoadedDomain d = load_domain(rc.spec);
  if (rc.h > 0.0) {
    if (d.counterexample) {
      d.counterexample->h = rc.h;
      d.domain = std::make_shared<const DomainSpec>(omega_spec(*d.counterexample));
    } else {
      DomainSpec copy = *d.domain;
      copy.h = rc.h;
      d.domain = std::make_shared<const DomainSpec>(std::move(copy));
    }
  }
  return d;
}

PowerSeries series_of(const RunConfig& rc) {
  if (rc.fn.empty()) return named_series("mixed");
  if (fs::exists(rc.fn)) return parse_series(read_text(rc.fn), rc.fn);
  return named_series(rc.fn);
}

FamilyPtr family_of(const RunConfig& rc, const LoadedDomain& d) {
  if (rc.fn == "G" || (rc.fn.empty() && d.counterexample)) {
    if (!d.counterexample) throw Error(ErrorKind::Input, "function G needs a counterexample domain");
    return g_family(*d.counterexample);
  }
  return polynomial_family(series_of(rc));
}

double tol_or(const RunConfig& rc, double fallback) { return rc.tol.value_or(fallback); }

UnitImaginary random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  return UnitImaginary(n01(rng), n01(rng), n01(rng));
}

Outcome check_domain(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  const DomainSpec& om = *d.domain;
  const SphereSample sample = SphereSample::fibonacci(rc.samples);
  const Verdict sd = is_slice_domain(om, sample);
  const Verdict sym = is_symmetric(om, sample);
  const Verdict conv = is_slice_convex(om, sample, rc.seed);
  const Verdict simple = is_simple(om, sample);
  Outcome o;
  o.report["slice_domain"] = to_string(sd.kind);
  o.report["symmetric"] = to_string(sym.kind);
  o.report["slice_convex"] = to_string(conv.kind);
  o.report["simple"] = simple.label();
  o.report["details"] = {{"slice_domain", to_json(sd)},
                         {"symmetric", to_json(sym)},
                         {"slice_convex", to_json(conv)},
                         {"simple", to_json(simple)}};
  if (rc.plots) {
    const PlanarRegionGrid g = rasterize(om, sample.units().front(), SliceExtent::Full);
    write_pgm((fs::path(rc.out) / "slice.pgm").string(), g);
    write_labels_csv((fs::path(rc.out) / "slice_labels.csv").string(), g, connected_components(g));
    if (simple.no() && simple.witness_units.size() == 2) {
      const PlanarRegionGrid w = omega_jk_plus(om, simple.witness_units[0], simple.witness_units[1]);
      write_labels_pgm((fs::path(rc.out) / "witness_labels.pgm").string(), w, connected_components(w));
    }
  }
  return o;
}

Outcome completion(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  const SphereSample sample = SphereSample::fibonacci(rc.samples);
  const DomainSpec comp = symmetric_completion(*d.domain, sample);
  const DomainSpec& om = *d.domain;
  std::size_t meeting = 0, inside = 0, total = 0;
  const double step = rc.step;
  for (long j = 1; j * step <= om.bbox.ymax + 1e-9; ++j) {
    for (long i = static_cast<long>(std::ceil(om.bbox.xmin / step - 1e-9)); i * step <= om.bbox.xmax + 1e-9; ++i) {
      std::size_t hits = 0;
      for (const auto& u : sample.units()) hits += om.contains(i * step, j * step, u) ? 1 : 0;
      ++total;
      if (hits) ++meeting;
      if (hits == sample.size()) ++inside;
    }
  }
  Outcome o;
  o.report["domain"] = to_json(om);
  o.report["completion"] = to_json(comp);
  o.report["completion"]["symmetric"] = to_string(is_symmetric(comp, sample).kind);
  o.report["coverage"] = {{"step", step},
                          {"spheres", total},
                          {"spheres_meeting_domain", meeting},
                          {"spheres_inside_domain", inside},
                          {"spheres_added_by_completion", meeting - inside}};
  o.report["samples"] = sample.size();
  if (rc.plots) write_pgm((fs::path(rc.out) / "completion.pgm").string(), rasterize(comp, UnitImaginary::i(), SliceExtent::Full));
  return o;
}

Outcome repr(const RunConfig& rc) {
  const PowerSeries f = series_of(rc);
  const double tol = tol_or(rc, 1e-10);
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double round_trip = 0.0, pair_spread = 0.0;
  constexpr int n = 200;
  for (int k = 0; k < n; ++k) {
    const double x = u(rng), y = std::abs(u(rng));
    const UnitImaginary I = random_unit(rng), J = random_unit(rng), K = random_unit(rng), L = random_unit(rng);
    const auto at = [&](const UnitImaginary& U) { return f.eval(slice_point(x, y, U)); };
    const Quaternion fI = at(I);
    const double scale = 1.0 + fI.norm();
    const Stem s1 = rep_coeffs(at(J), at(K), J, K);
    const Stem s2 = rep_coeffs(at(J), at(L), J, L);
    round_trip = std::max(round_trip, (rep_eval(s1, I) - fI).norm() / scale);
    pair_spread = std::max(pair_spread, ((s1.b - s2.b).norm() + (s1.c - s2.c).norm()) / scale);
  }
  Outcome o;
  o.report = {{"function_degree", f.coeffs.size() - 1},
              {"points", n},
              {"round_trip_error", round_trip},
              {"pair_spread", pair_spread},
              {"tol", tol}};
  o.passed = round_trip <= tol && pair_spread <= tol;
  return o;
}

Outcome extend(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  const PowerSeries f = series_of(rc);
  const UnitImaginary J = unit_of(rc.J, "--J"), K = unit_of(rc.K, "--K");
  const double tol = tol_or(rc, 1e-10);
  ExtensionOptions eo;
  eo.real_xmin = d.domain->bbox.xmin;
  eo.real_xmax = d.domain->bbox.xmax;
  const ExtensionFormula ext(HoloSliceFunction::power_series(f, J), J, HoloSliceFunction::power_series(f, K), K, eo);
  std::mt19937_64 rng(rc.seed);
  double max_err = 0.0;
  std::size_t points = 0;
  std::string csv = "x,y,b_w,b_x,b_y,b_z,c_w,c_x,c_y,c_z\n";
  const Box2& b = d.domain->bbox;
  for (long j = 1; j * rc.step <= b.ymax + 1e-9; ++j) {
    for (long i = static_cast<long>(std::ceil(b.xmin / rc.step - 1e-9)); i * rc.step <= b.xmax + 1e-9; ++i) {
      const double x = i * rc.step, y = j * rc.step;
      if (!d.domain->contains(x, y, J) || !d.domain->contains(x, y, K)) continue;
      const UnitImaginary I = random_unit(rng);
      const Quaternion want = f.eval(slice_point(x, y, I));
      max_err = std::max(max_err, (ext(x, y, I) - want).norm() / (1.0 + want.norm()));
      ++points;
      const Stem s = ext.coeffs(x, y);
      char buf[512];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x, y, s.b.w,
                    s.b.x, s.b.y, s.b.z, s.c.w, s.c.x, s.c.y, s.c.z);
      csv += buf;
    }
  }
  write_text((fs::path(rc.out) / "extension.csv").string(), csv);
  Outcome o;
  o.report = {{"J", to_json(J)},
              {"K", to_json(K)},
              {"points", points},
              {"max_error", max_err},
              {"real_trace_mismatch", ext.real_trace_mismatch()},
              {"tol", tol}};
  o.passed = max_err <= tol;
  return o;
}

/// Worst relative dbar residual of the slices of a stem pair on random points of the domain.
double stem_dbar(const StemPair& pair, const DomainSpec& om, std::mt19937_64& rng, int units, int points) {
  std::uniform_real_distribution<double> ux(om.bbox.xmin, om.bbox.xmax), uy(0.0, om.bbox.ymax);
  auto shared = std::make_shared<const StemPair>(pair);
  double worst = 0.0;
  for (int a = 0; a < units; ++a) {
    const UnitImaginary I = random_unit(rng);
    const HoloSliceFunction fI = HoloSliceFunction::stem_restriction(shared, I);
    int done = 0;
    for (int tries = 0; done < points && tries < 50 * points; ++tries) {
      const double x = ux(rng), y = uy(rng);
      if (y < 1e-2 || boundary_distance(om, slice_point(x, y, I), 1e-2) < 5e-3) continue;
      const double r = dbar_residual(fI, x, y, 1e-4);
      worst = std::max(worst, r / (1.0 + fI.eval(x, y).norm()));
      ++done;
    }
  }
  return worst;
}

Outcome ext_slice(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  const PowerSeries f = series_of(rc);
  const UnitImaginary J = unit_of(rc.J, "--J");
  const double tol = tol_or(rc, 1e-9);
  const SphereSample check = SphereSample::fibonacci(16, {J});
  const StemPair pair = regular_ext(HoloSliceFunction::power_series(f, J), d.domain, &check);
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> ux(d.domain->bbox.xmin, d.domain->bbox.xmax), uy(0.0, d.domain->bbox.ymax);
  double max_err = 0.0;
  int points = 0;
  for (int tries = 0; points < 500 && tries < 50000; ++tries) {
    const double x = ux(rng), y = uy(rng);
    const UnitImaginary I = random_unit(rng);
    if (!d.domain->contains(x, y, I)) continue;
    const Quaternion want = f.eval(slice_point(x, y, I));
    max_err = std::max(max_err, (pair.eval(x, y, I) - want).norm() / (1.0 + want.norm()));
    ++points;
  }
  const double dbar = stem_dbar(pair, *d.domain, rng, 10, 100);
  write_stem_csv((fs::path(rc.out) / "stems.csv").string(), pair, d.domain->bbox, rc.step);
  Outcome o;
  o.report = {{"J", to_json(J)}, {"points", points}, {"max_error", max_err}, {"dbar_residual", dbar}, {"tol", tol}};
  o.passed = max_err <= tol && dbar <= 1e-6;
  return o;
}

Json polyline_json(const Polyline& line) {
  Json j = Json::array();
  for (const auto& p : line) j.push_back(to_json(p));
  return j;
}

Json tube_json(const TubeDomain& t) {
  return {{"carrier", to_json(t.carrier())}, {"epsilon", t.epsilon()}, {"y_ref", t.y_ref()}, {"path", polyline_json(t.path())}};
}

SliceCoord default_point(const LoadedDomain& d) {
  if (d.counterexample) return SliceCoord(-1.0, 2.5, d.counterexample->I0);
  const Box2& b = d.domain->bbox;
  return SliceCoord(0.5 * (b.xmin + b.xmax), 0.25 * b.ymax, UnitImaginary::i());
}

Outcome local_extend_cmd(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  const FamilyPtr f = family_of(rc, d);
  SliceCoord p0 = default_point(d);
  if (!rc.point.empty()) {
    if (rc.point.size() != 4) throw Error(ErrorKind::Input, "--point expects four comma-separated numbers");
    p0 = slice_decompose(Quaternion(rc.point[0], rc.point[1], rc.point[2], rc.point[3]));
  }
  LocalExtensionOptions lo;
  lo.seed = rc.seed;
  if (rc.tol) lo.tube_tol = *rc.tol;
  const LocalExtension le = local_extend(f, d.domain, p0, lo);
  Outcome o;
  o.report = {{"point", to_json(p0.to_quaternion())},
              {"J0", to_json(le.J0)},
              {"K0", to_json(le.K0)},
              {"gamma", polyline_json(le.gamma)},
              {"M", tube_json(le.M)},
              {"Lambda", tube_json(le.Lambda)},
              {"real_error", le.real_error},
              {"tube_error", le.tube_error},
              {"tube_points", le.tube_points},
              {"lambda_is_slice_domain", le.lambda_is_slice_domain}};
  o.passed = le.real_error <= lo.real_tol && le.tube_error <= lo.tube_tol && le.lambda_is_slice_domain;
  if (rc.plots) {
    const Box2& b = le.Lambda.spec()->bbox;
    write_stem_csv((fs::path(rc.out) / "stems.csv").string(), le.g, b, std::max(le.Lambda.spec()->h, (b.xmax - b.xmin) / 200.0));
  }
  return o;
}

Outcome global_extend(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  const FamilyPtr f = family_of(rc, d);
  const SphereSample sample = SphereSample::fibonacci(rc.samples, d.counterexample ? std::vector{d.counterexample->I0}
                                                                                    : std::vector<UnitImaginary>{});
  CompletionOptions co;
  co.step = rc.step;
  co.force = rc.force;
  if (rc.tol) co.tol = *rc.tol;
  const GlobalExtension ge = extend_to_completion(f, d.domain, sample, co);
  Outcome o;
  o.report = to_json(ge.report);
  o.report["step"] = co.step;
  o.report["samples"] = sample.size();
  o.passed = ge.report.over_tolerance == 0;
  if (rc.plots) {
    std::string csv = "x,y,defect,all_pairs_spread,units_in_domain\n";
    char buf[160];
    for (const auto& s : ge.report.spheres) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n", s.x, s.y, s.defect, s.all_pairs_spread,
                    s.units_in_domain);
      csv += buf;
    }
    write_text((fs::path(rc.out) / "defects.csv").string(), csv);
  }
  if (o.passed) write_stem_csv((fs::path(rc.out) / "stems.csv").string(), ge.g, d.domain->bbox, co.step);
  return o;
}

Outcome counterexample_cmd(const RunConfig& rc) {
  const LoadedDomain d = load(rc, false);
  CounterexampleConfig cfg;
  cfg.I0 = UnitImaginary::k();
  if (d.domain) {
    if (!d.counterexample) throw Error(ErrorKind::Input, "the counterexample command needs a counterexample spec");
    cfg = *d.counterexample;
  }
  if (rc.h > 0.0) cfg.h = rc.h;
  DemonstrateOptions opts;
  opts.samples = rc.samples;
  opts.seed = rc.seed;
  const CounterexampleReport rep = demonstrate(cfg, opts);
  const fs::path out(rc.out);
  write_pgm((out / "slice.pgm").string(), rep.slice_grid);
  write_labels_pgm((out / "t_cap_u_labels.pgm").string(), rep.tu_grid, rep.tu_labels);
  write_labels_pgm((out / "omega_pair_labels.pgm").string(), rep.omega_pair_grid, rep.omega_pair_labels);
  std::string heat = "x,y,jump\n";
  char buf[96];
  for (const auto& h : rep.heat) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", h[0], h[1], h[2]);
    heat += buf;
  }
  write_text((out / "jump_heat.csv").string(), heat);
  if (rc.plots) {
    write_labels_csv((out / "t_cap_u_labels.csv").string(), rep.tu_grid, rep.tu_labels);
    write_labels_csv((out / "omega_pair_labels.csv").string(), rep.omega_pair_grid, rep.omega_pair_labels);
  }
  Outcome o;
  Json sizes = Json::array();
  for (auto s : rep.tu_sizes) sizes.push_back(s);
  o.report = {{"I0", to_json(cfg.I0)},
              {"h", cfg.h},
              {"arc_orientation", arc_orientation()},
              {"slice_domain", rep.slice_domain.label()},
              {"t_cap_u_components", rep.tu_components},
              {"t_cap_u_sizes", sizes},
              {"omega_pair_components", rep.omega_pair_components},
              {"omega_pair_disk_separated", rep.omega_pair_geometry},
              {"jump",
               {{"disk_cells", rep.jump.disk_cells},
                {"disk_fraction_2pi", rep.jump.disk_fraction},
                {"disk_min", rep.jump.disk_min},
                {"disk_max", rep.jump.disk_max},
                {"sign", rep.jump.sign},
                {"other_cells", rep.jump.other_cells},
                {"other_max", rep.jump.other_max}}},
              {"orderings",
               {{"inside_samples", rep.orderings.inside_samples},
                {"jump_on_I0", rep.orderings.jump_on_I0},
                {"law_error", rep.orderings.law_error},
                {"outside_samples", rep.orderings.outside_samples},
                {"outside_max", rep.orderings.outside_max}}},
              {"simple", to_json(rep.simple)},
              {"simple_witness_antipodal", rep.simple_witness_antipodal},
              {"passed", rep.passed}};
  o.passed = rep.passed;
  return o;
}

Outcome tube_cmd(const RunConfig& rc) {
  const LoadedDomain d = load(rc);
  Outcome o;
  std::shared_ptr<const TubeDomain> tube = d.tube;
  if (!tube) {
    if (rc.path.size() < 4 || rc.path.size() % 2) {
      throw Error(ErrorKind::Input, "--path expects x0,y0,x1,y1,... in the upper half-slice of --J");
    }
    Polyline path;
    for (std::size_t k = 0; k < rc.path.size(); k += 2) path.push_back({rc.path[k], rc.path[k + 1]});
    const UnitImaginary J = unit_of(rc.J, "--J");
    if (auto bad = tube_path_violation(path, J, *d.domain)) {
      o.report = {{"path", polyline_json(path)}, {"violation", *bad}};
      o.passed = false;
      return o;
    }
    const TubeBuild tb = build_tube(path, J, *d.domain);
    tube = std::make_shared<const TubeDomain>(tb.tube);
    o.report["min_boundary_distance"] = tb.min_boundary_distance;
  }
  const SphereSample check = SphereSample::fibonacci(std::max(16, rc.samples), {tube->carrier()});
  const Verdict v = is_slice_domain(*tube->spec(), check);
  o.report["tube"] = tube_json(*tube);
  o.report["slice_domain"] = v.label();
  o.passed = v.yes();
  if (rc.plots) write_pgm((fs::path(rc.out) / "tube.pgm").string(), rasterize(*tube->spec(), tube->carrier(), SliceExtent::Full));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slice regular functions on quaternionic slice domains"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  RunConfig rc;
  app.add_option("--out", rc.out, "Output directory")->capture_default_str();
  app.add_option("--h", rc.h, "Grid step (default: the domain file's)");
  app.add_option("--samples", rc.samples, "Sphere sample size N")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--tol", rc.tol, "Tolerance override");
  app.add_option("--seed", rc.seed, "Random seed")->capture_default_str();
  app.add_flag("--force", rc.force, "Run global extension on non-simple domains");
  app.add_flag("--emit-plots", rc.plots, "Write PGM/CSV plot data");
  app.add_option("--fn", rc.fn, "Test function: square, cube, mixed, G or a JSON file");
  app.add_option("--J", rc.J, "First unit vx,vy,vz")->delimiter(',');
  app.add_option("--K", rc.K, "Second unit vx,vy,vz")->delimiter(',');
  app.add_option("--point", rc.point, "Quaternion w,x,y,z")->delimiter(',');
  app.add_option("--path", rc.path, "Polyline x0,y0,x1,y1,...")->delimiter(',');
  app.add_option("--step", rc.step, "Sphere and output lattice step")->capture_default_str()->check(CLI::PositiveNumber);

  struct Command {
    const char* name;
    const char* help;
    Outcome (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"check-domain", "Slice, symmetric, convex and simple verdicts", check_domain},
      {"completion", "Symmetric completion and sphere coverage", completion},
      {"repr", "Representation round trip on a test function", repr},
      {"extend", "Extension formula over a grid", extend},
      {"ext-slice", "Regular extension from one slice", ext_slice},
      {"local-extend", "Local extension from a point", local_extend_cmd},
      {"global-extend", "Extension to the symmetric completion with a consistency report", global_extend},
      {"counterexample", "Demonstrate the non-simple domain", counterexample_cmd},
      {"tube", "Build and validate a tube domain", tube_cmd},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("spec", rc.spec, "Domain spec JSON")->check(CLI::ExistingFile);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const auto* chosen = std::find_if(std::begin(commands), std::end(commands),
                                    [&](const Command& c) { return app.got_subcommand(c.name); });
  try {
    fs::create_directories(rc.out);
    const auto start = std::chrono::steady_clock::now();
    Outcome o = chosen->run(rc);
    o.report["command"] = chosen->name;
    o.report["milliseconds"] = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    Json stable = o.report;
    stable.erase("milliseconds");
    write_json((fs::path(rc.out) / "report.json").string(), stable);
    std::cout << dump(o.report);
    if (!o.passed) std::cerr << chosen->name << ": check failed\n";
    return o.passed ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << chosen->name << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Precondition:
      case ErrorKind::Inconsistency:
      case ErrorKind::IncompatiblePair:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << chosen->name << ": " << e.what() << "\n";
    return 1;
  }
}
