#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "slicereg/counterexample.hpp"
#include "slicereg/error.hpp"
#include "slicereg/extension.hpp"
#include "slicereg/io.hpp"

namespace py = pybind11;
using namespace slicereg;

namespace {

py::object from_json(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

PowerSeries polynomial(const std::vector<Quaternion>& coeffs, double center) {
  if (coeffs.empty()) throw Error(ErrorKind::Parameter, "polynomial needs at least one coefficient");
  return PowerSeries{center, std::numeric_limits<double>::infinity(), coeffs};
}

std::string repr(const Quaternion& q) {
  std::ostringstream os;
  os.precision(17);
  os << "Quaternion(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_slicereg, m) {
  m.doc() = "Slice regular functions on quaternionic slice domains";

  py::register_exception<Error>(m, "SliceregError", PyExc_ValueError);

  py::class_<Quaternion>(m, "Quaternion")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("w"), py::arg("x") = 0.0, py::arg("y") = 0.0,
           py::arg("z") = 0.0)
      .def_readwrite("w", &Quaternion::w)
      .def_readwrite("x", &Quaternion::x)
      .def_readwrite("y", &Quaternion::y)
      .def_readwrite("z", &Quaternion::z)
      .def("norm", &Quaternion::norm)
      .def("conj", &Quaternion::conj)
      .def("inverse", [](const Quaternion& q) { return inverse(q); })
      .def("to_list", [](const Quaternion& q) { return std::vector<double>{q.w, q.x, q.y, q.z}; })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def(py::self * double())
      .def(double() * py::self)
      .def(-py::self)
      .def("__repr__", &repr);

  py::class_<UnitImaginary>(m, "UnitImaginary")
      .def(py::init<double, double, double>(), py::arg("vx"), py::arg("vy"), py::arg("vz"))
      .def_property_readonly("vec", [](const UnitImaginary& u) { return u.vec(); })
      .def("q", &UnitImaginary::q)
      .def("distance", &UnitImaginary::distance)
      .def("__neg__", [](const UnitImaginary& u) { return -u; })
      .def_static("i", &UnitImaginary::i)
      .def_static("j", &UnitImaginary::j)
      .def_static("k", &UnitImaginary::k)
      .def("__repr__", [](const UnitImaginary& u) {
        std::ostringstream os;
        os.precision(17);
        os << "UnitImaginary(" << u.vx() << ", " << u.vy() << ", " << u.vz() << ")";
        return os.str();
      });

  m.def("slice_point", &slice_point, py::arg("x"), py::arg("y"), py::arg("J"), "x + yJ");

  m.def(
      "rep_coeffs",
      [](const Quaternion& fJ, const Quaternion& fK, const UnitImaginary& J, const UnitImaginary& K) {
        const Stem s = rep_coeffs(fJ, fK, J, K);
        return py::make_tuple(s.b, s.c);
      },
      py::arg("fJ"), py::arg("fK"), py::arg("J"), py::arg("K"), "Stem coefficients (b, c) from values on two slices");
  m.def(
      "rep_eval", [](const Quaternion& b, const Quaternion& c, const UnitImaginary& I) { return rep_eval(b, c, I); },
      py::arg("b"), py::arg("c"), py::arg("I"), "b + I c");

  py::class_<PowerSeries>(m, "Polynomial")
      .def(py::init(&polynomial), py::arg("coeffs"), py::arg("center") = 0.0,
           "Sum of (q - center)^n a_n with coefficients on the right")
      .def("__call__", &PowerSeries::eval)
      .def_readonly("coeffs", &PowerSeries::coeffs)
      .def_readonly("center", &PowerSeries::center);
  m.def("named_polynomial", &named_series, py::arg("name"));

  py::class_<Verdict>(m, "Verdict")
      .def_property_readonly("kind", [](const Verdict& v) { return std::string(to_string(v.kind)); })
      .def_property_readonly("label", &Verdict::label)
      .def_readonly("witness_units", &Verdict::witness_units)
      .def_readonly("witness_points", &Verdict::witness_points)
      .def_readonly("components", &Verdict::components)
      .def_readonly("detail", &Verdict::detail)
      .def("__bool__", &Verdict::yes)
      .def("__repr__", &Verdict::label);

  py::class_<Point2>(m, "Point2")
      .def_readonly("x", &Point2::x)
      .def_readonly("y", &Point2::y)
      .def("__repr__", [](const Point2& p) { return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; });

  py::class_<DomainSpec, std::shared_ptr<DomainSpec>>(m, "Domain")
      .def_readonly("name", &DomainSpec::name)
      .def_readonly("h", &DomainSpec::h)
      .def_property_readonly("bbox",
                             [](const DomainSpec& d) {
                               return std::vector<double>{d.bbox.xmin, d.bbox.xmax, d.bbox.ymin, d.bbox.ymax};
                             })
      .def("contains", py::overload_cast<const Quaternion&>(&DomainSpec::contains, py::const_), py::arg("q"))
      .def("contains_slice", py::overload_cast<double, double, const UnitImaginary&>(&DomainSpec::contains, py::const_),
           py::arg("x"), py::arg("y"), py::arg("J"));

  auto as_mut = [](DomainPtr p) { return std::const_pointer_cast<DomainSpec>(p); };
  m.def(
      "parse_domain", [as_mut](const std::string& text) { return as_mut(parse_domain(text, "<python>").domain); },
      py::arg("text"), "Domain from a JSON description");
  m.def(
      "load_domain", [as_mut](const std::string& path) { return as_mut(load_domain(path).domain); }, py::arg("path"));
  m.def(
      "ball", [](const Quaternion& c, double r) { return std::make_shared<DomainSpec>(make_ball(c, r)); },
      py::arg("center") = Quaternion(), py::arg("radius") = 1.0);
  m.def(
      "counterexample_domain",
      [](const UnitImaginary& I0, double h) {
        CounterexampleConfig cfg;
        cfg.I0 = I0;
        cfg.h = h;
        return std::make_shared<DomainSpec>(omega_spec(cfg));
      },
      py::arg("I0") = UnitImaginary::k(), py::arg("h") = 0.01);

  auto verdict = [](Verdict (*fn)(const DomainSpec&, const SphereSample&)) {
    return [fn](const DomainSpec& d, int samples) {
      py::gil_scoped_release release;
      return fn(d, SphereSample::fibonacci(samples));
    };
  };
  m.def("is_slice_domain", verdict(&is_slice_domain), py::arg("domain"), py::arg("samples") = 64);
  m.def("is_symmetric", verdict(&is_symmetric), py::arg("domain"), py::arg("samples") = 64);
  m.def("is_simple", verdict(&is_simple), py::arg("domain"), py::arg("samples") = 64);
  m.def(
      "is_slice_convex",
      [](const DomainSpec& d, int samples, std::uint64_t seed) {
        py::gil_scoped_release release;
        return is_slice_convex(d, SphereSample::fibonacci(samples), seed);
      },
      py::arg("domain"), py::arg("samples") = 64, py::arg("seed") = 0);

  py::class_<StemPair>(m, "StemPair")
      .def("__call__", py::overload_cast<const Quaternion&>(&StemPair::eval, py::const_), py::arg("q"))
      .def("eval", py::overload_cast<double, double, const UnitImaginary&>(&StemPair::eval, py::const_), py::arg("x"),
           py::arg("y"), py::arg("I"))
      .def(
          "coeffs",
          [](const StemPair& s, double x, double y) {
            const Stem st = s.coeffs(x, y);
            return py::make_tuple(st.b, st.c);
          },
          py::arg("x"), py::arg("y"));

  m.def(
      "regular_ext",
      [](const PowerSeries& f, const UnitImaginary& J, std::shared_ptr<DomainSpec> domain) {
        return regular_ext(HoloSliceFunction::power_series(f, J), domain);
      },
      py::arg("f"), py::arg("J"), py::arg("domain") = nullptr,
      "Regular extension of the restriction of f to the slice of J");
  m.def(
      "extension_formula",
      [](const PowerSeries& r, const UnitImaginary& J, const PowerSeries& s, const UnitImaginary& K, double x, double y,
         const UnitImaginary& I) {
        return extension_formula(HoloSliceFunction::power_series(r, J), J, HoloSliceFunction::power_series(s, K), K,
                                 SliceCoord(x, y, I));
      },
      py::arg("r"), py::arg("J"), py::arg("s"), py::arg("K"), py::arg("x"), py::arg("y"), py::arg("I"));

  py::class_<SliceFamily, std::shared_ptr<SliceFamily>>(m, "Family")
      .def("__call__", py::overload_cast<const Quaternion&>(&SliceFamily::eval, py::const_), py::arg("q"))
      .def("eval", py::overload_cast<double, double, const UnitImaginary&>(&SliceFamily::eval, py::const_),
           py::arg("x"), py::arg("y"), py::arg("J"));
  auto fam_mut = [](FamilyPtr p) { return std::const_pointer_cast<SliceFamily>(p); };
  m.def("polynomial_family", [fam_mut](const PowerSeries& f) { return fam_mut(polynomial_family(f)); }, py::arg("f"));
  m.def(
      "counterexample_G",
      [fam_mut](const UnitImaginary& I0) {
        CounterexampleConfig cfg;
        cfg.I0 = I0;
        return fam_mut(g_family(cfg));
      },
      py::arg("I0") = UnitImaginary::k(), "The slice regular G of the counterexample");

  m.def(
      "local_extend",
      [](std::shared_ptr<SliceFamily> f, std::shared_ptr<DomainSpec> domain, double x, double y,
         const UnitImaginary& J, std::uint64_t seed) {
        LocalExtensionOptions lo;
        lo.seed = seed;
        std::optional<LocalExtension> le;
        {
          py::gil_scoped_release release;
          le.emplace(local_extend(f, domain, SliceCoord(x, y, J), lo));
        }
        py::dict out;
        out["J0"] = le->J0;
        out["K0"] = le->K0;
        out["gamma"] = le->gamma;
        out["epsilon_M"] = le->M.epsilon();
        out["epsilon_Lambda"] = le->Lambda.epsilon();
        out["real_error"] = le->real_error;
        out["tube_error"] = le->tube_error;
        out["tube_points"] = le->tube_points;
        out["lambda_is_slice_domain"] = le->lambda_is_slice_domain;
        out["g"] = le->g;
        return out;
      },
      py::arg("f"), py::arg("domain"), py::arg("x"), py::arg("y"), py::arg("J"), py::arg("seed") = 0);

  m.def(
      "extend_to_completion",
      [](std::shared_ptr<SliceFamily> f, std::shared_ptr<DomainSpec> domain, int samples, double step, bool force,
         double tol, std::vector<UnitImaginary> pinned) {
        CompletionOptions co;
        co.step = step;
        co.force = force;
        co.tol = tol;
        std::optional<GlobalExtension> ge;
        {
          py::gil_scoped_release release;
          ge.emplace(extend_to_completion(f, domain, SphereSample::fibonacci(samples, pinned), co));
        }
        py::dict out = from_json(to_json(ge->report)).cast<py::dict>();
        out["g"] = ge->g;
        return out;
      },
      py::arg("f"), py::arg("domain"), py::arg("samples") = 64, py::arg("step") = 0.1, py::arg("force") = false,
      py::arg("tol") = 1e-8, py::arg("pinned") = std::vector<UnitImaginary>{});

  m.def(
      "demonstrate",
      [](const UnitImaginary& I0, double h, int samples, std::size_t max_cells) {
        CounterexampleConfig cfg;
        cfg.I0 = I0;
        cfg.h = h;
        DemonstrateOptions opts;
        opts.samples = samples;
        opts.max_cells = max_cells;
        std::optional<CounterexampleReport> rep;
        {
          py::gil_scoped_release release;
          rep.emplace(demonstrate(cfg, opts));
        }
        py::dict out;
        out["slice_domain"] = rep->slice_domain.label();
        out["t_cap_u_components"] = rep->tu_components;
        out["omega_pair_components"] = rep->omega_pair_components;
        out["omega_pair_disk_separated"] = rep->omega_pair_geometry;
        out["disk_fraction_2pi"] = rep->jump.disk_fraction;
        out["jump_other_max"] = rep->jump.other_max;
        out["jump_sign"] = rep->jump.sign;
        out["orderings_jump_on_I0"] = rep->orderings.jump_on_I0;
        out["orderings_law_error"] = rep->orderings.law_error;
        out["orderings_outside_max"] = rep->orderings.outside_max;
        out["simple"] = rep->simple;
        out["simple_witness_antipodal"] = rep->simple_witness_antipodal;
        out["passed"] = rep->passed;
        return out;
      },
      py::arg("I0") = UnitImaginary::k(), py::arg("h") = 0.01, py::arg("samples") = 64,
      py::arg("max_cells") = 40000, "Run the counterexample checks and return a summary");
}
