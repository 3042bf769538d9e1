#include "slicereg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "slicereg/error.hpp"

namespace slicereg {

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Reads a JSON document and locates keys in the source for error messages.
class Source {
 public:
  Source(std::string text, std::string name) : text_(std::move(text)), name_(std::move(name)) {}

  Json parse() const {
    try {
      return Json::parse(text_);
    } catch (const Json::parse_error& e) {
      const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
      std::string msg = e.what();
      if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
      throw Error(ErrorKind::Input, name_ + ":" + std::to_string(line_of_offset(text_, at)) + ": malformed JSON (" +
                                        msg + ")");
    }
  }

  /// First line mentioning "key" (optionally followed by the given value), else line 1.
  [[noreturn]] void fail(const std::string& key, const std::string& what, const std::string& value = "") const {
    int line = 1;
    const std::string needle = "\"" + key + "\"";
    for (std::size_t pos = text_.find(needle); pos != std::string::npos; pos = text_.find(needle, pos + 1)) {
      const std::size_t eol = text_.find('\n', pos);
      const std::string rest = text_.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
      if (value.empty() || rest.find(value) != std::string::npos) {
        line = line_of_offset(text_, pos);
        break;
      }
    }
    throw Error(ErrorKind::Input, name_ + ":" + std::to_string(line) + ": " + what);
  }

 private:
  std::string text_;
  std::string name_;
};

double number(const Json& obj, const char* key, const Source& src, std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    src.fail(key, std::string("missing field '") + key + "'");
  }
  const Json& v = obj.at(key);
  if (!v.is_number()) src.fail(key, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const Json& v, const char* key, std::size_t n, const Source& src) {
  if (!v.is_array() || (n && v.size() != n)) {
    src.fail(key, std::string("field '") + key + "' must be an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) src.fail(key, std::string("field '") + key + "' must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Quaternion quaternion_field(const Json& obj, const char* key, const Source& src, Quaternion fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = numbers(obj.at(key), key, 4, src);
  return {v[0], v[1], v[2], v[3]};
}

UnitImaginary unit_field(const Json& obj, const char* key, const Source& src, UnitImaginary fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = numbers(obj.at(key), key, 3, src);
  try {
    return UnitImaginary(v[0], v[1], v[2]);
  } catch (const Error&) {
    src.fail(key, std::string("field '") + key + "' must be a nonzero 3-vector");
  }
}

Polyline polyline_value(const Json& v, const char* key, const Source& src) {
  if (!v.is_array() || v.size() < 2) src.fail(key, std::string("field '") + key + "' must list at least two points");
  Polyline line;
  for (const auto& p : v) {
    const auto xy = numbers(p, key, 2, src);
    line.push_back({xy[0], xy[1]});
  }
  return line;
}

Box2 box_field(const Json& obj, const Source& src, Box2 fallback) {
  if (!obj.contains("bbox")) return fallback;
  const auto v = numbers(obj.at("bbox"), "bbox", 4, src);
  const Box2 b{v[0], v[1], v[2], v[3]};
  if (!(b.xmin < b.xmax && b.ymin <= 0.0 && b.ymax > 0.0)) {
    src.fail("bbox", "bbox must be [xmin, xmax, ymin, ymax] with xmin < xmax, ymin <= 0 < ymax");
  }
  return b;
}

LoadedDomain build(const Json& obj, const Source& src) {
  if (!obj.is_object()) src.fail("type", "domain description must be a JSON object");
  if (!obj.contains("type") || !obj.at("type").is_string()) src.fail("type", "missing string field 'type'");
  LoadedDomain out;
  out.type = obj.at("type").get<std::string>();
  DomainSpec spec;
  try {
    if (out.type == "ball") {
      const Quaternion center = quaternion_field(obj, "center", src, Quaternion());
      const double radius = number(obj, "radius", src, 1.0);
      if (!(radius > 0.0)) src.fail("radius", "radius must be positive");
      std::optional<UnitImaginary> axis;
      double angle = 0.0;
      if (obj.contains("wedge")) {
        const Json& w = obj.at("wedge");
        if (!w.is_object()) src.fail("wedge", "field 'wedge' must be an object with 'axis' and 'angle'");
        axis = unit_field(w, "axis", src, UnitImaginary(0.0, 0.0, 1.0));
        angle = number(w, "angle", src);
      }
      spec = make_ball(center, radius, axis, angle);
    } else if (out.type == "halfspace-slicewise") {
      spec = make_halfspace_slicewise(number(obj, "a", src), number(obj, "b", src), number(obj, "c", src),
                                      box_field(obj, src, Box2{-2.0, 2.0, 0.0, 2.0}));
    } else if (out.type == "counterexample") {
      CounterexampleConfig cfg;
      cfg.I0 = unit_field(obj, "I0", src, UnitImaginary(0.0, 0.0, 1.0));
      cfg.bbox = box_field(obj, src, cfg.bbox);
      cfg.h = number(obj, "h", src, cfg.h);
      cfg.log_h = number(obj, "log_h", src, cfg.log_h);
      if (obj.contains("arc_points")) cfg.arc_points = static_cast<int>(number(obj, "arc_points", src));
      out.counterexample = cfg;
      spec = omega_spec(cfg);
    } else if (out.type == "boolean-op") {
      if (!obj.contains("op") || !obj.at("op").is_string()) src.fail("op", "missing string field 'op'");
      const std::string op = obj.at("op").get<std::string>();
      BooleanOp kind;
      if (op == "union") {
        kind = BooleanOp::Union;
      } else if (op == "intersection") {
        kind = BooleanOp::Intersection;
      } else if (op == "difference") {
        kind = BooleanOp::Difference;
      } else {
        src.fail("op", "unknown boolean op '" + op + "'", op);
      }
      if (!obj.contains("left") || !obj.contains("right")) src.fail("op", "boolean-op needs 'left' and 'right'");
      spec = make_boolean(kind, build(obj.at("left"), src).domain, build(obj.at("right"), src).domain);
    } else if (out.type == "tube") {
      const UnitImaginary carrier = unit_field(obj, "carrier", src, UnitImaginary(1.0, 0.0, 0.0));
      if (!obj.contains("path")) src.fail("path", "missing field 'path'");
      const Polyline path = polyline_value(obj.at("path"), "path", src);
      const double eps = number(obj, "epsilon", src);
      out.tube = std::make_shared<const TubeDomain>(carrier, path, eps, number(obj, "h", src, 0.0));
      spec = *out.tube->spec();
    } else {
      src.fail("type", "unknown domain type '" + out.type + "'", out.type);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Input) throw;
    src.fail("type", std::string("invalid '") + out.type + "' domain: " + e.what(), out.type);
  }
  if (out.type != "counterexample") {
    spec.bbox = box_field(obj, src, spec.bbox);
    spec.h = number(obj, "h", src, spec.h);
  }
  if (!(spec.h > 0.0)) src.fail("h", "grid step 'h' must be positive");
  if (obj.contains("cuts")) {
    const Json& cuts = obj.at("cuts");
    if (!cuts.is_array()) src.fail("cuts", "field 'cuts' must be an array of polylines");
    for (const auto& c : cuts) spec.axial_cuts.push_back(polyline_value(c, "cuts", src));
    const auto inner = spec.member;
    const auto lines = spec.axial_cuts;
    spec.member = [inner, lines](double x, double y, const UnitImaginary& J) {
      for (const auto& l : lines) {
        if (polyline_distance_capped({x, y}, l, 1e-12) < 1e-12) return false;
      }
      return inner(x, y, J);
    };
    spec.cut_distance = nullptr;
  }
  out.domain = std::make_shared<const DomainSpec>(std::move(spec));
  return out;
}

void dump_value(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out += "null";
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  } else if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += inner + Json(it.key()).dump() + ": ";
      dump_value(it.value(), out, indent + 1);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (j.empty() || flat) {
      out += "[";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ", ";
        dump_value(j[k], out, indent + 1);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (k) out += ",\n";
      out += inner;
      dump_value(j[k], out, indent + 1);
    }
    out += "\n" + pad + "]";
  } else {
    out += j.dump();
  }
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw Error(ErrorKind::Input, "cannot write '" + path + "'");
  return f;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Input, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

LoadedDomain parse_domain(const std::string& text, const std::string& source) {
  const Source src(text, source);
  return build(src.parse(), src);
}

LoadedDomain load_domain(const std::string& path) { return parse_domain(read_text(path), path); }

PowerSeries named_series(const std::string& name) {
  if (name == "square") return PowerSeries{0.0, std::numeric_limits<double>::infinity(), {0.0, 0.0, 1.0}};
  if (name == "cube") return PowerSeries{0.0, std::numeric_limits<double>::infinity(), {0.0, 0.0, 0.0, 1.0}};
  if (name == "mixed") {
    return PowerSeries{0.0,
                       std::numeric_limits<double>::infinity(),
                       {Quaternion(1.0, 0.5, 0.0, 0.0), Quaternion(0.0, 0.0, 1.0, 0.0), Quaternion(0.0, 0.0, 0.0, -0.5),
                        Quaternion(0.25, 0.25, 0.25, 0.25)}};
  }
  throw Error(ErrorKind::Input, "unknown test function '" + name + "' (expected square, cube or mixed)");
}

PowerSeries parse_series(const std::string& text, const std::string& source) {
  const Source src(text, source);
  const Json j = src.parse();
  if (j.is_string()) return named_series(j.get<std::string>());
  if (!j.is_object() || !j.contains("type") || j.at("type") != "polynomial") {
    src.fail("type", "function description must have \"type\": \"polynomial\"");
  }
  PowerSeries p;
  p.center = number(j, "center", src, 0.0);
  if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").empty()) {
    src.fail("coeffs", "field 'coeffs' must be a nonempty array of quaternions");
  }
  for (const auto& c : j.at("coeffs")) {
    const auto v = numbers(c, "coeffs", 4, src);
    p.coeffs.emplace_back(v[0], v[1], v[2], v[3]);
  }
  return p;
}

Json to_json(const Quaternion& q) { return Json::array({q.w, q.x, q.y, q.z}); }
Json to_json(const UnitImaginary& u) { return Json::array({u.vx(), u.vy(), u.vz()}); }
Json to_json(const Point2& p) { return Json::array({p.x, p.y}); }

Json to_json(const Verdict& v) {
  Json j;
  j["verdict"] = v.label();
  j["kind"] = to_string(v.kind);
  j["samples"] = v.samples;
  j["h"] = v.h;
  if (v.components) j["components"] = v.components;
  Json units = Json::array();
  for (const auto& u : v.witness_units) units.push_back(to_json(u));
  Json points = Json::array();
  for (const auto& p : v.witness_points) points.push_back(to_json(p));
  j["witness_units"] = units;
  j["witness_points"] = points;
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

Json to_json(const SphereConsistency& s) {
  Json j;
  j["sphere"] = Json::array({s.x, s.y});
  j["defect"] = s.defect;
  j["all_pairs_spread"] = s.all_pairs_spread;
  j["units_in_domain"] = s.units_in_domain;
  j["resolved_units"] = s.resolved_units;
  Json w = Json::array();
  for (const auto& u : s.witnesses) w.push_back(to_json(u));
  j["witnesses"] = w;
  return j;
}

Json to_json(const CompletionReport& r) {
  Json j;
  j["max_defect"] = r.max_defect;
  j["tol"] = r.tol;
  j["spheres_checked"] = r.spheres.size();
  j["spheres_skipped"] = r.skipped;
  j["spheres_over_tolerance"] = r.over_tolerance;
  j["forced"] = r.forced;
  if (r.simple) j["simple"] = r.simple->label();
  Json over = Json::array();
  for (const auto& s : r.spheres) {
    if (s.defect > r.tol) over.push_back(to_json(s));
  }
  j["inconsistent_spheres"] = over;
  return j;
}

Json to_json(const DomainSpec& spec) {
  Json j;
  j["name"] = spec.name;
  j["bbox"] = Json::array({spec.bbox.xmin, spec.bbox.xmax, spec.bbox.ymin, spec.bbox.ymax});
  j["h"] = spec.h;
  Json cuts = Json::array();
  for (const auto& c : spec.axial_cuts) {
    Json line = Json::array();
    for (const auto& p : c) line.push_back(to_json(p));
    cuts.push_back(line);
  }
  j["axial_cuts"] = cuts;
  j["slice_dependent_cuts"] = static_cast<bool>(spec.slice_cuts);
  return j;
}

std::string dump(const Json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) { open_out(path) << text; }
void write_json(const std::string& path, const Json& j) { write_text(path, dump(j)); }

void write_pgm(const std::string& path, const PlanarRegionGrid& grid) {
  auto f = open_out(path, true);
  const GridFrame& fr = grid.frame;
  f << "P5\n" << fr.nx << " " << fr.ny << "\n255\n";
  for (int j = fr.ny - 1; j >= 0; --j) {
    for (int i = 0; i < fr.nx; ++i) f.put(grid.occupied[fr.index(i, j)] ? static_cast<char>(255) : 0);
  }
}

void write_labels_pgm(const std::string& path, const PlanarRegionGrid& grid, const ComponentLabels& labels) {
  auto f = open_out(path, true);
  const GridFrame& fr = grid.frame;
  f << "P5\n" << fr.nx << " " << fr.ny << "\n255\n";
  const int n = std::max(1, labels.count);
  for (int j = fr.ny - 1; j >= 0; --j) {
    for (int i = 0; i < fr.nx; ++i) {
      const int l = labels.labels[fr.index(i, j)];
      f.put(static_cast<char>(l < 0 ? 0 : 64 + (191 * (l + 1)) / n));
    }
  }
}

void write_labels_csv(const std::string& path, const PlanarRegionGrid& grid, const ComponentLabels& labels) {
  auto f = open_out(path);
  f << "x,y,label\n";
  char buf[96];
  for (std::size_t c = 0; c < grid.frame.size(); ++c) {
    if (labels.labels[c] < 0) continue;
    const Point2 p = grid.frame.center(c);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", p.x, p.y, labels.labels[c]);
    f << buf;
  }
}

void write_stem_csv(const std::string& path, const StemPair& pair, const Box2& box, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::Parameter, "sampling step must be positive");
  auto f = open_out(path);
  f << "x,y,b_w,b_x,b_y,b_z,c_w,c_x,c_y,c_z\n";
  const long i0 = static_cast<long>(std::ceil(box.xmin / h - 1e-9));
  const long i1 = static_cast<long>(std::floor(box.xmax / h + 1e-9));
  const long j1 = static_cast<long>(std::floor(box.ymax / h + 1e-9));
  char buf[512];
  for (long j = 0; j <= j1; ++j) {
    for (long i = i0; i <= i1; ++i) {
      const double x = i * h, y = j * h;
      if (!pair.contains(x, y, UnitImaginary::i())) continue;
      Stem s;
      try {
        s = pair.coeffs(x, y);
      } catch (const Error&) {
        continue;
      }
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x, y, s.b.w,
                    s.b.x, s.b.y, s.b.z, s.c.w, s.c.x, s.c.y, s.c.z);
      f << buf;
    }
  }
}

}  // namespace slicereg
