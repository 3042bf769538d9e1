#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "slicereg/error.hpp"
#include "slicereg/io.hpp"

using namespace slicereg;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_domain(text, "spec.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Input);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("domain descriptions load") {
  const auto ball = parse_domain(R"({"type": "ball", "center": [0.5, 0, 0, 0], "radius": 2, "h": 0.02})");
  CHECK(ball.type == "ball");
  CHECK(ball.domain->contains(Quaternion(2.0, 0.0, 0.5, 0.0)));
  CHECK_FALSE(ball.domain->contains(Quaternion(2.6, 0.0, 0.0, 0.0)));
  CHECK(ball.domain->h == 0.02);

  const auto ce = parse_domain(R"({"type": "counterexample", "I0": [0, 0, 2]})");
  REQUIRE(ce.counterexample);
  CHECK(ce.counterexample->I0.vz() == doctest::Approx(1.0));
  CHECK_FALSE(ce.domain->contains(Quaternion(-1.0, 0.0, 0.0, 3.0)));

  const auto hs = parse_domain(R"({"type": "halfspace-slicewise", "a": 1, "b": 1, "c": 1, "bbox": [-3, 3, 0, 3]})");
  CHECK(hs.domain->contains(Quaternion(0.2, 0.3, 0.0, 0.0)));
  CHECK_FALSE(hs.domain->contains(Quaternion(0.8, 0.0, 0.4, 0.0)));
  CHECK(hs.domain->bbox.xmin == -3.0);

  const auto diff = parse_domain(R"({"type": "boolean-op", "op": "difference",
    "left": {"type": "ball", "radius": 2}, "right": {"type": "ball", "radius": 1}})");
  CHECK(diff.domain->contains(Quaternion(1.5)));
  CHECK_FALSE(diff.domain->contains(Quaternion(0.5)));

  const auto tube = parse_domain(R"({"type": "tube", "carrier": [0, 1, 0], "path": [[0, 1], [0, 0]], "epsilon": 0.2})");
  REQUIRE(tube.tube);
  CHECK(tube.domain->contains(Quaternion(0.0, 0.0, 0.5, 0.0)));

  const auto cut = parse_domain(R"({"type": "ball", "radius": 2, "cuts": [[[-1, 0.5], [1, 0.5]]]})");
  CHECK_FALSE(cut.domain->contains(0.0, 0.5, UnitImaginary::i()));
  CHECK(cut.domain->contains(0.0, 0.6, UnitImaginary::i()));
}

TEST_CASE("domain errors carry the source line") {
  CHECK(error_of("{\n  \"type\": \"ball\",\n  \"radius\": 1,\n}").find("spec.json:4:") != std::string::npos);
  const std::string unknown = error_of("{\n  \"h\": 0.01,\n  \"type\": \"torus\"\n}");
  CHECK(unknown.find("spec.json:3:") != std::string::npos);
  CHECK(unknown.find("torus") != std::string::npos);
  CHECK(error_of("{\"type\": \"ball\",\n \"radius\": \"big\"}").find("spec.json:2:") != std::string::npos);
  CHECK(error_of("{\"type\": \"boolean-op\",\n\"op\": \"xor\"}").find("spec.json:2:") != std::string::npos);
  CHECK(error_of("[1, 2]").find("spec.json:1:") != std::string::npos);
  CHECK_THROWS_AS(load_domain("/nonexistent/spec.json"), Error);
}

TEST_CASE("test functions") {
  CHECK(named_series("cube").coeffs.size() == 4);
  CHECK_THROWS_AS(named_series("sine"), Error);
  const PowerSeries p = parse_series(R"({"type": "polynomial", "coeffs": [[1, 0, 0, 0], [0, 1, 0, 0]]})");
  CHECK((p.eval(Quaternion(0.0, 0.0, 1.0, 0.0)) - Quaternion(1.0, 0.0, 0.0, -1.0)).norm() < 1e-15);
  CHECK(parse_series("\"square\"").coeffs.size() == 3);
}

TEST_CASE("JSON output is fixed-format and round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Json j;
  j["q"] = to_json(Quaternion(u(rng), u(rng), u(rng), u(rng)));
  j["third"] = 1.0 / 3.0;
  j["nested"] = Json::array({Json{{"a", 1}}, Json{{"b", "x"}}});
  const std::string text = dump(j);
  CHECK(text == dump(j));
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  const Json back = Json::parse(text);
  for (int k = 0; k < 4; ++k) {
    const double a = j["q"][k].get<double>(), b = back["q"][k].get<double>();
    CHECK(std::abs(a - b) <= 1e-15 * std::abs(a));
  }
}

TEST_CASE("grid exports") {
  const auto dir = std::filesystem::temp_directory_path() / "slicereg_io_test";
  std::filesystem::create_directories(dir);
  const DomainSpec ball = make_ball(Quaternion(), 1.0);
  const PlanarRegionGrid g = rasterize(ball, UnitImaginary::i(), SliceExtent::Full);
  const ComponentLabels l = connected_components(g);
  write_pgm((dir / "a.pgm").string(), g);
  write_labels_pgm((dir / "b.pgm").string(), g, l);
  write_labels_csv((dir / "c.csv").string(), g, l);
  const std::string pgm = read_text((dir / "a.pgm").string());
  const std::string header = "P5\n" + std::to_string(g.frame.nx) + " " + std::to_string(g.frame.ny) + "\n255\n";
  CHECK(pgm.substr(0, header.size()) == header);
  CHECK(pgm.size() == header.size() + g.frame.size());
  const std::string csv = read_text((dir / "c.csv").string());
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == g.occupied_count() + 1);
  std::filesystem::remove_all(dir);
}
