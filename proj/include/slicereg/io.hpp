#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "slicereg/counterexample.hpp"
#include "slicereg/domain.hpp"
#include "slicereg/extension.hpp"
#include "slicereg/holo_slice.hpp"

namespace slicereg {

using Json = nlohmann::ordered_json;

/// A domain read from a JSON description, plus the construction data some commands need.
struct LoadedDomain {
  std::string type;
  DomainPtr domain;
  std::optional<CounterexampleConfig> counterexample;
  std::shared_ptr<const TubeDomain> tube;
};

/// Parses a domain description. Errors are Error(Input) with a "source:line:" prefix.
LoadedDomain parse_domain(const std::string& text, const std::string& source = "<input>");
LoadedDomain load_domain(const std::string& path);

/// {"type": "polynomial", "center": x0, "coeffs": [[w, x, y, z], ...]} or a bare
/// name of a built-in test function ("square", "cube", "mixed").
PowerSeries parse_series(const std::string& text, const std::string& source = "<input>");
PowerSeries named_series(const std::string& name);
std::string read_text(const std::string& path);

Json to_json(const Quaternion& q);
Json to_json(const UnitImaginary& u);
Json to_json(const Point2& p);
Json to_json(const Verdict& v);
Json to_json(const SphereConsistency& s);
Json to_json(const CompletionReport& r);
Json to_json(const DomainSpec& spec);

/// Deterministic serialization: doubles with 17 significant digits, two-space indent.
std::string dump(const Json& j);
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);

/// Binary PGM, top row at the largest y; occupied cells white.
void write_pgm(const std::string& path, const PlanarRegionGrid& grid);
/// Binary PGM with one grey level per component, background black.
void write_labels_pgm(const std::string& path, const PlanarRegionGrid& grid, const ComponentLabels& labels);
/// CSV rows x,y,label for occupied cells.
void write_labels_csv(const std::string& path, const PlanarRegionGrid& grid, const ComponentLabels& labels);
/// CSV rows x,y,b_w,b_x,b_y,b_z,c_w,c_x,c_y,c_z on the lattice of step h over the box, y >= 0,
/// for points where the stem pair is defined.
void write_stem_csv(const std::string& path, const StemPair& pair, const Box2& box, double h);

}  // namespace slicereg
