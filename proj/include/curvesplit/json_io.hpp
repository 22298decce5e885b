#pragma once

#include <optional>
#include <vector>

#include "curvesplit/diagram.hpp"
#include "curvesplit/geometry.hpp"
#include "curvesplit/moves.hpp"
#include "curvesplit/resgraph.hpp"
#include "curvesplit/search.hpp"
#include "json.hpp"

namespace curvesplit {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Every reader throws ValidationError (code "schema") on malformed input.

Json to_json(const CurveDiagram& d);
/// Also accepts a Gauss code string such as "O1+U1+".
CurveDiagram diagram_from_json(const Json& j);

Json to_json(const MoveEvent& e);
MoveEvent event_from_json(const Json& j);

Json to_json(const HomotopyScript& s);
HomotopyScript script_from_json(const Json& j);

/// Resolution bit strings are written at the width of each path vertex's slice.
Json to_json(const Certificate& c, const Timeline& t);
Certificate certificate_from_json(const Json& j);

struct FramesDocument {
  std::vector<PolylineFrame> frames;
  std::optional<double> bound;
  std::optional<int> m;
  std::vector<PlantedEvent> events;  // ground truth, when generated
};

Json to_json(const FramesDocument& f);
FramesDocument frames_from_json(const Json& j);
FramesDocument to_document(const GeneratedHomotopy& g);

/// Parses text, mapping syntax errors to ValidationError.
Json parse_json(const std::string& text);

}  // namespace curvesplit
