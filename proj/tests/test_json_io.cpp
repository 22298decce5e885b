#include "curvesplit/errors.hpp"
#include "curvesplit/json_io.hpp"
#include "doctest.h"

using namespace curvesplit;

TEST_CASE("diagram json round trip") {
  for (const char* code : {"O1+U1+", "O1+U2-O3+U1+O2-U3+", "O1+U1+ O2+U2+", "# #"}) {
    const CurveDiagram d = from_gauss_code(code, 0.75);
    const Json j = to_json(d);
    CHECK(diagram_from_json(j) == d);
    CHECK(diagram_from_json(parse_json(j.dump())) == d);
  }
  CHECK(diagram_from_json(Json("O1+U1+")) == from_gauss_code("O1+U1+"));
  Json broken = to_json(from_gauss_code("O1+U1+"));
  broken["crossings"][0]["slots"][0]["arc"] = 42;
  CHECK_THROWS_AS(diagram_from_json(broken), ValidationError);
  CHECK_THROWS_AS(diagram_from_json(Json::object()), ValidationError);
  CHECK_THROWS_AS(parse_json("{"), ValidationError);
}

TEST_CASE("script json round trip") {
  const auto g = generate_contraction(3, 100.0, 40);
  const auto script = detect_events(g.frames, g.bound);
  const Json j = to_json(script);
  CHECK(j["schema_version"] == kSchemaVersion);
  const HomotopyScript back = script_from_json(parse_json(j.dump()));
  CHECK(back == script);
  CHECK(to_json(back).dump() == j.dump());

  // Events without a recorded disc are resolved on load.
  Json bare = j;
  for (auto& e : bare["events"]) e.erase("disc");
  const auto t = resolve_script(script_from_json(bare));
  CHECK(t.events == resolve_script(script).events);

  Json wrong = j;
  wrong["schema_version"] = 99;
  CHECK_THROWS_AS(script_from_json(wrong), ValidationError);
  wrong = j;
  wrong["events"][0]["kind"] = "R4";
  CHECK_THROWS_AS(script_from_json(wrong), ValidationError);
}

TEST_CASE("certificate json round trip") {
  const auto g = generate_contraction(4, 100.0, 50);
  const auto script = detect_events(g.frames, g.bound);
  const auto t = resolve_script(script);
  const Certificate c = find_certificate(script);
  const Json j = to_json(c, t);
  const Certificate back = certificate_from_json(parse_json(j.dump()));
  CHECK(back == c);
  CHECK(verify_certificate(script, back).accepted());
  for (const auto& p : j["path"]) {
    const auto level = p["level"].get<std::size_t>();
    CHECK(p["resolution"].get<std::string>().size() ==
          static_cast<std::size_t>(t.slices[level].crossing_count()));
  }
}

TEST_CASE("frames json round trip") {
  const auto g = generate_contraction(2, 50.0, 20);
  const FramesDocument doc = to_document(g);
  const Json j = to_json(doc);
  const FramesDocument back = frames_from_json(parse_json(j.dump()));
  CHECK(back.frames == g.frames);
  CHECK(back.bound == g.bound);
  CHECK(back.m == g.m);
  CHECK(back.events == g.events);
  Json bad = j;
  bad["frames"][0]["curves"][0][0] = Json::array({1.0});
  CHECK_THROWS_AS(frames_from_json(bad), ValidationError);
}
