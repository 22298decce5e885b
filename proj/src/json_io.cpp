#include "curvesplit/json_io.hpp"

#include <set>

#include "curvesplit/errors.hpp"

namespace curvesplit {

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw ValidationError("schema", msg); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) schema_error(std::string("expected an object holding \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field \"") + key + "\"");
  return *it;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    schema_error(std::string("field \"") + key + "\": " + e.what());
  }
}

template <class T>
std::optional<T> get_opt(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key);
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) schema_error(std::string("field \"") + key + "\" must be an array");
  return a;
}

void check_version(const Json& j) {
  if (!j.is_object()) schema_error("expected a JSON object");
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
    schema_error("unsupported schema_version " + j.at("schema_version").dump());
  }
}

Json end_json(const ArcEnd& e) {
  return Json{{"arc", e.arc}, {"end", e.end == ArcEndKind::Tail ? "tail" : "head"}};
}

ArcEnd end_from(const Json& j) {
  const auto end = get<std::string>(j, "end");
  if (end != "tail" && end != "head") schema_error("arc end must be \"tail\" or \"head\"");
  return {get<ArcId>(j, "arc"), end == "tail" ? ArcEndKind::Tail : ArcEndKind::Head};
}

Json slot_json(const Slot& s) { return Json{{"crossing", s.crossing}, {"index", s.index}}; }

Slot slot_from(const Json& j) {
  const int index = get<int>(j, "index");
  if (index < 0 || index > 3) schema_error("slot index must be 0..3");
  return {get<CrossingId>(j, "crossing"), index};
}

Json side_json(const DiscSide& s) {
  Json inner = Json::array();
  for (const auto& a : s.inner_arcs) {
    inner.push_back({{"id", a.id}, {"tail", slot_json(a.tail)}, {"head", slot_json(a.head)}});
  }
  Json slots = Json::array();
  for (const auto& sl : s.boundary_slots) slots.push_back(slot_json(sl));
  return Json{{"crossings", s.crossings},
              {"inner_arcs", inner},
              {"boundary_slots", slots},
              {"through", s.through}};
}

DiscSide side_from(const Json& j) {
  DiscSide s;
  s.crossings = get<std::vector<CrossingId>>(j, "crossings");
  for (const auto& a : array_field(j, "inner_arcs")) {
    s.inner_arcs.push_back({get<ArcId>(a, "id"), slot_from(field(a, "tail")), slot_from(field(a, "head"))});
  }
  for (const auto& sl : array_field(j, "boundary_slots")) s.boundary_slots.push_back(slot_from(sl));
  s.through = get<std::vector<std::pair<int, int>>>(j, "through");
  return s;
}

bool disc_empty(const LocalDisc& d) { return d == LocalDisc{}; }

Side side_from_string(const std::string& s) {
  if (s == "before") return Side::Before;
  if (s == "after") return Side::After;
  schema_error("side must be \"before\" or \"after\"");
}

VertexCase case_from_string(const std::string& s) {
  for (VertexCase c : {VertexCase::Case1, VertexCase::Case2, VertexCase::Case3, VertexCase::Even,
                       VertexCase::Start}) {
    if (to_string(c) == s) return c;
  }
  schema_error("unknown vertex case \"" + s + "\"");
}

Json evidence_json(const CircleEvidence& e) {
  return Json{{"step", e.event + 1},
              {"side", e.side == Side::Before ? "before" : "after"},
              {"choice", e.choice},
              {"loop", e.loop},
              {"arcs", e.arcs}};
}

CircleEvidence evidence_from(const Json& j) {
  CircleEvidence e;
  e.event = get<int>(j, "step") - 1;
  e.side = side_from_string(get<std::string>(j, "side"));
  e.choice = get<std::uint32_t>(j, "choice");
  e.loop = get<ArcId>(j, "loop");
  e.arcs = get<std::vector<ArcId>>(j, "arcs");
  return e;
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
}

Json to_json(const CurveDiagram& d) {
  Json crossings = Json::array();
  for (const auto& [id, c] : d.crossings()) {
    Json slots = Json::array();
    for (const auto& e : c.slots) slots.push_back(end_json(e));
    crossings.push_back({{"id", id}, {"slots", slots}});
  }
  Json arcs = Json::array();
  for (const auto& [id, a] : d.arcs()) arcs.push_back({{"id", id}, {"length", a.length}});
  Json out{{"crossings", crossings}, {"arcs", arcs}, {"components", d.components()}};
  if (d.genus()) out["genus"] = *d.genus();
  return out;
}

CurveDiagram diagram_from_json(const Json& j) {
  if (j.is_string()) return from_gauss_code(j.get<std::string>());
  CurveDiagram d;
  for (const auto& a : array_field(j, "arcs")) {
    const double len = get<double>(a, "length");
    d.add_arc(get<ArcId>(a, "id"), len);
  }
  for (const auto& c : array_field(j, "crossings")) {
    const Json& slots = array_field(c, "slots");
    if (slots.size() != 4) schema_error("a crossing needs exactly 4 slots");
    std::array<ArcEnd, 4> s;
    for (std::size_t k = 0; k < 4; ++k) s[k] = end_from(slots[k]);
    d.add_crossing(get<CrossingId>(c, "id"), s);
  }
  d.set_components(get<std::vector<std::vector<ArcId>>>(j, "components"));
  d.set_genus(get_opt<int>(j, "genus"));
  const auto report = validate(d);
  if (!report.empty()) throw ValidationError(report.front().code, report.front().message);
  return d;
}

Json to_json(const MoveEvent& e) {
  Json darts = Json::array();
  for (const auto& d : e.site.darts) darts.push_back({{"arc", d.arc}, {"reversed", d.reversed}});
  Json out{{"kind", to_string(e.kind)},
           {"site",
            {{"darts", darts},
             {"new_crossings", e.site.new_crossings},
             {"new_arcs", e.site.new_arcs},
             {"new_length", e.site.new_length}}}};
  if (!disc_empty(e.disc)) {
    Json boundary = Json::array();
    for (const auto& b : e.disc.boundary) boundary.push_back(end_json(b));
    std::set<ArcId> inner;
    for (const auto* side : {&e.disc.before, &e.disc.after}) {
      for (const auto& a : side->inner_arcs) inner.insert(a.id);
    }
    out["disc"] = Json{{"boundary", boundary},
                       {"crossings_before", e.disc.before.crossings},
                       {"crossings_after", e.disc.after.crossings},
                       {"arcs", inner},
                       {"before", side_json(e.disc.before)},
                       {"after", side_json(e.disc.after)}};
  }
  if (!e.carry.empty()) {
    Json carry = Json::array();
    for (const auto& [from, to] : e.carry) carry.push_back({from, to});
    out["carry"] = carry;
  }
  if (!e.arc_lengths.empty()) {
    Json lengths = Json::array();
    for (const auto& [id, len] : e.arc_lengths) lengths.push_back({{"arc", id}, {"length", len}});
    out["arc_lengths"] = lengths;
  }
  if (e.provenance) {
    out["provenance"] = {{"frame", e.provenance->frame}, {"x", e.provenance->x}, {"y", e.provenance->y}};
  }
  return out;
}

MoveEvent event_from_json(const Json& j) {
  MoveEvent e;
  e.kind = move_kind_from_string(get<std::string>(j, "kind"));
  const Json& site = field(j, "site");
  for (const auto& d : array_field(site, "darts")) {
    e.site.darts.push_back({get<ArcId>(d, "arc"), get<bool>(d, "reversed")});
  }
  e.site.new_crossings = get_opt<std::vector<CrossingId>>(site, "new_crossings").value_or(std::vector<CrossingId>{});
  e.site.new_arcs = get_opt<std::vector<ArcId>>(site, "new_arcs").value_or(std::vector<ArcId>{});
  e.site.new_length = get_opt<double>(site, "new_length").value_or(MoveSite{}.new_length);
  if (j.contains("disc")) {
    const Json& disc = j.at("disc");
    if (disc.contains("before") && disc.contains("after")) {
      for (const auto& b : array_field(disc, "boundary")) e.disc.boundary.push_back(end_from(b));
      e.disc.before = side_from(disc.at("before"));
      e.disc.after = side_from(disc.at("after"));
    }
  }
  if (j.contains("carry")) {
    for (const auto& [from, to] : get<std::vector<std::pair<ArcId, ArcId>>>(j, "carry")) {
      e.carry.emplace(from, to);
    }
  }
  if (j.contains("arc_lengths")) {
    for (const auto& a : array_field(j, "arc_lengths")) {
      e.arc_lengths.emplace(get<ArcId>(a, "arc"), get<double>(a, "length"));
    }
  }
  if (j.contains("provenance")) {
    const Json& p = j.at("provenance");
    e.provenance = EventProvenance{get<int>(p, "frame"), get<double>(p, "x"), get<double>(p, "y")};
  }
  return e;
}

Json to_json(const HomotopyScript& s) {
  Json events = Json::array();
  for (const auto& e : s.events) events.push_back(to_json(e));
  Json out{{"schema_version", kSchemaVersion}, {"initial", to_json(s.initial)}, {"events", events}};
  if (s.bound) out["bound"] = *s.bound;
  out["terminal_disc"] = s.terminal_disc;
  if (s.m) out["m"] = *s.m;
  return out;
}

HomotopyScript script_from_json(const Json& j) {
  check_version(j);
  HomotopyScript s;
  s.initial = diagram_from_json(field(j, "initial"));
  for (const auto& e : array_field(j, "events")) s.events.push_back(event_from_json(e));
  s.bound = get_opt<double>(j, "bound");
  s.terminal_disc = get_opt<bool>(j, "terminal_disc").value_or(false);
  s.m = get_opt<int>(j, "m");
  return s;
}

Json to_json(const Certificate& c, const Timeline& t) {
  Json path = Json::array();
  for (const auto& step : c.path) {
    const auto level = static_cast<std::size_t>(step.vertex.level);
    const int width = level < t.slices.size() ? t.slices[level].crossing_count() : 0;
    path.push_back({{"level", step.vertex.level},
                    {"resolution", mask_to_bits(step.vertex.mask, width)},
                    {"curve", step.curve}});
  }
  Json edges = Json::array();
  for (const auto& e : c.edges) {
    edges.push_back({{"step", e.event + 1}, {"pair", e.pair}, {"bijection", e.bijection}});
  }
  Json terminal{{"kind", to_string(c.terminal.kind)},
                {"case", to_string(c.terminal.vertex_case)},
                {"degenerate", c.terminal.degenerate},
                {"terminal_disc", c.terminal.terminal_disc}};
  if (c.terminal.evidence) terminal["evidence"] = evidence_json(*c.terminal.evidence);
  Json out{{"schema_version", c.schema_version}, {"m", c.m},         {"path", path},
           {"edges", edges},                     {"terminal", terminal}, {"length_audit", c.length_audit}};
  if (c.bound) out["bound"] = *c.bound;
  return out;
}

Certificate certificate_from_json(const Json& j) {
  if (!j.is_object()) schema_error("expected a JSON object");
  Certificate c;
  c.schema_version = get<int>(j, "schema_version");
  c.m = get<int>(j, "m");
  for (const auto& p : array_field(j, "path")) {
    PathStep step;
    step.vertex.level = get<int>(p, "level");
    step.vertex.mask = bits_to_mask(get<std::string>(p, "resolution"));
    step.curve = get<ArcId>(p, "curve");
    c.path.push_back(step);
  }
  for (const auto& e : array_field(j, "edges")) {
    c.edges.push_back({get<int>(e, "step") - 1, get<int>(e, "pair"),
                       get<std::vector<std::pair<ArcId, ArcId>>>(e, "bijection")});
  }
  const Json& t = field(j, "terminal");
  const auto kind = get<std::string>(t, "kind");
  if (kind == "DISC_CONTRACTION") {
    c.terminal.kind = TerminalKind::DiscContraction;
  } else if (kind == "LOCAL_CIRCLE") {
    c.terminal.kind = TerminalKind::LocalCircle;
  } else {
    schema_error("unknown terminal kind \"" + kind + "\"");
  }
  c.terminal.vertex_case = case_from_string(get<std::string>(t, "case"));
  c.terminal.degenerate = get<bool>(t, "degenerate");
  c.terminal.terminal_disc = get<bool>(t, "terminal_disc");
  if (t.contains("evidence")) c.terminal.evidence = evidence_from(t.at("evidence"));
  c.length_audit = get<double>(j, "length_audit");
  c.bound = get_opt<double>(j, "bound");
  return c;
}

Json to_json(const FramesDocument& f) {
  Json frames = Json::array();
  for (const auto& fr : f.frames) {
    Json curves = Json::array();
    for (const auto& c : fr.curves) {
      Json pts = Json::array();
      for (Vec2 v : c) pts.push_back({v.x, v.y});
      curves.push_back(pts);
    }
    frames.push_back({{"t", fr.t}, {"curves", curves}});
  }
  Json out{{"schema_version", kSchemaVersion}, {"frames", frames}};
  if (f.bound) out["bound"] = *f.bound;
  if (f.m) out["m"] = *f.m;
  if (!f.events.empty()) {
    Json events = Json::array();
    for (const auto& e : f.events) {
      events.push_back({{"kind", to_string(e.kind)}, {"frame", e.frame}, {"point", {e.point.x, e.point.y}}});
    }
    out["events"] = events;
  }
  return out;
}

FramesDocument frames_from_json(const Json& j) {
  check_version(j);
  FramesDocument f;
  for (const auto& fr : array_field(j, "frames")) {
    PolylineFrame frame;
    frame.t = get<double>(fr, "t");
    for (const auto& c : array_field(fr, "curves")) {
      Polyline p;
      try {
        for (const auto& v : c) {
          if (!v.is_array() || v.size() != 2) schema_error("a vertex must be [x, y]");
          p.push_back({v[0].get<double>(), v[1].get<double>()});
        }
      } catch (const nlohmann::json::exception& e) {
        schema_error(std::string("curve vertex: ") + e.what());
      }
      frame.curves.push_back(std::move(p));
    }
    f.frames.push_back(std::move(frame));
  }
  f.bound = get_opt<double>(j, "bound");
  f.m = get_opt<int>(j, "m");
  if (j.contains("events")) {
    for (const auto& e : array_field(j, "events")) {
      PlantedEvent p;
      p.kind = move_kind_from_string(get<std::string>(e, "kind"));
      p.frame = get<int>(e, "frame");
      const auto pt = get<std::vector<double>>(e, "point");
      if (pt.size() != 2) schema_error("an event point must be [x, y]");
      p.point = {pt[0], pt[1]};
      f.events.push_back(p);
    }
  }
  return f;
}

FramesDocument to_document(const GeneratedHomotopy& g) {
  return FramesDocument{g.frames, g.bound, g.m, g.events};
}

}  // namespace curvesplit
