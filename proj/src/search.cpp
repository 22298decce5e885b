#include "curvesplit/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "curvesplit/errors.hpp"

namespace curvesplit {

namespace {

const CurveDiagram& slice_at(const Timeline& t, const Vertex& v) {
  return t.slices.at(static_cast<std::size_t>(v.level));
}

LoopCollection loops_at(const Timeline& t, const Vertex& v) {
  const CurveDiagram& d = slice_at(t, v);
  return smooth(d, Resolution::from_mask(d, v.mask));
}

Side side_at(int event, const Vertex& v) { return v.level == event ? Side::Before : Side::After; }

bool all_inner(const Loop& loop, const DiscSide& side) {
  return std::all_of(loop.arcs.begin(), loop.arcs.end(),
                     [&](ArcId a) { return side.has_inner_arc(a); });
}

// Order used for canonical tie-breaking: level, then resolution bits.
std::pair<int, std::string> order_key(const Timeline& t, const Vertex& v) {
  return {v.level, mask_to_bits(v.mask, slice_at(t, v).crossing_count())};
}

double audit_length(const Timeline& t, const std::vector<PathStep>& path,
                    const std::optional<CircleEvidence>& ev) {
  std::set<int> levels;
  for (const auto& s : path) levels.insert(s.vertex.level);
  if (ev) {
    levels.insert(ev->event);
    levels.insert(ev->event + 1);
  }
  double out = 0.0;
  for (int l : levels) {
    if (l >= 0 && l <= t.last_level()) {
      out = std::max(out, t.slices[static_cast<std::size_t>(l)].total_length());
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(VertexCase c) {
  switch (c) {
    case VertexCase::Case1: return "CASE1";
    case VertexCase::Case2: return "CASE2";
    case VertexCase::Case3: return "CASE3";
    case VertexCase::Even: return "EVEN";
    case VertexCase::Start: return "START";
  }
  return "?";
}

std::string_view to_string(TerminalKind k) {
  return k == TerminalKind::DiscContraction ? "DISC_CONTRACTION" : "LOCAL_CIRCLE";
}

std::optional<CircleEvidence> circle_evidence(const Timeline& t, const Vertex& v) {
  std::vector<int> events;
  if (v.level > 0) events.push_back(v.level - 1);
  if (v.level < t.last_level()) events.push_back(v.level);
  for (int k : events) {
    const Side side = side_at(k, v);
    const MoveEvent& e = t.events[static_cast<std::size_t>(k)];
    const std::uint32_t choice = local_choice(t, k, side, v);
    const auto counts = partner_counts(t.tables[static_cast<std::size_t>(k)], e, side);
    if (counts[choice] != 0) continue;
    if (local_tangle(e, side, choice).circles != 1) {
      throw InvariantViolation("a local choice without partners has no circle");
    }
    for (const Loop& loop : loops_at(t, v).loops) {
      if (all_inner(loop, e.disc.side(side))) {
        return CircleEvidence{k, side, choice, loop.id(), loop.arcs};
      }
    }
    throw InvariantViolation("local circle not found among the loops of the resolution");
  }
  return std::nullopt;
}

Classification classify_vertex(const Timeline& t, const ResolutionGraph& g, const Vertex& w) {
  const bool odd = g.degree(w) % 2 == 1;
  if (w == g.v_star()) {
    if (odd) return {VertexCase::Start, std::nullopt};
    return {VertexCase::Even, circle_evidence(t, w)};
  }
  if (!odd) return {VertexCase::Even, std::nullopt};
  if (w.level == 0) return {VertexCase::Case1, std::nullopt};
  if (w.level == t.last_level()) return {VertexCase::Case2, std::nullopt};
  auto ev = circle_evidence(t, w);
  if (!ev) throw InvariantViolation("odd interior vertex without a circle-bearing move");
  return {VertexCase::Case3, std::move(ev)};
}

std::vector<std::pair<ArcId, ArcId>> loop_bijection(const Timeline& t, const Edge& e,
                                                    const Vertex& from) {
  const Vertex to = e.other(from);
  const MoveEvent& ev = t.events.at(static_cast<std::size_t>(e.event));
  const Side fs = side_at(e.event, from);
  const Side ts = side_at(e.event, to);
  const DiscSide& fside = ev.disc.side(fs);
  const DiscSide& tside = ev.disc.side(ts);
  const auto lf = loops_at(t, from);
  const auto lt = loops_at(t, to);

  auto map_arc = [&](ArcId a) -> ArcId {
    if (fs == ts) return a;
    if (fs == Side::Before) return ev.carry.at(a);
    for (const auto& [b, image] : ev.carry) {
      if (image == a) return b;
    }
    throw InvariantViolation("arc " + std::to_string(a) + " has no preimage across the move");
  };

  std::vector<std::pair<ArcId, ArcId>> out;
  std::set<ArcId> targets;
  for (const Loop& loop : lf.loops) {
    ArcId target = -1;
    const auto witness = std::find_if(loop.arcs.begin(), loop.arcs.end(),
                                      [&](ArcId a) { return !fside.has_inner_arc(a); });
    if (witness != loop.arcs.end()) {
      const int idx = lt.loop_containing(map_arc(*witness));
      if (idx < 0) throw InvariantViolation("mapped arc lies on no loop");
      target = lt.loops[static_cast<std::size_t>(idx)].id();
    } else {
      for (const Loop& other : lt.loops) {
        if (all_inner(other, tside)) target = other.id();
      }
    }
    if (target < 0 || !targets.insert(target).second) {
      throw InvariantViolation("linked resolutions do not have matching loops");
    }
    out.emplace_back(loop.id(), target);
  }
  if (targets.size() != lt.loops.size()) {
    throw InvariantViolation("linked resolutions have different loop counts");
  }
  return out;
}

Certificate find_certificate(const Timeline& t, int m, int cap) {
  const Vertex vs = find_v_star(t.slices.front(), m, cap);
  const ResolutionGraph g = build_graph(t, vs, GraphMode::Lazy, cap);
  Certificate cert;
  cert.m = m;
  cert.bound = t.bound;
  cert.terminal.terminal_disc = t.terminal_disc;

  if (g.degree(vs) % 2 == 0) {
    auto ev = circle_evidence(t, vs);
    if (!ev) throw InvariantViolation("v* has even degree but no circle-bearing move");
    cert.path.push_back(PathStep{vs, ev->loop});
    cert.terminal.kind = TerminalKind::LocalCircle;
    cert.terminal.vertex_case = VertexCase::Even;
    cert.terminal.degenerate = true;
    cert.terminal.evidence = ev;
    cert.length_audit = audit_length(t, cert.path, ev);
    return cert;
  }

  std::map<Vertex, int> dist{{vs, 0}};
  std::map<Vertex, int> parent_edge;
  std::deque<Vertex> queue{vs};
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop_front();
    std::vector<int> inc = g.incident(u);
    std::sort(inc.begin(), inc.end(), [&](int x, int y) {
      const auto kx = order_key(t, g.edges()[static_cast<std::size_t>(x)].other(u));
      const auto ky = order_key(t, g.edges()[static_cast<std::size_t>(y)].other(u));
      return std::tie(kx, x) < std::tie(ky, y);
    });
    for (int ei : inc) {
      const Vertex w = g.edges()[static_cast<std::size_t>(ei)].other(u);
      if (dist.contains(w)) continue;
      dist[w] = dist[u] + 1;
      parent_edge[w] = ei;
      queue.push_back(w);
    }
  }
  std::optional<Vertex> target;
  std::tuple<int, int, std::string> best;
  for (const auto& [v, dv] : dist) {
    if (v == vs || g.degree(v) % 2 == 0) continue;
    auto key = std::tuple_cat(std::make_tuple(dv), order_key(t, v));
    if (!target || key < best) {
      target = v;
      best = key;
    }
  }
  if (!target) {
    throw InvariantViolation("no odd vertex other than v* in its component (" +
                             std::to_string(dist.size()) + " vertices)");
  }
  const Classification cls = classify_vertex(t, g, *target);
  if (cls.kind == VertexCase::Case1) {
    throw InvariantViolation("odd level-0 vertex " + vertex_label(t, *target) +
                             " other than v* is reachable");
  }

  std::vector<Vertex> vertices{*target};
  std::vector<int> edge_ids;
  while (vertices.back() != vs) {
    const int ei = parent_edge.at(vertices.back());
    edge_ids.push_back(ei);
    vertices.push_back(g.edges()[static_cast<std::size_t>(ei)].other(vertices.back()));
  }
  std::reverse(vertices.begin(), vertices.end());
  std::reverse(edge_ids.begin(), edge_ids.end());

  cert.terminal.vertex_case = cls.kind;
  cert.terminal.kind =
      cls.kind == VertexCase::Case2 ? TerminalKind::DiscContraction : TerminalKind::LocalCircle;
  cert.terminal.evidence = cls.evidence;

  std::vector<ArcId> curves(vertices.size());
  curves.back() = cls.evidence ? cls.evidence->loop : loops_at(t, vertices.back()).loops.at(0).id();
  for (std::size_t i = 0; i < edge_ids.size(); ++i) {
    const Edge& e = g.edges()[static_cast<std::size_t>(edge_ids[i])];
    cert.edges.push_back(PathEdge{e.event, e.pair, loop_bijection(t, e, vertices[i])});
  }
  for (std::size_t i = edge_ids.size(); i-- > 0;) {
    const auto& bij = cert.edges[i].bijection;
    const auto it = std::find_if(bij.begin(), bij.end(),
                                 [&](const auto& p) { return p.second == curves[i + 1]; });
    if (it == bij.end()) throw InvariantViolation("tracked curve lost along the path");
    curves[i] = it->first;
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    cert.path.push_back(PathStep{vertices[i], curves[i]});
  }
  cert.length_audit = audit_length(t, cert.path, cert.terminal.evidence);
  return cert;
}

Certificate find_certificate(const HomotopyScript& script, int cap) {
  return find_certificate(resolve_script(script), distinguished_loops(script), cap);
}

// ---------------------------------------------------------------------------

VerificationReport verify_certificate(const HomotopyScript& script, const Certificate& cert) {
  VerificationReport report;
  auto fail = [&](std::string code, std::string msg) {
    report.failures.push_back({std::move(code), std::move(msg)});
  };
  try {
    if (cert.schema_version != kCertificateSchemaVersion) {
      fail("schema", "unsupported schema version " + std::to_string(cert.schema_version));
      return report;
    }
    const Timeline t = resolve_script(script);
    const int m = distinguished_loops(script);
    if (cert.m != m) fail("m", "certificate is for m=" + std::to_string(cert.m) + ", script has m=" + std::to_string(m));
    const Vertex vs = find_v_star(t.slices.front(), m);
    if (cert.path.empty()) {
      fail("path", "empty path");
      return report;
    }
    if (cert.path.front().vertex != vs) fail("start", "path does not start at v*");
    if (cert.edges.size() + 1 != cert.path.size()) {
      fail("path", "path has " + std::to_string(cert.path.size()) + " vertices but " +
                       std::to_string(cert.edges.size()) + " edges");
      return report;
    }

    std::vector<std::optional<LoopCollection>> loops(cert.path.size());
    for (std::size_t i = 0; i < cert.path.size(); ++i) {
      const Vertex& v = cert.path[i].vertex;
      const std::string where = "path vertex " + std::to_string(i);
      if (v.level < 0 || v.level > t.last_level()) {
        fail("vertex", where + " has level " + std::to_string(v.level) + " outside the timeline");
        continue;
      }
      const CurveDiagram& d = slice_at(t, v);
      if (d.crossing_count() < 64 && (v.mask >> d.crossing_count()) != 0) {
        fail("vertex", where + " has bits beyond the slice's crossings");
        continue;
      }
      loops[i] = smooth(d, Resolution::from_mask(d, v.mask));
      const int n = static_cast<int>(loops[i]->loops.size());
      if (n != m) {
        fail("loop-count", where + " (" + vertex_label(t, v) + ") has " + std::to_string(n) + " loops, expected " + std::to_string(m));
      }
      const auto& ls = loops[i]->loops;
      if (std::none_of(ls.begin(), ls.end(), [&](const Loop& l) { return l.id() == cert.path[i].curve; })) {
        fail("curve", where + " tracks loop " + std::to_string(cert.path[i].curve) + ", which does not exist");
      }
    }

    for (std::size_t i = 0; i < cert.edges.size(); ++i) {
      const PathEdge& pe = cert.edges[i];
      const Vertex& u = cert.path[i].vertex;
      const Vertex& w = cert.path[i + 1].vertex;
      const std::string where = "edge " + std::to_string(i) + " (" +
                                (loops[i] ? vertex_label(t, u) : std::string("?")) + " -- " +
                                (loops[i + 1] ? vertex_label(t, w) : std::string("?")) + ")";
      if (!loops[i] || !loops[i + 1]) continue;
      const int k = pe.event;
      if (k < 0 || k >= static_cast<int>(t.events.size())) {
        fail("non-edge", where + " cites a missing event");
        continue;
      }
      const auto ok_level = [&](const Vertex& v) { return v.level == k || v.level == k + 1; };
      if (!ok_level(u) || !ok_level(w)) {
        fail("non-edge", where + " does not touch the slices of event " + std::to_string(k + 1));
        continue;
      }
      const MoveEvent& ev = t.events[static_cast<std::size_t>(k)];
      const Side su = side_at(k, u);
      const Side sw = side_at(k, w);
      const CurveDiagram& du = slice_at(t, u);
      const CurveDiagram& dw = slice_at(t, w);
      // Outside the disc both resolutions agree crossing by crossing.
      const auto& inside_u = ev.disc.side(su).crossings;
      const auto& inside_w = ev.disc.side(sw).crossings;
      bool outside_ok = true;
      for (CrossingId c : du.crossing_ids()) {
        if (std::find(inside_u.begin(), inside_u.end(), c) != inside_u.end()) continue;
        if (!dw.has_crossing(c) ||
            std::find(inside_w.begin(), inside_w.end(), c) != inside_w.end()) {
          outside_ok = false;
          break;
        }
        const bool bu = (u.mask >> du.bit_of(c)) & 1u;
        const bool bw = (w.mask >> dw.bit_of(c)) & 1u;
        if (bu != bw) {
          outside_ok = false;
          break;
        }
      }
      auto choice = [&](const CurveDiagram& d, const std::vector<CrossingId>& cs, const Vertex& v) {
        std::uint32_t out = 0;
        for (std::size_t j = 0; j < cs.size(); ++j) {
          if ((v.mask >> d.bit_of(cs[j])) & 1u) out |= 1u << j;
        }
        return out;
      };
      const TangleInstance iu{su, choice(du, inside_u, u)};
      const TangleInstance iw{sw, choice(dw, inside_w, w)};
      const auto table = edge_table(ev);
      const bool listed = pe.pair >= 0 && pe.pair < static_cast<int>(table.size()) &&
                          ((table[static_cast<std::size_t>(pe.pair)].first == iu &&
                            table[static_cast<std::size_t>(pe.pair)].second == iw) ||
                           (table[static_cast<std::size_t>(pe.pair)].first == iw &&
                            table[static_cast<std::size_t>(pe.pair)].second == iu));
      const bool isotopic = iu != iw && tangles_isotopic(local_tangle(ev, su, iu.choice),
                                                          local_tangle(ev, sw, iw.choice));
      if (!outside_ok || !listed || !isotopic) {
        fail("non-edge", where + " is not an edge of the resolution graph");
        continue;
      }
      const Edge e{u, w, k, pe.pair};
      auto expected = loop_bijection(t, e, u);
      auto given = pe.bijection;
      std::sort(expected.begin(), expected.end());
      std::sort(given.begin(), given.end());
      if (expected != given) {
        fail("bijection-mismatch", where + " records a loop bijection that does not follow the move");
        continue;
      }
      const auto it = std::find_if(expected.begin(), expected.end(),
                                   [&](const auto& p) { return p.first == cert.path[i].curve; });
      if (it == expected.end() || it->second != cert.path[i + 1].curve) {
        fail("bijection-mismatch", where + " maps tracked loop " +
                                       std::to_string(cert.path[i].curve) + " elsewhere than " +
                                       std::to_string(cert.path[i + 1].curve));
      }
    }

    // Terminal evidence.
    const PathStep& last = cert.path.back();
    const Vertex& w = last.vertex;
    if (!loops.back()) return report;
    const int degree = static_cast<int>(incident_edges(t, w).size());
    const Terminal& term = cert.terminal;
    auto check_evidence = [&]() {
      if (!term.evidence) {
        fail("terminal", "local circle terminal without evidence");
        return;
      }
      const auto recomputed = circle_evidence(t, w);
      if (!recomputed || !(*recomputed == *term.evidence)) {
        fail("terminal", "circle evidence does not match the resolution at " + vertex_label(t, w));
        return;
      }
      if (last.curve != term.evidence->loop) {
        fail("terminal", "tracked loop is not the local circle");
      }
    };
    if (term.degenerate) {
      if (cert.path.size() != 1) fail("terminal", "degenerate certificate with a non-empty path");
      if (degree % 2 != 0) fail("terminal", "v* has odd degree " + std::to_string(degree));
      if (term.kind != TerminalKind::LocalCircle) fail("terminal", "degenerate terminal must be LOCAL_CIRCLE");
      check_evidence();
    } else {
      if (degree % 2 != 1) {
        fail("terminal", "terminal vertex " + vertex_label(t, w) + " has even degree " + std::to_string(degree));
      }
      if (w == vs) fail("terminal", "terminal vertex is v*");
      if (w.level == 0) {
        fail("terminal", "terminal vertex lies at level 0");
      } else if (w.level == t.last_level()) {
        if (term.kind != TerminalKind::DiscContraction || term.vertex_case != VertexCase::Case2) {
          fail("terminal", "last-level terminal must be DISC_CONTRACTION (CASE2)");
        }
        if (!script.terminal_disc) fail("terminal-disc", "script does not assert a terminal disc");
      } else {
        if (term.kind != TerminalKind::LocalCircle || term.vertex_case != VertexCase::Case3) {
          fail("terminal", "interior terminal must be LOCAL_CIRCLE (CASE3)");
        }
        check_evidence();
      }
    }

    const double audit = audit_length(t, cert.path, term.evidence);
    if (std::abs(audit - cert.length_audit) > 1e-9 * std::max(1.0, audit)) {
      fail("length", "recorded length audit " + std::to_string(cert.length_audit) +
                         " differs from " + std::to_string(audit));
    }
    if (script.bound && !(audit < *script.bound)) {
      fail("length", "path reaches length " + std::to_string(audit) + ", not below the bound");
    }
    if (cert.bound != script.bound) fail("length", "certificate bound differs from the script");
  } catch (const Error& err) {
    fail(err.code(), err.what());
  }
  return report;
}

}  // namespace curvesplit
