#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"

namespace curvesplit {

namespace {

using CrossingMap = std::map<CrossingId, CrossingId>;

FrameDiagram frame_diagram(const PolylineFrame& f, int index, double tol) {
  try {
    return diagram_from_frame(f, tol);
  } catch (const GenericityError& e) {
    throw GenericityError("frame " + std::to_string(index) + ": " + e.what());
  }
}

// Mutual nearest crossings of two frames, closer than half the smallest gap
// between crossings of either frame.
CrossingMap match_crossings(const FrameDiagram& a, const FrameDiagram& b) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto* fd : {&a, &b}) {
    const auto& xs = fd->crossings;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        gap = std::min(gap, norm(xs[i].point - xs[j].point));
      }
    }
  }
  auto nearest = [](const std::vector<Intersection>& xs, Vec2 p) {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = norm(xs[i].point - p);
      if (d < dist) {
        dist = d;
        best = static_cast<int>(i);
      }
    }
    return std::pair{best, dist};
  };
  CrossingMap out;
  for (std::size_t i = 0; i < a.crossings.size(); ++i) {
    const auto [j, d] = nearest(b.crossings, a.crossings[i].point);
    if (j < 0 || !(d < gap / 2)) continue;
    if (nearest(a.crossings, b.crossings[static_cast<std::size_t>(j)].point).first !=
        static_cast<int>(i)) {
      continue;
    }
    out.emplace(static_cast<CrossingId>(i), static_cast<CrossingId>(j));
  }
  return out;
}

std::optional<DiagramMorphism> consistent_iso(const CurveDiagram& s, const CurveDiagram& target,
                                              const CrossingMap& hint) {
  CrossingMap h;
  for (const auto& [from, to] : hint) {
    if (s.has_crossing(from)) h.emplace(from, to);
  }
  auto iso = find_isomorphism(s, target, &h);
  if (!iso) return std::nullopt;
  for (const auto& [from, to] : h) {
    if (iso->crossings.at(from) != to) return std::nullopt;
  }
  return iso;
}

struct Candidate {
  MoveResult result;
  DiagramMorphism iso;
  double size = 0.0;
};

std::vector<Candidate> single_moves(const CurveDiagram& s, MoveKind kind, const FrameDiagram& next,
                                    const CrossingMap& hint) {
  std::vector<Candidate> out;
  for (const MoveSite& site : find_sites(s, kind)) {
    MoveEvent e;
    e.kind = kind;
    e.site = site;
    MoveResult r;
    try {
      r = resolve_move(s, e);
    } catch (const MoveMismatchError&) {
      continue;
    } catch (const DomainError&) {
      continue;
    }
    auto iso = consistent_iso(r.after, next.diagram, hint);
    if (!iso) continue;
    double size = 0.0;
    if (is_birth(kind)) {
      for (const auto& a : r.event.disc.after.inner_arcs) {
        size += next.diagram.arc(iso->arcs.at(a.id)).length;
      }
    } else {
      for (const auto& a : r.event.disc.before.inner_arcs) size += s.arc(a.id).length;
    }
    out.push_back({std::move(r), std::move(*iso), size});
  }
  return out;
}

int crossing_delta(MoveKind k) { return disc_crossings_after(k) - disc_crossings_before(k); }

constexpr MoveKind kAllKinds[] = {MoveKind::R1Birth, MoveKind::R1Death, MoveKind::R2Birth,
                                  MoveKind::R2Death, MoveKind::R3};

bool two_moves_explain(const CurveDiagram& s, int delta, const FrameDiagram& next,
                       const CrossingMap& hint) {
  for (MoveKind k1 : kAllKinds) {
    for (MoveKind k2 : kAllKinds) {
      if (crossing_delta(k1) + crossing_delta(k2) != delta) continue;
      for (const MoveSite& site : find_sites(s, k1)) {
        MoveEvent e;
        e.kind = k1;
        e.site = site;
        CurveDiagram mid;
        try {
          mid = apply_move(s, e);
        } catch (const Error&) {
          continue;
        }
        if (!single_moves(mid, k2, next, hint).empty()) return true;
      }
    }
  }
  return false;
}

}  // namespace

HomotopyScript detect_events(const std::vector<PolylineFrame>& frames,
                             std::optional<double> bound, double tol) {
  if (frames.empty()) throw ValidationError("frames", "no frames given");
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    if (!(frames[i].t <= frames[i + 1].t)) {
      throw ValidationError("frames", "frame times are not ordered at frame " + std::to_string(i + 1));
    }
  }
  auto audit = [&](std::size_t i) {
    if (!bound) return;
    const double len = frames[i].total_length();
    if (!(len < *bound)) {
      throw BoundError("frame " + std::to_string(i) + " has length " + std::to_string(len) +
                           ", not below " + std::to_string(*bound),
                       static_cast<int>(i));
    }
  };

  HomotopyScript script;
  script.bound = bound;
  FrameDiagram cur = frame_diagram(frames[0], 0, tol);
  audit(0);
  script.initial = cur.diagram;
  CurveDiagram s = cur.diagram;
  CrossingMap phi;  // script crossing -> crossing of the current frame
  for (CrossingId c : s.crossing_ids()) phi.emplace(c, c);

  for (std::size_t k = 1; k < frames.size(); ++k) {
    const int step = static_cast<int>(k);
    FrameDiagram next = frame_diagram(frames[k], step, tol);
    audit(k);
    const CrossingMap geo = match_crossings(cur, next);
    CrossingMap hint;
    for (const auto& [sc, fc] : phi) {
      auto it = geo.find(fc);
      if (it != geo.end()) hint.emplace(sc, it->second);
    }

    if (s.crossing_count() == next.diagram.crossing_count()) {
      if (auto iso = consistent_iso(s, next.diagram, hint)) {
        phi = iso->crossings;
        cur = std::move(next);
        continue;
      }
    }

    const int delta = next.diagram.crossing_count() - s.crossing_count();
    std::vector<Candidate> found;
    if (std::abs(delta) <= 2) {
      for (MoveKind kind : kAllKinds) {
        if (crossing_delta(kind) != delta) continue;
        auto c = single_moves(s, kind, next, hint);
        for (auto& x : c) found.push_back(std::move(x));
      }
    }
    if (found.empty()) {
      if (std::abs(delta) > 2 || (std::abs(delta) <= 4 && two_moves_explain(s, delta, next, hint))) {
        throw DetectionError("resolution",
                             "frames " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                 " are separated by more than one move; sample the homotopy more finely",
                             step);
      }
      throw DetectionError("classification",
                           "no single Reidemeister move explains the change between frames " +
                               std::to_string(k - 1) + " and " + std::to_string(k),
                           step);
    }
    const auto best = std::min_element(found.begin(), found.end(), [](const auto& a, const auto& b) {
      return a.size < b.size;
    });

    MoveEvent e = best->result.event;
    for (const auto& [id, arc] : best->result.after.arcs()) {
      e.arc_lengths[id] = next.diagram.arc(best->iso.arcs.at(id)).length;
    }
    Vec2 where;
    int n = 0;
    if (is_birth(e.kind)) {
      for (CrossingId c : e.disc.after.crossings) {
        where = where + next.crossings[static_cast<std::size_t>(best->iso.crossings.at(c))].point;
        ++n;
      }
    } else {
      for (CrossingId c : e.disc.before.crossings) {
        where = where + cur.crossings[static_cast<std::size_t>(phi.at(c))].point;
        ++n;
      }
    }
    if (n > 0) where = (1.0 / n) * where;
    e.provenance = EventProvenance{step, where.x, where.y};

    s = resolve_move(s, e).after;
    script.events.push_back(std::move(e));
    phi = best->iso.crossings;
    cur = std::move(next);
  }
  script.terminal_disc = cur.crossings.empty() && frames.back().curves.size() == 1;
  return script;
}

}  // namespace curvesplit
