#include "curvesplit/moves.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>
#include <string>

#include "curvesplit/errors.hpp"

namespace curvesplit {

namespace {

std::string dart_str(const Dart& d) {
  return "dart " + std::string(d.reversed ? "-" : "+") + std::to_string(d.arc);
}

std::string slot_str(const Slot& s) {
  return "crossing " + std::to_string(s.crossing) + " slot " + std::to_string(s.index);
}

int expected_face_size(MoveKind k) {
  switch (k) {
    case MoveKind::R1Death: return 1;
    case MoveKind::R2Death: return 2;
    case MoveKind::R3: return 3;
    default: return 0;
  }
}

Slot arrival(const CurveDiagram& d, const Dart& dart) {
  const Arc& a = d.arc(dart.arc);
  return dart.reversed ? *a.tail : *a.head;
}

// Checks that `darts` is a face cycle (in order) around distinct crossings.
void check_face(const CurveDiagram& d, const std::vector<Dart>& darts, std::size_t size,
                std::string_view what) {
  if (darts.size() != size) {
    throw MoveMismatchError(std::string(what) + " needs " + std::to_string(size) +
                            " darts, got " + std::to_string(darts.size()));
  }
  std::set<ArcId> arcs;
  std::set<CrossingId> crossings;
  for (const Dart& dart : darts) {
    if (!d.has_arc(dart.arc)) {
      throw MoveMismatchError(std::string(what) + ": arc " + std::to_string(dart.arc) +
                              " does not exist");
    }
    if (d.arc(dart.arc).is_free_loop()) {
      throw MoveMismatchError(std::string(what) + ": arc " + std::to_string(dart.arc) +
                              " is a free loop");
    }
    arcs.insert(dart.arc);
    crossings.insert(arrival(d, dart).crossing);
  }
  if (arcs.size() != size || crossings.size() != size) {
    throw MoveMismatchError(std::string(what) + ": face darts must use distinct arcs and crossings");
  }
  for (std::size_t i = 0; i < size; ++i) {
    const Dart next = d.face_successor(darts[i]);
    if (next != darts[(i + 1) % size]) {
      throw MoveMismatchError(std::string(what) + ": " + dart_str(darts[i]) + " arriving at " +
                              slot_str(arrival(d, darts[i])) + " is followed by " +
                              dart_str(next) + ", not " + dart_str(darts[(i + 1) % size]));
    }
  }
}

// Disc data for a side with crossings, read off the face cycle around it.
struct CrossingSide {
  DiscSide side;
  std::vector<ArcEnd> boundary;
};

CrossingSide crossing_side(const CurveDiagram& d, const std::vector<Dart>& face) {
  CrossingSide out;
  std::set<ArcId> inner;
  for (const Dart& dart : face) inner.insert(dart.arc);
  for (const Dart& dart : face) {
    const Slot s = arrival(d, dart);
    out.side.crossings.push_back(s.crossing);
    for (int step : {1, 2}) {
      const Slot b{s.crossing, (s.index + step) & 3};
      const ArcEnd e = d.at(b);
      if (inner.contains(e.arc)) {
        throw MoveMismatchError("outer " + slot_str(b) + " holds inner arc " +
                                std::to_string(e.arc));
      }
      out.side.boundary_slots.push_back(b);
      out.boundary.push_back(e);
    }
  }
  for (ArcId a : inner) {
    const Arc& arc = d.arc(a);
    out.side.inner_arcs.push_back(InnerArc{a, *arc.tail, *arc.head});
  }
  std::sort(out.side.crossings.begin(), out.side.crossings.end());
  return out;
}

// For a side with crossings, which boundary labels are joined along strands.
std::vector<std::pair<int, int>> strand_pairs(const CurveDiagram& d, const DiscSide& side) {
  std::map<Slot, int> label;
  for (std::size_t i = 0; i < side.boundary_slots.size(); ++i) {
    label[side.boundary_slots[i]] = static_cast<int>(i);
  }
  std::vector<std::pair<int, int>> pairs;
  std::set<int> done;
  for (const auto& [start, b] : label) {
    if (done.contains(b)) continue;
    Slot cur = start;
    for (int guard = 0;; ++guard) {
      if (guard > 8) throw InvariantViolation("strand inside a move disc does not exit");
      const Slot through{cur.crossing, opposite_slot(cur.index)};
      if (auto it = label.find(through); it != label.end()) {
        pairs.emplace_back(std::min(b, it->second), std::max(b, it->second));
        done.insert(b);
        done.insert(it->second);
        break;
      }
      const ArcEnd e = d.at(through);
      const Arc& a = d.arc(e.arc);
      cur = e.end == ArcEndKind::Tail ? *a.head : *a.tail;
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

// Finds the face made exactly of `arcs` (in either direction).
std::vector<Dart> face_of_arcs(const CurveDiagram& d, const std::vector<ArcId>& arcs) {
  const std::set<ArcId> want(arcs.begin(), arcs.end());
  for (bool rev : {false, true}) {
    auto face = d.face_of(Dart{arcs.front(), rev});
    std::set<ArcId> got;
    for (const Dart& x : face) got.insert(x.arc);
    if (face.size() == arcs.size() && got == want) {
      // Start from the smallest dart for a canonical site.
      auto it = std::min_element(face.begin(), face.end());
      std::rotate(face.begin(), it, face.end());
      return face;
    }
  }
  throw InvariantViolation("move did not produce the expected face");
}

// ---------------------------------------------------------------------------
// Deaths: collapse a monogon or bigon.

MoveResult resolve_death(const CurveDiagram& d, MoveEvent e) {
  const std::size_t size = static_cast<std::size_t>(expected_face_size(e.kind));
  check_face(d, e.site.darts, size, to_string(e.kind));
  auto [before, boundary] = crossing_side(d, e.site.darts);
  DiscSide after;
  after.through = strand_pairs(d, before);

  // Merge outside arcs joined along strands through the disc.
  std::map<ArcEnd, ArcEnd> joined;  // head end -> tail end it continues into
  for (const auto& [x, y] : after.through) {
    const ArcEnd ex = boundary[x];
    const ArcEnd ey = boundary[y];
    if (ex.end == ey.end) throw InvariantViolation("strand through a disc reverses direction");
    if (ex.end == ArcEndKind::Head) {
      joined[ex] = ey;
    } else {
      joined[ey] = ex;
    }
  }
  std::set<CrossingId> disc_crossings(before.crossings.begin(), before.crossings.end());
  std::set<ArcId> inner;
  for (const auto& ia : before.inner_arcs) inner.insert(ia.id);

  // Chains of outside arcs; each becomes one arc named by its smallest id.
  std::map<ArcId, ArcId> carry;
  struct Chain {
    std::vector<ArcId> arcs;
    bool closed = false;
  };
  std::vector<Chain> chains;
  std::set<ArcId> in_chain;
  auto next_in_chain = [&](ArcId a) -> std::optional<ArcId> {
    auto it = joined.find(ArcEnd{a, ArcEndKind::Head});
    if (it == joined.end()) return std::nullopt;
    return it->second.arc;
  };
  std::set<ArcId> has_pred;
  for (const auto& [head, tail] : joined) has_pred.insert(tail.arc);
  for (const auto& [head, tail] : joined) {
    const ArcId a = head.arc;
    if (in_chain.contains(a) || has_pred.contains(a)) continue;
    Chain c;
    for (std::optional<ArcId> cur = a; cur; cur = next_in_chain(*cur)) {
      c.arcs.push_back(*cur);
      in_chain.insert(*cur);
    }
    chains.push_back(std::move(c));
  }
  for (const auto& [head, tail] : joined) {  // remaining arcs lie on closed chains
    const ArcId a = head.arc;
    if (in_chain.contains(a)) continue;
    Chain c;
    c.closed = true;
    for (ArcId cur = a;;) {
      c.arcs.push_back(cur);
      in_chain.insert(cur);
      cur = *next_in_chain(cur);
      if (cur == a) break;
    }
    chains.push_back(std::move(c));
  }

  CurveDiagram out;
  std::map<ArcEnd, ArcEnd> rename;  // surviving chain ends
  for (const Chain& c : chains) {
    const ArcId rep = *std::min_element(c.arcs.begin(), c.arcs.end());
    double length = 0.0;
    for (ArcId a : c.arcs) {
      length += d.arc(a).length;
      carry[a] = rep;
    }
    out.add_arc(rep, length);
    if (!c.closed) {
      rename[ArcEnd{c.arcs.front(), ArcEndKind::Tail}] = ArcEnd{rep, ArcEndKind::Tail};
      rename[ArcEnd{c.arcs.back(), ArcEndKind::Head}] = ArcEnd{rep, ArcEndKind::Head};
    }
  }
  for (const auto& [id, a] : d.arcs()) {
    if (inner.contains(id) || in_chain.contains(id)) continue;
    out.add_arc(id, a.length);
    carry[id] = id;
  }
  for (const auto& [cid, c] : d.crossings()) {
    if (disc_crossings.contains(cid)) continue;
    auto slots = c.slots;
    for (auto& s : slots) {
      if (auto it = rename.find(s); it != rename.end()) s = it->second;
    }
    out.add_crossing(cid, slots);
  }
  // Keep component order: each old component maps to the carry of its first outside arc.
  std::vector<std::vector<ArcId>> hint;
  for (const auto& comp : d.components()) {
    for (ArcId a : comp) {
      if (carry.contains(a)) {
        hint.push_back({carry[a]});
        break;
      }
    }
  }
  out.set_components(std::move(hint));
  out.set_genus(d.genus());
  out.retrace_components();

  e.disc = LocalDisc{boundary, before, after};
  e.carry = std::move(carry);
  return MoveResult{std::move(out), std::move(e), {}};
}

// ---------------------------------------------------------------------------
// Births: insert a kink or a bigon.

struct PassPlan {
  Dart host;
  Slot in_end, mid_start, mid_end, out_start;
  ArcId mid = 0, cont = 0;
};

MoveResult resolve_birth(const CurveDiagram& d, MoveEvent e) {
  const bool r2 = e.kind == MoveKind::R2Birth;
  const std::size_t ndarts = r2 ? 2 : 1;
  if (e.site.darts.size() != ndarts) {
    throw MoveMismatchError(std::string(to_string(e.kind)) + " needs " + std::to_string(ndarts) +
                            " host darts");
  }
  for (const Dart& dart : e.site.darts) {
    if (!d.has_arc(dart.arc)) {
      throw MoveMismatchError("host arc " + std::to_string(dart.arc) + " does not exist");
    }
  }
  if (r2) {
    const Dart d1 = e.site.darts[0];
    const Dart d2 = e.site.darts[1];
    if (d1.arc == d2.arc) {
      throw MoveMismatchError("R2_BIRTH on a single arc is not supported; split it first");
    }
    // Darts in one connected piece must border a common face.
    auto face = d.face_of(d1);
    bool shared = std::find(face.begin(), face.end(), d2) != face.end();
    if (!shared) {
      std::set<ArcId> piece{d1.arc};
      std::vector<ArcId> work{d1.arc};
      while (!work.empty()) {
        const Arc& a = d.arc(work.back());
        work.pop_back();
        for (const auto& s : {a.tail, a.head}) {
          if (!s) continue;
          for (const ArcEnd& x : d.crossing(s->crossing).slots) {
            if (piece.insert(x.arc).second) work.push_back(x.arc);
          }
        }
      }
      if (piece.contains(d2.arc)) {
        throw MoveMismatchError(dart_str(d1) + " and " + dart_str(d2) + " do not share a face");
      }
    }
  }

  MoveSite& site = e.site;
  const std::size_t ncross = r2 ? 2 : 1;
  if (site.new_crossings.empty()) {
    CrossingId c = d.next_crossing_id();
    for (std::size_t i = 0; i < ncross; ++i) site.new_crossings.push_back(c++);
  }
  if (site.new_arcs.empty()) {
    ArcId a = d.next_arc_id();
    for (std::size_t i = 0; i < 2 * ncross; ++i) site.new_arcs.push_back(a++);
  }
  if (site.new_crossings.size() != ncross || site.new_arcs.size() != 2 * ncross) {
    throw MoveMismatchError("birth site has the wrong number of new ids");
  }
  for (CrossingId c : site.new_crossings) {
    if (d.has_crossing(c)) throw MoveMismatchError("new crossing id " + std::to_string(c) + " is taken");
  }
  for (ArcId a : site.new_arcs) {
    if (d.has_arc(a)) throw MoveMismatchError("new arc id " + std::to_string(a) + " is taken");
  }
  if (!(site.new_length >= 0.0)) throw MoveMismatchError("negative new arc length");

  std::vector<PassPlan> plans;
  if (!r2) {
    const CrossingId c = site.new_crossings[0];
    plans.push_back({site.darts[0], {c, 2}, {c, 0}, {c, 1}, {c, 3}, site.new_arcs[0],
                     site.new_arcs[1]});
  } else {
    const CrossingId c1 = site.new_crossings[0];
    const CrossingId c2 = site.new_crossings[1];
    plans.push_back({site.darts[0], {c1, 3}, {c1, 1}, {c2, 1}, {c2, 3}, site.new_arcs[0],
                     site.new_arcs[2]});
    plans.push_back({site.darts[1], {c2, 0}, {c2, 2}, {c1, 0}, {c1, 2}, site.new_arcs[1],
                     site.new_arcs[3]});
  }

  std::map<CrossingId, std::array<ArcEnd, 4>> slots;
  for (const auto& [cid, c] : d.crossings()) slots[cid] = c.slots;
  std::map<ArcId, double> lengths;
  for (const auto& [id, a] : d.arcs()) lengths[id] = a.length;
  auto put = [&](const Slot& s, ArcId a, ArcEndKind k) { slots[s.crossing][s.index] = ArcEnd{a, k}; };

  for (const PassPlan& p : plans) {
    const Arc& host = d.arc(p.host.arc);
    const ArcId a = host.id;
    lengths[p.mid] = site.new_length;
    const bool fwd = !p.host.reversed;
    // Mid piece runs mid_start -> mid_end along the dart.
    if (fwd) {
      put(p.mid_start, p.mid, ArcEndKind::Tail);
      put(p.mid_end, p.mid, ArcEndKind::Head);
    } else {
      put(p.mid_end, p.mid, ArcEndKind::Tail);
      put(p.mid_start, p.mid, ArcEndKind::Head);
    }
    if (host.is_free_loop()) {
      if (fwd) {
        put(p.out_start, a, ArcEndKind::Tail);
        put(p.in_end, a, ArcEndKind::Head);
      } else {
        put(p.in_end, a, ArcEndKind::Tail);
        put(p.out_start, a, ArcEndKind::Head);
      }
      continue;
    }
    const Slot old_head = *host.head;
    lengths[a] = host.length / 2.0;
    lengths[p.cont] = host.length / 2.0;
    if (fwd) {
      put(p.in_end, a, ArcEndKind::Head);
      put(p.out_start, p.cont, ArcEndKind::Tail);
    } else {
      put(p.out_start, a, ArcEndKind::Head);
      put(p.in_end, p.cont, ArcEndKind::Tail);
    }
    // The continuation takes over the host's old head unless that slot was rewritten.
    if (slots[old_head.crossing][old_head.index] == ArcEnd{a, ArcEndKind::Head}) {
      put(old_head, p.cont, ArcEndKind::Head);
    }
  }

  std::vector<ArcId> mids;
  for (const PassPlan& p : plans) mids.push_back(p.mid);
  auto build = [&]() {
    CurveDiagram out;
    for (const auto& [id, len] : lengths) out.add_arc(id, len);
    for (const auto& [cid, s] : slots) out.add_crossing(cid, s);
    std::vector<std::vector<ArcId>> hint;
    for (const auto& comp : d.components()) hint.push_back({comp.front()});
    out.set_components(std::move(hint));
    out.set_genus(d.genus());
    out.retrace_components();
    if (auto report = validate(out); !report.empty()) {
      throw InvariantViolation("birth produced an invalid diagram: " + report.front().message);
    }
    auto face = face_of_arcs(out, mids);
    auto [after, boundary] = crossing_side(out, face);
    DiscSide before;
    before.through = strand_pairs(out, after);
    e.disc = LocalDisc{boundary, before, after};
    return MoveResult{std::move(out), e, std::move(face)};
  };
  for (auto it = lengths.begin(); it != lengths.end();) {
    bool used = false;
    for (const auto& [cid, s] : slots) {
      for (const ArcEnd& x : s) used = used || x.arc == it->first;
    }
    it = used || d.has_arc(it->first) ? std::next(it) : lengths.erase(it);
  }

  e.carry.clear();
  for (const auto& [id, a] : d.arcs()) e.carry[id] = id;
  MoveResult r = build();
  if (r2) {
    // Label the bigon so that B at both corners is the choice linked to the
    // crossing-free side.
    for (const auto& pair : edge_table(r.event)) {
      if (pair.first.side != Side::Before) continue;
      const auto& cs = r.event.disc.after.crossings;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        if ((pair.second.choice >> i) & 1u) continue;
        auto& s = slots[cs[i]];
        std::rotate(s.begin(), s.begin() + 1, s.end());
      }
      break;
    }
    r = build();
  }
  return r;
}

// ---------------------------------------------------------------------------
// R3: slide one strand across the opposite crossing of a triangle.

MoveResult resolve_r3(const CurveDiagram& d, MoveEvent e) {
  check_face(d, e.site.darts, 3, "R3");
  auto [before, boundary] = crossing_side(d, e.site.darts);

  std::map<CrossingId, std::array<ArcEnd, 4>> slots;
  for (const auto& [cid, c] : d.crossings()) slots[cid] = c.slots;
  // Along each inner arc tail P -> head Q the strand order P, Q becomes Q, P.
  // Ray directions at each crossing stay put; only the arcs move.
  std::vector<std::pair<Slot, ArcEnd>> writes;
  for (const InnerArc& ia : before.inner_arcs) {
    const Slot p = ia.tail;
    const Slot q = ia.head;
    const Slot p_in{p.crossing, opposite_slot(p.index)};
    const Slot q_out{q.crossing, opposite_slot(q.index)};
    const ArcEnd in_end = d.at(p_in);    // head of the arc entering the disc
    const ArcEnd out_end = d.at(q_out);  // tail of the arc leaving the disc
    writes.emplace_back(q, in_end);
    writes.emplace_back(q_out, ArcEnd{ia.id, ArcEndKind::Tail});
    writes.emplace_back(p_in, ArcEnd{ia.id, ArcEndKind::Head});
    writes.emplace_back(p, out_end);
  }
  for (const auto& [s, x] : writes) slots[s.crossing][s.index] = x;

  CurveDiagram out;
  for (const auto& [id, a] : d.arcs()) out.add_arc(id, a.length);
  for (const auto& [cid, s] : slots) out.add_crossing(cid, s);
  std::vector<std::vector<ArcId>> hint;
  for (const auto& comp : d.components()) hint.push_back({comp.front()});
  out.set_components(std::move(hint));
  out.set_genus(d.genus());
  out.retrace_components();
  if (auto report = validate(out); !report.empty()) {
    throw InvariantViolation("R3 produced an invalid diagram: " + report.front().message);
  }

  std::vector<ArcId> inner_ids;
  for (const auto& ia : before.inner_arcs) inner_ids.push_back(ia.id);
  auto face = face_of_arcs(out, inner_ids);
  auto [after_side, after_boundary] = crossing_side(out, face);
  // Relabel after-side boundary slots by the shared outside arc ends.
  DiscSide after = after_side;
  after.boundary_slots.assign(boundary.size(), Slot{});
  for (std::size_t j = 0; j < after_boundary.size(); ++j) {
    auto it = std::find(boundary.begin(), boundary.end(), after_boundary[j]);
    if (it == boundary.end()) throw InvariantViolation("R3 lost a boundary point");
    after.boundary_slots[static_cast<std::size_t>(it - boundary.begin())] =
        after_side.boundary_slots[j];
  }
  // The boundary keeps its cyclic order.
  const std::size_t n = boundary.size();
  const auto start = std::find(after_boundary.begin(), after_boundary.end(), boundary[0]);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t idx = (static_cast<std::size_t>(start - after_boundary.begin()) + j) % n;
    if (after_boundary[idx] != boundary[j]) {
      throw InvariantViolation("R3 changed the cyclic order of the disc boundary");
    }
  }

  e.disc = LocalDisc{boundary, before, after};
  e.carry.clear();
  for (const auto& [id, a] : d.arcs()) {
    if (!before.has_inner_arc(id)) e.carry[id] = id;
  }
  return MoveResult{std::move(out), std::move(e), std::move(face)};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(MoveKind k) {
  switch (k) {
    case MoveKind::R1Birth: return "R1_BIRTH";
    case MoveKind::R1Death: return "R1_DEATH";
    case MoveKind::R2Birth: return "R2_BIRTH";
    case MoveKind::R2Death: return "R2_DEATH";
    case MoveKind::R3: return "R3";
  }
  return "?";
}

MoveKind move_kind_from_string(std::string_view s) {
  for (MoveKind k : {MoveKind::R1Birth, MoveKind::R1Death, MoveKind::R2Birth, MoveKind::R2Death,
                     MoveKind::R3}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown move kind '" + std::string(s) + "'");
}

bool is_birth(MoveKind k) { return k == MoveKind::R1Birth || k == MoveKind::R2Birth; }

int disc_crossings_before(MoveKind k) {
  switch (k) {
    case MoveKind::R1Birth:
    case MoveKind::R2Birth: return 0;
    case MoveKind::R1Death: return 1;
    case MoveKind::R2Death: return 2;
    case MoveKind::R3: return 3;
  }
  return 0;
}

int disc_crossings_after(MoveKind k) {
  switch (k) {
    case MoveKind::R1Death:
    case MoveKind::R2Death: return 0;
    case MoveKind::R1Birth: return 1;
    case MoveKind::R2Birth: return 2;
    case MoveKind::R3: return 3;
  }
  return 0;
}

bool DiscSide::has_inner_arc(ArcId a) const {
  return std::any_of(inner_arcs.begin(), inner_arcs.end(),
                     [&](const InnerArc& x) { return x.id == a; });
}

MoveResult resolve_move(const CurveDiagram& d, const MoveEvent& e) {
  MoveEvent fresh = e;
  fresh.disc = LocalDisc{};
  fresh.carry.clear();
  MoveResult r;
  switch (e.kind) {
    case MoveKind::R1Death:
    case MoveKind::R2Death: r = resolve_death(d, std::move(fresh)); break;
    case MoveKind::R1Birth:
    case MoveKind::R2Birth: r = resolve_birth(d, std::move(fresh)); break;
    case MoveKind::R3: r = resolve_r3(d, std::move(fresh)); break;
  }
  const bool given = !e.disc.boundary.empty() || !e.disc.before.crossings.empty() ||
                     !e.disc.after.crossings.empty();
  if (given && !(e.disc == r.event.disc)) {
    throw MoveMismatchError(std::string(to_string(e.kind)) +
                            ": recorded disc does not match the diagram");
  }
  for (const auto& [id, len] : e.arc_lengths) {
    if (!r.after.has_arc(id)) {
      throw MoveMismatchError("length override for missing arc " + std::to_string(id));
    }
    r.after.set_arc_length(id, len);
  }
  return r;
}

CurveDiagram apply_move(const CurveDiagram& d, const MoveEvent& e) {
  return resolve_move(d, e).after;
}

MoveEvent inverse_move(const MoveResult& r) {
  MoveEvent inv;
  switch (r.event.kind) {
    case MoveKind::R1Birth: inv.kind = MoveKind::R1Death; break;
    case MoveKind::R2Birth: inv.kind = MoveKind::R2Death; break;
    case MoveKind::R3: inv.kind = MoveKind::R3; break;
    default: throw DomainError("inverse_move supports births and R3 only");
  }
  inv.site.darts = r.after_face;
  return inv;
}

std::vector<MoveSite> find_sites(const CurveDiagram& d, MoveKind kind) {
  std::vector<MoveSite> out;
  if (kind == MoveKind::R1Birth) {
    for (const auto& [id, a] : d.arcs()) {
      for (bool rev : {false, true}) out.push_back(MoveSite{{Dart{id, rev}}, {}, {}, 1e-3});
    }
    return out;
  }
  if (kind == MoveKind::R2Birth) {
    std::vector<Dart> darts;
    for (const auto& [id, a] : d.arcs()) {
      darts.push_back({id, false});
      darts.push_back({id, true});
    }
    for (const auto& face : d.faces()) {
      const std::set<Dart> in_face(face.begin(), face.end());
      for (const Dart& x : face) {
        for (const Dart& y : face) {
          if (x < y && x.arc != y.arc) out.push_back(MoveSite{{x, y}, {}, {}, 1e-3});
        }
      }
    }
    // Darts of different connected pieces also admit a finger move.
    for (const Dart& x : darts) {
      for (const Dart& y : darts) {
        if (!(x < y) || x.arc == y.arc) continue;
        MoveEvent probe;
        probe.kind = MoveKind::R2Birth;
        probe.site.darts = {x, y};
        auto face = d.face_of(x);
        if (std::find(face.begin(), face.end(), y) != face.end()) continue;
        try {
          (void)resolve_move(d, probe);
          out.push_back(probe.site);
        } catch (const MoveMismatchError&) {
        }
      }
    }
    return out;
  }
  const std::size_t size = static_cast<std::size_t>(expected_face_size(kind));
  for (const auto& face : d.faces()) {
    if (face.size() != size) continue;
    std::set<ArcId> arcs;
    std::set<CrossingId> crossings;
    bool ok = true;
    for (const Dart& x : face) {
      if (d.arc(x.arc).is_free_loop()) {
        ok = false;
        break;
      }
      arcs.insert(x.arc);
      crossings.insert(arrival(d, x).crossing);
    }
    if (ok && arcs.size() == size && crossings.size() == size) {
      out.push_back(MoveSite{face, {}, {}, 1e-3});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local tangles

bool is_non_crossing(const std::vector<std::pair<int, int>>& pairing) {
  for (const auto& [a, b] : pairing) {
    for (const auto& [c, e] : pairing) {
      // Chords (a,b) and (c,e) with a<b, c<e cross iff exactly one of c, e lies in (a,b).
      const bool c_in = a < c && c < b;
      const bool e_in = a < e && e < b;
      if (c_in != e_in) return false;
    }
  }
  return true;
}

LocalTangle local_tangle(const MoveEvent& e, Side side, std::uint32_t local_mask) {
  const DiscSide& s = e.disc.side(side);
  LocalTangle t;
  t.arity = static_cast<int>(e.disc.boundary.size());
  if (local_mask >> s.crossings.size()) {
    throw IncompleteResolutionError("local choice has bits beyond the disc crossings");
  }
  if (s.crossings.empty()) {
    t.pairing = s.through;
    std::sort(t.pairing.begin(), t.pairing.end());
    return t;
  }
  auto choice_at = [&](CrossingId c) {
    const auto it = std::lower_bound(s.crossings.begin(), s.crossings.end(), c);
    const auto bit = static_cast<std::size_t>(it - s.crossings.begin());
    return ((local_mask >> bit) & 1u) ? Smoothing::B : Smoothing::A;
  };
  std::map<Slot, int> label;
  for (std::size_t i = 0; i < s.boundary_slots.size(); ++i) {
    label[s.boundary_slots[i]] = static_cast<int>(i);
  }
  std::map<Slot, std::pair<int, Slot>> inner_end;  // slot -> (inner arc index, other end)
  for (std::size_t i = 0; i < s.inner_arcs.size(); ++i) {
    const auto& ia = s.inner_arcs[i];
    inner_end[ia.tail] = {static_cast<int>(i), ia.head};
    inner_end[ia.head] = {static_cast<int>(i), ia.tail};
  }
  std::vector<bool> used(s.inner_arcs.size(), false);
  const int guard_limit = 4 * static_cast<int>(s.inner_arcs.size()) + 4;

  std::set<int> done;
  for (const auto& [start, b] : label) {
    if (done.contains(b)) continue;
    Slot cur = start;
    for (int guard = 0;; ++guard) {
      if (guard > guard_limit) throw InvariantViolation("local tangle traversal does not exit");
      const Slot partner{cur.crossing, smoothing_partner(cur.index, choice_at(cur.crossing))};
      if (auto it = label.find(partner); it != label.end()) {
        t.pairing.emplace_back(std::min(b, it->second), std::max(b, it->second));
        done.insert(b);
        done.insert(it->second);
        break;
      }
      const auto& [idx, other] = inner_end.at(partner);
      used[idx] = true;
      cur = other;
    }
  }
  for (std::size_t i = 0; i < s.inner_arcs.size(); ++i) {
    if (used[i]) continue;
    ++t.circles;
    Slot cur = s.inner_arcs[i].head;
    used[i] = true;
    for (int guard = 0;; ++guard) {
      if (guard > guard_limit) throw InvariantViolation("local circle does not close");
      const Slot partner{cur.crossing, smoothing_partner(cur.index, choice_at(cur.crossing))};
      const auto& [idx, other] = inner_end.at(partner);
      if (used[idx]) break;
      used[idx] = true;
      cur = other;
    }
  }
  if (t.circles > 1) {
    throw InvariantViolation("a move disc produced " + std::to_string(t.circles) + " circles");
  }
  std::sort(t.pairing.begin(), t.pairing.end());
  return t;
}

LocalTangle local_tangle(const MoveEvent& e, Side side, const Resolution& local_choice) {
  const DiscSide& s = e.disc.side(side);
  if (local_choice.choice.size() != s.crossings.size()) {
    throw IncompleteResolutionError("local choice covers " +
                                    std::to_string(local_choice.choice.size()) +
                                    " crossings, disc has " + std::to_string(s.crossings.size()));
  }
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < s.crossings.size(); ++i) {
    auto it = local_choice.choice.find(s.crossings[i]);
    if (it == local_choice.choice.end()) {
      throw IncompleteResolutionError("local choice misses disc crossing " +
                                      std::to_string(s.crossings[i]));
    }
    if (it->second == Smoothing::B) mask |= 1u << i;
  }
  return local_tangle(e, side, mask);
}

bool tangles_isotopic(const LocalTangle& a, const LocalTangle& b) {
  if (a.arity != b.arity) {
    throw DomainError("tangles have different boundary arity (" + std::to_string(a.arity) +
                      " vs " + std::to_string(b.arity) + ")");
  }
  return a.pairing == b.pairing && a.circles == b.circles;
}

std::vector<LinkedPair> edge_table(const MoveEvent& e) {
  std::vector<std::pair<TangleInstance, LocalTangle>> all;
  for (Side side : {Side::Before, Side::After}) {
    const auto n = std::uint32_t{1} << e.disc.side(side).crossings.size();
    for (std::uint32_t m = 0; m < n; ++m) {
      all.emplace_back(TangleInstance{side, m}, local_tangle(e, side, m));
    }
  }
  std::vector<LinkedPair> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (tangles_isotopic(all[i].second, all[j].second)) {
        out.push_back(LinkedPair{all[i].first, all[j].first});
      }
    }
  }
  return out;
}

std::vector<int> partner_counts(const std::vector<LinkedPair>& table, const MoveEvent& e,
                                Side side) {
  std::vector<int> counts(std::size_t{1} << e.disc.side(side).crossings.size(), 0);
  for (const auto& p : table) {
    if (p.first.side == side) ++counts[p.first.choice];
    if (p.second.side == side) ++counts[p.second.choice];
  }
  return counts;
}

MoveEvent model_event(MoveKind kind) {
  auto at = [](MoveKind k, std::vector<Dart> darts) {
    MoveEvent e;
    e.kind = k;
    e.site.darts = std::move(darts);
    return e;
  };
  const CurveDiagram circle = from_gauss_code("");
  const CurveDiagram two_circles = from_gauss_code("# #");
  switch (kind) {
    case MoveKind::R1Birth:
      return resolve_move(circle, at(kind, {{0, false}})).event;
    case MoveKind::R1Death: {
      auto birth = resolve_move(circle, at(MoveKind::R1Birth, {{0, false}}));
      return resolve_move(birth.after, inverse_move(birth)).event;
    }
    case MoveKind::R2Birth:
      return resolve_move(two_circles, at(kind, {{0, false}, {1, false}})).event;
    case MoveKind::R2Death: {
      auto birth = resolve_move(two_circles, at(MoveKind::R2Birth, {{0, false}, {1, false}}));
      return resolve_move(birth.after, inverse_move(birth)).event;
    }
    case MoveKind::R3: {
      const CurveDiagram trefoil = from_gauss_code("O1+U2-O3+U1+O2-U3+");
      const auto sites = find_sites(trefoil, MoveKind::R3);
      if (sites.empty()) throw InvariantViolation("trefoil shadow has no triangle face");
      MoveEvent e = at(kind, sites.front().darts);
      return resolve_move(trefoil, e).event;
    }
  }
  throw DomainError("unknown move kind");
}

}  // namespace curvesplit
