#include "curvesplit/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "curvesplit/errors.hpp"

namespace curvesplit {

namespace {

std::string slot_str(const Slot& s) {
  return "crossing " + std::to_string(s.crossing) + " slot " + std::to_string(s.index);
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// CurveDiagram

void CurveDiagram::add_crossing(CrossingId id, const std::array<ArcEnd, 4>& slots) {
  crossings_[id] = Crossing{id, slots};
  for (int k = 0; k < 4; ++k) {
    auto it = arcs_.find(slots[k].arc);
    if (it == arcs_.end()) continue;
    auto& target = slots[k].end == ArcEndKind::Tail ? it->second.tail : it->second.head;
    target = Slot{id, k};
  }
}

void CurveDiagram::add_arc(ArcId id, double length) {
  arcs_[id] = Arc{id, length, std::nullopt, std::nullopt};
  for (const auto& [cid, c] : crossings_) {
    for (int k = 0; k < 4; ++k) {
      if (c.slots[k].arc != id) continue;
      auto& target = c.slots[k].end == ArcEndKind::Tail ? arcs_[id].tail : arcs_[id].head;
      target = Slot{cid, k};
    }
  }
}

void CurveDiagram::reindex() {
  for (auto& [id, a] : arcs_) {
    a.tail.reset();
    a.head.reset();
  }
  for (const auto& [cid, c] : crossings_) {
    for (int k = 0; k < 4; ++k) {
      auto it = arcs_.find(c.slots[k].arc);
      if (it == arcs_.end()) continue;
      auto& target = c.slots[k].end == ArcEndKind::Tail ? it->second.tail : it->second.head;
      target = Slot{cid, k};
    }
  }
}

const Crossing& CurveDiagram::crossing(CrossingId id) const {
  auto it = crossings_.find(id);
  if (it == crossings_.end()) throw DomainError("unknown crossing " + std::to_string(id));
  return it->second;
}

const Arc& CurveDiagram::arc(ArcId id) const {
  auto it = arcs_.find(id);
  if (it == arcs_.end()) throw DomainError("unknown arc " + std::to_string(id));
  return it->second;
}

std::optional<Slot> CurveDiagram::slot_of(const ArcEnd& e) const {
  const Arc& a = arc(e.arc);
  return e.end == ArcEndKind::Tail ? a.tail : a.head;
}

double CurveDiagram::total_length() const {
  double total = 0.0;
  for (const auto& [id, a] : arcs_) total += a.length;
  return total;
}

std::vector<CrossingId> CurveDiagram::crossing_ids() const {
  std::vector<CrossingId> ids;
  ids.reserve(crossings_.size());
  for (const auto& [id, c] : crossings_) ids.push_back(id);
  return ids;
}

int CurveDiagram::bit_of(CrossingId id) const {
  auto it = crossings_.find(id);
  if (it == crossings_.end()) throw DomainError("unknown crossing " + std::to_string(id));
  return static_cast<int>(std::distance(crossings_.begin(), it));
}

CrossingId CurveDiagram::next_crossing_id() const {
  return crossings_.empty() ? 0 : crossings_.rbegin()->first + 1;
}

ArcId CurveDiagram::next_arc_id() const { return arcs_.empty() ? 0 : arcs_.rbegin()->first + 1; }

void CurveDiagram::set_arc_length(ArcId id, double length) {
  auto it = arcs_.find(id);
  if (it == arcs_.end()) throw DomainError("unknown arc " + std::to_string(id));
  it->second.length = length;
}

void CurveDiagram::retrace_components() {
  std::vector<ArcId> starts;
  for (const auto& comp : components_) {
    for (ArcId a : comp) {
      if (arcs_.contains(a)) {
        starts.push_back(a);
        break;
      }
    }
  }
  for (const auto& [id, a] : arcs_) starts.push_back(id);

  std::set<ArcId> seen;
  std::vector<std::vector<ArcId>> out;
  for (ArcId start : starts) {
    if (seen.contains(start)) continue;
    std::vector<ArcId> comp;
    ArcId cur = start;
    while (true) {
      comp.push_back(cur);
      seen.insert(cur);
      const Arc& a = arcs_.at(cur);
      if (a.is_free_loop() || !a.head) break;
      const ArcEnd next = at(Slot{a.head->crossing, opposite_slot(a.head->index)});
      if (next.end != ArcEndKind::Tail) {
        throw ValidationError("strand-through", "arc " + std::to_string(cur) +
                                                    " does not continue through " +
                                                    slot_str(*a.head));
      }
      if (next.arc == start) break;
      if (seen.contains(next.arc)) {
        throw ValidationError("component", "traversal from arc " + std::to_string(start) +
                                               " does not close up");
      }
      cur = next.arc;
    }
    out.push_back(std::move(comp));
  }
  components_ = std::move(out);
}

Dart CurveDiagram::face_successor(const Dart& d) const {
  const Arc& a = arc(d.arc);
  if (a.is_free_loop()) return d;
  const Slot arrive = d.reversed ? *a.tail : *a.head;
  const ArcEnd leave = at(Slot{arrive.crossing, (arrive.index + 3) & 3});
  return Dart{leave.arc, leave.end == ArcEndKind::Head};
}

std::vector<Dart> CurveDiagram::face_of(const Dart& d) const {
  std::vector<Dart> face{d};
  for (Dart cur = face_successor(d); cur != d; cur = face_successor(cur)) {
    face.push_back(cur);
    if (face.size() > 2 * arcs_.size() + 2) {
      throw InvariantViolation("face tracing did not close up");
    }
  }
  return face;
}

std::vector<std::vector<Dart>> CurveDiagram::faces() const {
  std::set<Dart> seen;
  std::vector<std::vector<Dart>> out;
  for (const auto& [id, a] : arcs_) {
    for (bool rev : {false, true}) {
      const Dart d{id, rev};
      if (seen.contains(d)) continue;
      auto face = face_of(d);
      seen.insert(face.begin(), face.end());
      out.push_back(std::move(face));
    }
  }
  return out;
}

bool operator==(const CurveDiagram& x, const CurveDiagram& y) {
  if (x.crossings_.size() != y.crossings_.size() || x.arcs_.size() != y.arcs_.size()) return false;
  for (const auto& [id, c] : x.crossings_) {
    auto it = y.crossings_.find(id);
    if (it == y.crossings_.end() || it->second.slots != c.slots) return false;
  }
  for (const auto& [id, a] : x.arcs_) {
    auto it = y.arcs_.find(id);
    if (it == y.arcs_.end() || it->second.length != a.length) return false;
  }
  return x.components_ == y.components_ && x.genus_ == y.genus_;
}

// ---------------------------------------------------------------------------
// validate

ValidationReport validate(const CurveDiagram& d) {
  ValidationReport report;
  auto add = [&](std::string code, std::string msg) {
    report.push_back(Finding{std::move(code), std::move(msg)});
  };

  std::map<ArcEnd, int> references;
  for (const auto& [cid, c] : d.crossings()) {
    for (int k = 0; k < 4; ++k) {
      const ArcEnd& e = c.slots[k];
      if (!d.has_arc(e.arc)) {
        add("slot-arity", slot_str({cid, k}) + " references missing arc " + std::to_string(e.arc));
        continue;
      }
      ++references[e];
    }
    for (int k = 0; k < 4; ++k) {
      const ArcEnd& e = c.slots[k];
      const ArcEnd& o = c.slots[opposite_slot(k)];
      if (e.end == o.end) {
        add("strand-through", slot_str({cid, k}) + " and its opposite slot are both " +
                                  (e.end == ArcEndKind::Tail ? "tails" : "heads"));
      }
    }
  }
  for (const auto& [end, n] : references) {
    if (n > 1) {
      add("matching", "end " + std::string(end.end == ArcEndKind::Tail ? "tail" : "head") +
                          " of arc " + std::to_string(end.arc) + " is attached to " +
                          std::to_string(n) + " slots");
    }
  }
  for (const auto& [id, a] : d.arcs()) {
    const bool tail = references.contains(ArcEnd{id, ArcEndKind::Tail});
    const bool head = references.contains(ArcEnd{id, ArcEndKind::Head});
    if (tail != head) {
      add("matching", "arc " + std::to_string(id) + " has only one attached end");
    }
    if (!(a.length >= 0.0) || !std::isfinite(a.length)) {
      add("length", "arc " + std::to_string(id) + " has invalid length");
    }
  }

  // Component traversals.
  std::map<ArcId, int> arc_uses;
  std::map<CrossingId, int> visits;
  for (std::size_t ci = 0; ci < d.components().size(); ++ci) {
    const auto& comp = d.components()[ci];
    if (comp.empty()) {
      add("component", "component " + std::to_string(ci) + " is empty");
      continue;
    }
    for (std::size_t i = 0; i < comp.size(); ++i) {
      const ArcId aid = comp[i];
      if (!d.has_arc(aid)) {
        add("component", "component " + std::to_string(ci) + " references missing arc " +
                             std::to_string(aid));
        continue;
      }
      ++arc_uses[aid];
      const Arc& a = d.arc(aid);
      if (a.is_free_loop()) {
        if (comp.size() != 1) {
          add("component", "free loop arc " + std::to_string(aid) + " shares a component");
        }
        continue;
      }
      if (!a.head || !a.tail) continue;
      ++visits[a.head->crossing];
      const ArcId next = comp[(i + 1) % comp.size()];
      if (!d.has_arc(next)) continue;
      const ArcEnd through = d.at(Slot{a.head->crossing, opposite_slot(a.head->index)});
      if (through.arc != next || through.end != ArcEndKind::Tail) {
        add("component", "component " + std::to_string(ci) + " does not pass straight from arc " +
                             std::to_string(aid) + " to arc " + std::to_string(next));
      }
    }
  }
  for (const auto& [id, a] : d.arcs()) {
    const int uses = arc_uses.contains(id) ? arc_uses[id] : 0;
    if (uses != 1) {
      add("component", "arc " + std::to_string(id) + " appears in " + std::to_string(uses) +
                           " component traversals");
    }
  }
  for (const auto& [cid, c] : d.crossings()) {
    const int n = visits.contains(cid) ? visits[cid] : 0;
    if (n != 2) {
      add("double-occurrence",
          "crossing " + std::to_string(cid) + " is visited " + std::to_string(n) + " times");
    }
  }

  if (report.empty() && d.genus()) {
    // Euler characteristic per connected piece; a free loop counts as a sphere.
    std::map<ArcId, int> index;
    for (const auto& [id, a] : d.arcs()) index.emplace(id, static_cast<int>(index.size()));
    DisjointSets ds(index.size());
    for (const auto& [cid, c] : d.crossings()) {
      for (int k = 1; k < 4; ++k) ds.unite(index[c.slots[0].arc], index[c.slots[k].arc]);
    }
    std::map<int, long> chi;
    for (const auto& [id, a] : d.arcs()) {
      long& x = chi[ds.find(index[id])];
      x -= 1;
      if (a.is_free_loop()) x += 1;
    }
    for (const auto& [cid, c] : d.crossings()) chi[ds.find(index[c.slots[0].arc])] += 1;
    for (const auto& face : d.faces()) chi[ds.find(index[face.front().arc])] += 1;
    long genus2 = 0;
    for (const auto& [root, x] : chi) genus2 += 2 - x;
    if (genus2 != 2L * *d.genus()) {
      add("genus", "diagram has genus " + std::to_string(genus2 / 2.0) + ", tag says " +
                       std::to_string(*d.genus()));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Resolutions

Resolution Resolution::from_mask(const CurveDiagram& d, std::uint64_t mask) {
  Resolution r;
  int bit = 0;
  for (const auto& [id, c] : d.crossings()) {
    r.choice.emplace(id, ((mask >> bit) & 1u) ? Smoothing::B : Smoothing::A);
    ++bit;
  }
  return r;
}

std::uint64_t Resolution::to_mask(const CurveDiagram& d) const {
  std::uint64_t mask = 0;
  int bit = 0;
  for (const auto& [id, c] : d.crossings()) {
    auto it = choice.find(id);
    if (it == choice.end()) {
      throw IncompleteResolutionError("resolution has no choice for crossing " +
                                      std::to_string(id));
    }
    if (it->second == Smoothing::B) mask |= (std::uint64_t{1} << bit);
    ++bit;
  }
  return mask;
}

std::string mask_to_bits(std::uint64_t mask, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if ((mask >> i) & 1u) s[i] = '1';
  }
  return s;
}

std::uint64_t bits_to_mask(std::string_view bits) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      mask |= std::uint64_t{1} << i;
    } else if (bits[i] != '0') {
      throw ValidationError("resolution bit string contains '" + std::string(1, bits[i]) + "'");
    }
  }
  return mask;
}

std::string Resolution::to_bits(const CurveDiagram& d) const {
  return mask_to_bits(to_mask(d), d.crossing_count());
}

Resolution Resolution::from_bits(const CurveDiagram& d, std::string_view bits) {
  if (static_cast<int>(bits.size()) != d.crossing_count()) {
    throw IncompleteResolutionError("resolution has " + std::to_string(bits.size()) +
                                    " bits for " + std::to_string(d.crossing_count()) +
                                    " crossings");
  }
  return from_mask(d, bits_to_mask(bits));
}

int LoopCollection::loop_containing(ArcId arc) const {
  for (std::size_t i = 0; i < loops.size(); ++i) {
    if (std::find(loops[i].arcs.begin(), loops[i].arcs.end(), arc) != loops[i].arcs.end()) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

LoopCollection smooth(const CurveDiagram& d, const Resolution& r) {
  for (const auto& [id, c] : d.crossings()) {
    if (!r.choice.contains(id)) {
      throw IncompleteResolutionError("resolution has no choice for crossing " +
                                      std::to_string(id));
    }
  }
  LoopCollection out;
  std::set<ArcId> visited;
  for (const auto& [start, start_arc] : d.arcs()) {
    if (visited.contains(start)) continue;
    Loop loop;
    ArcId cur = start;
    bool reversed = false;
    while (true) {
      visited.insert(cur);
      loop.arcs.push_back(cur);
      const Arc& a = d.arc(cur);
      loop.length += a.length;
      if (a.is_free_loop()) break;
      const Slot arrive = reversed ? *a.tail : *a.head;
      const int partner = smoothing_partner(arrive.index, r.choice.at(arrive.crossing));
      const ArcEnd next = d.at(Slot{arrive.crossing, partner});
      if (next.arc == start) break;
      cur = next.arc;
      reversed = next.end == ArcEndKind::Head;
    }
    out.total_length += loop.length;
    out.loops.push_back(std::move(loop));
  }
  return out;
}

int count_loops_mask(const CurveDiagram& d, std::uint64_t mask) {
  std::map<ArcId, int> index;
  for (const auto& [id, a] : d.arcs()) index.emplace(id, static_cast<int>(index.size()));
  DisjointSets ds(index.size());
  int loops = static_cast<int>(index.size());
  int bit = 0;
  for (const auto& [cid, c] : d.crossings()) {
    const Smoothing s = ((mask >> bit) & 1u) ? Smoothing::B : Smoothing::A;
    for (int k : {0, 2}) {
      const int p = smoothing_partner(k, s);
      if (ds.unite(index[c.slots[k].arc], index[c.slots[p].arc])) --loops;
    }
    ++bit;
  }
  return loops;
}

int count_loops(const CurveDiagram& d, const Resolution& r) {
  return count_loops_mask(d, r.to_mask(d));
}

ResolutionRange enumerate_resolutions(const CurveDiagram& d, int cap) {
  const int j = d.crossing_count();
  if (j > cap) {
    throw ResourceError("diagram has " + std::to_string(j) + " crossings, cap is " +
                            std::to_string(cap),
                        j, cap);
  }
  return ResolutionRange(d, std::uint64_t{1} << j);
}

// ---------------------------------------------------------------------------
// Construction

CurveDiagram build_from_passes(const std::vector<std::vector<CrossingPass>>& components,
                               const std::vector<std::vector<double>>& arc_lengths) {
  struct Seen {
    int first = 0, second = 0;
    bool sign_first = true, sign_second = true;
  };
  std::map<CrossingId, Seen> seen;
  for (const auto& comp : components) {
    for (const auto& p : comp) {
      auto& s = seen[p.crossing];
      if (p.second) {
        ++s.second;
        s.sign_second = p.positive;
      } else {
        ++s.first;
        s.sign_first = p.positive;
      }
    }
  }
  for (const auto& [id, s] : seen) {
    if (s.first != 1 || s.second != 1) {
      throw ValidationError("double-occurrence",
                            "crossing " + std::to_string(id) + " is not visited exactly twice");
    }
    if (s.sign_first != s.sign_second) {
      throw ValidationError("crossing " + std::to_string(id) + " has inconsistent signs");
    }
  }
  // Slot layout: positive -> fwd1, fwd2, back1, back2; negative -> fwd1, back2, back1, fwd2.
  auto fwd_slot = [&](const CrossingPass& p) {
    if (!p.second) return 0;
    return seen[p.crossing].sign_first ? 1 : 3;
  };
  auto back_slot = [&](const CrossingPass& p) {
    if (!p.second) return 2;
    return seen[p.crossing].sign_first ? 3 : 1;
  };

  std::map<CrossingId, std::array<ArcEnd, 4>> slots;
  CurveDiagram d;
  std::vector<std::vector<ArcId>> comps;
  ArcId next_arc = 0;
  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    const auto& comp = components[ci];
    std::vector<ArcId> ids;
    auto len = [&](std::size_t i) {
      if (ci < arc_lengths.size() && i < arc_lengths[ci].size()) return arc_lengths[ci][i];
      return 1.0;
    };
    if (comp.empty()) {
      d.add_arc(next_arc, len(0));
      ids.push_back(next_arc++);
    } else {
      for (std::size_t i = 0; i < comp.size(); ++i) {
        const auto& from = comp[i];
        const auto& to = comp[(i + 1) % comp.size()];
        const ArcId aid = next_arc++;
        d.add_arc(aid, len(i));
        slots[from.crossing][fwd_slot(from)] = ArcEnd{aid, ArcEndKind::Tail};
        slots[to.crossing][back_slot(to)] = ArcEnd{aid, ArcEndKind::Head};
        ids.push_back(aid);
      }
    }
    comps.push_back(std::move(ids));
  }
  for (const auto& [cid, s] : slots) d.add_crossing(cid, s);
  d.set_components(std::move(comps));
  return d;
}

CurveDiagram from_gauss_code(std::string_view code, double arc_length) {
  std::vector<std::vector<CrossingPass>> components;
  std::vector<CrossingPass> current;
  std::set<CrossingId> first_seen;
  bool started = false;
  std::size_t i = 0;
  auto flush = [&] {
    if (started) components.push_back(std::move(current));
    current.clear();
    started = false;
  };
  while (i < code.size()) {
    const char ch = code[i];
    if (ch == ';' || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
      ++i;
      continue;
    }
    if (ch == '#') {  // explicit crossing-free component
      started = true;
      ++i;
      continue;
    }
    started = true;
    if (ch == 'O' || ch == 'U' || ch == 'o' || ch == 'u') ++i;
    std::size_t j = i;
    while (j < code.size() && std::isdigit(static_cast<unsigned char>(code[j]))) ++j;
    if (j == i || j >= code.size() || (code[j] != '+' && code[j] != '-')) {
      throw ValidationError("gauss", "malformed Gauss code near position " + std::to_string(i));
    }
    const CrossingId id = std::stoi(std::string(code.substr(i, j - i)));
    const bool second = first_seen.contains(id);
    first_seen.insert(id);
    current.push_back(CrossingPass{id, second, code[j] == '+'});
    i = j + 1;
  }
  flush();
  if (components.empty()) components.emplace_back();
  std::vector<std::vector<double>> lengths;
  for (const auto& comp : components) {
    lengths.emplace_back(std::max<std::size_t>(comp.size(), 1), arc_length);
  }
  return build_from_passes(components, lengths);
}

std::pair<CurveDiagram, Resolution> canonical_perturbed_m_gamma(int m) {
  if (m < 2) throw DomainError("canonical_perturbed_m_gamma needs m >= 2, got " + std::to_string(m));
  const int k = m - 1;
  // Spiral passes every crossing outward, the closing segment passes them inward.
  std::vector<CrossingPass> passes;
  for (int i = 0; i < k; ++i) passes.push_back({i, false, true});
  for (int i = k - 1; i >= 0; --i) passes.push_back({i, true, true});

  std::vector<double> lengths;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < k; ++i) lengths.push_back(two_pi * (1.0 + 0.05 * (i + 1) / m));
  for (int i = 0; i + 1 < k; ++i) lengths.push_back(0.05 / m);
  lengths.push_back(two_pi);  // innermost loop
  CurveDiagram d = build_from_passes({passes}, {lengths});

  // The oriented smoothing separates the layers; with this slot layout it is B.
  Resolution r;
  for (int i = 0; i < k; ++i) r.choice.emplace(i, Smoothing::B);
  return {std::move(d), std::move(r)};
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

struct Piece {
  std::vector<CrossingId> crossings;
  std::vector<ArcId> arcs;  // ascending
};

std::vector<Piece> pieces_of(const CurveDiagram& d) {
  std::map<ArcId, int> index;
  std::vector<ArcId> ids;
  for (const auto& [id, a] : d.arcs()) {
    index.emplace(id, static_cast<int>(ids.size()));
    ids.push_back(id);
  }
  DisjointSets ds(ids.size());
  for (const auto& [cid, c] : d.crossings()) {
    for (int k = 1; k < 4; ++k) ds.unite(index[c.slots[0].arc], index[c.slots[k].arc]);
  }
  std::map<int, Piece> by_root;
  for (ArcId id : ids) by_root[ds.find(index[id])].arcs.push_back(id);
  for (const auto& [cid, c] : d.crossings()) {
    by_root[ds.find(index[c.slots[0].arc])].crossings.push_back(cid);
  }
  std::vector<Piece> out;
  for (auto& [root, p] : by_root) out.push_back(std::move(p));
  return out;
}

// Extends a morphism from the single arc pairing a0 -> b0 over a connected piece.
std::optional<DiagramMorphism> grow(const CurveDiagram& a, const CurveDiagram& b, ArcId a0,
                                    ArcId b0) {
  DiagramMorphism m;
  std::map<CrossingId, int> offset;
  std::vector<ArcId> work{a0};
  m.arcs[a0] = b0;
  std::set<ArcId> b_used{b0};
  std::set<CrossingId> b_crossings_used;

  auto map_arc = [&](ArcId x, ArcId y) -> bool {
    auto it = m.arcs.find(x);
    if (it != m.arcs.end()) return it->second == y;
    if (b_used.contains(y)) return false;
    m.arcs[x] = y;
    b_used.insert(y);
    work.push_back(x);
    return true;
  };
  auto map_slot = [&](const std::optional<Slot>& sx, const std::optional<Slot>& sy) -> bool {
    if (sx.has_value() != sy.has_value()) return false;
    if (!sx) return true;
    const int off = (sy->index - sx->index + 4) & 3;
    auto it = m.crossings.find(sx->crossing);
    if (it != m.crossings.end()) {
      return it->second == sy->crossing && offset[sx->crossing] == off;
    }
    if (b_crossings_used.contains(sy->crossing)) return false;
    m.crossings[sx->crossing] = sy->crossing;
    offset[sx->crossing] = off;
    b_crossings_used.insert(sy->crossing);
    const Crossing& cx = a.crossing(sx->crossing);
    const Crossing& cy = b.crossing(sy->crossing);
    for (int k = 0; k < 4; ++k) {
      const ArcEnd& ex = cx.slots[k];
      const ArcEnd& ey = cy.slots[(k + off) & 3];
      if (ex.end != ey.end) return false;
      if (!map_arc(ex.arc, ey.arc)) return false;
    }
    return true;
  };

  while (!work.empty()) {
    const ArcId x = work.back();
    work.pop_back();
    const Arc& ax = a.arc(x);
    const Arc& ay = b.arc(m.arcs.at(x));
    if (!map_slot(ax.tail, ay.tail) || !map_slot(ax.head, ay.head)) return std::nullopt;
  }
  return m;
}

bool agrees(const DiagramMorphism& m, const std::map<CrossingId, CrossingId>* hint) {
  if (!hint) return true;
  for (const auto& [x, y] : *hint) {
    auto it = m.crossings.find(x);
    if (it != m.crossings.end() && it->second != y) return false;
  }
  return true;
}

}  // namespace

std::optional<DiagramMorphism> find_isomorphism(const CurveDiagram& a, const CurveDiagram& b,
                                                const std::map<CrossingId, CrossingId>* hint) {
  if (a.crossing_count() != b.crossing_count() || a.arcs().size() != b.arcs().size()) {
    return std::nullopt;
  }
  const auto pa = pieces_of(a);
  const auto pb = pieces_of(b);
  if (pa.size() != pb.size()) return std::nullopt;

  // Candidate morphisms per (piece of a, piece of b).
  std::vector<std::vector<std::pair<int, DiagramMorphism>>> options(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) {
      if (pa[i].arcs.size() != pb[j].arcs.size() ||
          pa[i].crossings.size() != pb[j].crossings.size()) {
        continue;
      }
      std::optional<DiagramMorphism> fallback;
      bool found = false;
      for (ArcId y : pb[j].arcs) {
        auto m = grow(a, b, pa[i].arcs.front(), y);
        if (!m) continue;
        if (agrees(*m, hint)) {
          options[i].emplace_back(static_cast<int>(j), std::move(*m));
          found = true;
          break;
        }
        if (!fallback) fallback = std::move(m);
      }
      if (!found && fallback) options[i].emplace_back(static_cast<int>(j), std::move(*fallback));
    }
    // Hint-consistent options first.
    std::stable_partition(options[i].begin(), options[i].end(),
                          [&](const auto& o) { return agrees(o.second, hint); });
  }

  std::vector<bool> used(pb.size(), false);
  DiagramMorphism result;
  std::vector<const DiagramMorphism*> chosen(pa.size(), nullptr);
  auto search = [&](auto&& self, std::size_t i) -> bool {
    if (i == pa.size()) return true;
    for (const auto& [j, m] : options[i]) {
      if (used[j]) continue;
      used[j] = true;
      chosen[i] = &m;
      if (self(self, i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  if (!search(search, 0)) return std::nullopt;
  for (const auto* m : chosen) {
    result.crossings.insert(m->crossings.begin(), m->crossings.end());
    result.arcs.insert(m->arcs.begin(), m->arcs.end());
  }
  return result;
}

}  // namespace curvesplit
