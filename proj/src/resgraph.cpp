#include "curvesplit/resgraph.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "curvesplit/errors.hpp"

namespace curvesplit {

namespace {

EventLayout layout_of(const CurveDiagram& before, const CurveDiagram& after, const MoveEvent& e,
                      int step) {
  EventLayout out;
  for (CrossingId c : e.disc.before.crossings) out.before_bits.push_back(before.bit_of(c));
  for (CrossingId c : e.disc.after.crossings) out.after_bits.push_back(after.bit_of(c));
  const std::set<CrossingId> inside(e.disc.before.crossings.begin(),
                                    e.disc.before.crossings.end());
  const std::set<CrossingId> inside_after(e.disc.after.crossings.begin(),
                                          e.disc.after.crossings.end());
  for (CrossingId c : before.crossing_ids()) {
    if (inside.contains(c)) continue;
    if (!after.has_crossing(c) || inside_after.contains(c)) {
      throw ScriptError("script", "crossing " + std::to_string(c) +
                                      " outside the move disc does not survive step " +
                                      std::to_string(step), step);
    }
    out.outside.emplace_back(before.bit_of(c), after.bit_of(c));
  }
  if (out.outside.size() + out.after_bits.size() != static_cast<std::size_t>(after.crossing_count())) {
    throw ScriptError("script", "step " + std::to_string(step) + " creates crossings outside its disc",
                      step);
  }
  return out;
}

Vertex lift(const Timeline& t, int event, const TangleInstance& inst, const Vertex& from,
            Side from_side) {
  const EventLayout& lay = t.layouts[static_cast<std::size_t>(event)];
  Vertex v;
  v.level = event + (inst.side == Side::After ? 1 : 0);
  const auto& bits = inst.side == Side::Before ? lay.before_bits : lay.after_bits;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if ((inst.choice >> i) & 1u) v.mask |= std::uint64_t{1} << bits[i];
  }
  for (const auto& [pb, pa] : lay.outside) {
    const int src = from_side == Side::Before ? pb : pa;
    const int dst = inst.side == Side::Before ? pb : pa;
    if ((from.mask >> src) & 1u) v.mask |= std::uint64_t{1} << dst;
  }
  return v;
}

Vertex compose(const EventLayout& lay, int event, const TangleInstance& inst,
               std::uint64_t outside) {
  Vertex v;
  v.level = event + (inst.side == Side::After ? 1 : 0);
  const auto& bits = inst.side == Side::Before ? lay.before_bits : lay.after_bits;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if ((inst.choice >> i) & 1u) v.mask |= std::uint64_t{1} << bits[i];
  }
  for (std::size_t i = 0; i < lay.outside.size(); ++i) {
    if ((outside >> i) & 1u) {
      const auto& [pb, pa] = lay.outside[i];
      v.mask |= std::uint64_t{1} << (inst.side == Side::Before ? pb : pa);
    }
  }
  return v;
}

void check_mask_width(const CurveDiagram& d, int level) {
  if (d.crossing_count() > 63) {
    throw ResourceError("slice " + std::to_string(level) + " has " +
                            std::to_string(d.crossing_count()) +
                            " crossings; resolutions are limited to 63 bits",
                        d.crossing_count(), 63);
  }
}

}  // namespace

Timeline resolve_script(const HomotopyScript& script) {
  if (script.events.empty()) {
    throw ScriptError("script", "a homotopy script needs at least one event", 0);
  }
  if (script.bound && !(*script.bound > 0.0)) {
    throw ScriptError("script", "the length bound must be positive", 0);
  }
  if (auto report = validate(script.initial); !report.empty()) {
    throw ScriptError("script", "initial diagram: " + report.front().message, 0);
  }
  Timeline t;
  t.bound = script.bound;
  t.terminal_disc = script.terminal_disc;
  t.slices.push_back(script.initial);
  auto audit = [&](const CurveDiagram& d, int step) {
    check_mask_width(d, step);
    if (t.bound && d.total_length() >= *t.bound) {
      throw BoundError("slice " + std::to_string(step) + " has length " +
                           std::to_string(d.total_length()) + ", not below the bound " +
                           std::to_string(*t.bound),
                       step);
    }
  };
  audit(script.initial, 0);
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    const int step = static_cast<int>(i) + 1;
    MoveResult r;
    try {
      r = resolve_move(t.slices.back(), script.events[i]);
    } catch (const MoveMismatchError& err) {
      throw ScriptError("script", "step " + std::to_string(step) + " (" +
                                      std::string(to_string(script.events[i].kind)) +
                                      "): " + err.what(),
                        step);
    } catch (const DomainError& err) {
      throw ScriptError("script", "step " + std::to_string(step) + ": " + err.what(), step);
    }
    audit(r.after, step);
    t.layouts.push_back(layout_of(t.slices.back(), r.after, r.event, step));
    t.tables.push_back(edge_table(r.event));
    t.events.push_back(std::move(r.event));
    t.slices.push_back(std::move(r.after));
  }
  return t;
}

std::vector<CurveDiagram> slice_diagrams(const HomotopyScript& script) {
  return resolve_script(script).slices;
}

std::string vertex_label(const Timeline& t, const Vertex& v) {
  const auto& d = t.slices.at(static_cast<std::size_t>(v.level));
  return std::to_string(v.level) + ":" + mask_to_bits(v.mask, d.crossing_count());
}

std::uint32_t local_choice(const Timeline& t, int event, Side side, const Vertex& v) {
  const EventLayout& lay = t.layouts.at(static_cast<std::size_t>(event));
  const auto& bits = side == Side::Before ? lay.before_bits : lay.after_bits;
  std::uint32_t out = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if ((v.mask >> bits[i]) & 1u) out |= 1u << i;
  }
  return out;
}

std::vector<Edge> incident_edges(const Timeline& t, const Vertex& v) {
  if (v.level < 0 || v.level > t.last_level()) {
    throw DomainError("level " + std::to_string(v.level) + " is outside the timeline");
  }
  const int j = t.slices[static_cast<std::size_t>(v.level)].crossing_count();
  if (j < 64 && (v.mask >> j) != 0) {
    throw DomainError("resolution has bits beyond the " + std::to_string(j) + " crossings of slice " +
                      std::to_string(v.level));
  }
  std::vector<Edge> out;
  auto scan = [&](int event, Side side) {
    const TangleInstance self{side, local_choice(t, event, side, v)};
    const auto& table = t.tables[static_cast<std::size_t>(event)];
    for (std::size_t p = 0; p < table.size(); ++p) {
      const LinkedPair& pair = table[p];
      if (pair.first == self) {
        out.push_back(Edge{v, lift(t, event, pair.second, v, side), event, static_cast<int>(p)});
      } else if (pair.second == self) {
        out.push_back(Edge{lift(t, event, pair.first, v, side), v, event, static_cast<int>(p)});
      }
    }
  };
  if (v.level > 0) scan(v.level - 1, Side::After);
  if (v.level < t.last_level()) scan(v.level, Side::Before);
  return out;
}

Vertex find_v_star(const CurveDiagram& d, int loops, int cap) {
  if (d.crossing_count() > cap) {
    throw ResourceError("initial diagram has " + std::to_string(d.crossing_count()) +
                            " crossings, above the cap " + std::to_string(cap),
                        d.crossing_count(), cap);
  }
  std::vector<std::uint64_t> hits;
  const std::uint64_t total = std::uint64_t{1} << d.crossing_count();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (count_loops_mask(d, mask) == loops) hits.push_back(mask);
  }
  if (hits.size() != 1) {
    std::string msg = "initial diagram has " + std::to_string(hits.size()) +
                      " resolutions with " + std::to_string(loops) + " loops; exactly one is required";
    if (hits.size() > 1) {
      msg += " (" + mask_to_bits(hits[0], d.crossing_count()) + ", " +
             mask_to_bits(hits[1], d.crossing_count()) + (hits.size() > 2 ? ", ...)" : ")");
    }
    throw PreconditionError(msg);
  }
  return Vertex{0, hits.front()};
}

int distinguished_loops(const HomotopyScript& script) {
  return script.m.value_or(script.initial.crossing_count() + 1);
}

ResolutionGraph::ResolutionGraph(std::vector<Vertex> vertices, std::vector<Edge> edges,
                                 Vertex v_star, GraphMode mode)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), v_star_(v_star), mode_(mode) {
  std::sort(vertices_.begin(), vertices_.end());
  std::sort(edges_.begin(), edges_.end());
  for (const Vertex& v : vertices_) incidence_[v];
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    const auto ia = incidence_.find(e.a);
    const auto ib = incidence_.find(e.b);
    if (ia == incidence_.end() || ib == incidence_.end()) {
      throw InvariantViolation("edge endpoint missing from the vertex set");
    }
    ia->second.push_back(static_cast<int>(i));
    if (e.b != e.a) ib->second.push_back(static_cast<int>(i));
  }
}

const std::vector<int>& ResolutionGraph::incident(const Vertex& v) const {
  const auto it = incidence_.find(v);
  if (it == incidence_.end()) {
    throw DomainError("vertex " + std::to_string(v.level) + ":" + std::to_string(v.mask) +
                      " is not in the graph");
  }
  return it->second;
}

ResolutionGraph build_graph(const Timeline& t, const Vertex& v_star, GraphMode mode, int cap) {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  if (mode == GraphMode::Full) {
    for (std::size_t i = 0; i < t.slices.size(); ++i) {
      const int j = t.slices[i].crossing_count();
      if (j > cap) {
        throw ResourceError("slice " + std::to_string(i) + " has " + std::to_string(j) +
                                " crossings, above the full-mode cap " + std::to_string(cap) +
                                "; use lazy mode",
                            j, cap);
      }
    }
    for (std::size_t i = 0; i < t.slices.size(); ++i) {
      const std::uint64_t n = std::uint64_t{1} << t.slices[i].crossing_count();
      for (std::uint64_t m = 0; m < n; ++m) vertices.push_back(Vertex{static_cast<int>(i), m});
    }
    for (std::size_t k = 0; k < t.events.size(); ++k) {
      const EventLayout& lay = t.layouts[k];
      const std::uint64_t n = std::uint64_t{1} << lay.outside.size();
      const auto& table = t.tables[k];
      for (std::size_t p = 0; p < table.size(); ++p) {
        for (std::uint64_t o = 0; o < n; ++o) {
          edges.push_back(Edge{compose(lay, static_cast<int>(k), table[p].first, o),
                               compose(lay, static_cast<int>(k), table[p].second, o),
                               static_cast<int>(k), static_cast<int>(p)});
        }
      }
    }
  } else {
    std::set<Vertex> seen{v_star};
    std::set<Edge> found;
    std::deque<Vertex> queue{v_star};
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop_front();
      for (const Edge& e : incident_edges(t, v)) {
        found.insert(e);
        const Vertex w = e.other(v);
        if (seen.insert(w).second) queue.push_back(w);
      }
    }
    vertices.assign(seen.begin(), seen.end());
    edges.assign(found.begin(), found.end());
  }
  return ResolutionGraph(std::move(vertices), std::move(edges), v_star, mode);
}

ResolutionGraph build_graph(const HomotopyScript& script, GraphMode mode, int cap) {
  const Timeline t = resolve_script(script);
  const Vertex v_star = find_v_star(t.slices.front(), distinguished_loops(script), cap);
  return build_graph(t, v_star, mode, cap);
}

Subgraph component_of(const ResolutionGraph& g, const Vertex& v) {
  (void)g.incident(v);
  std::set<Vertex> seen{v};
  std::set<int> edges;
  std::vector<Vertex> stack{v};
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (int ei : g.incident(u)) {
      edges.insert(ei);
      const Vertex w = g.edges()[static_cast<std::size_t>(ei)].other(u);
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return Subgraph{{seen.begin(), seen.end()}, {edges.begin(), edges.end()}};
}

std::vector<Vertex> odd_vertices(const ResolutionGraph& g, const Subgraph& sub) {
  std::vector<Vertex> out;
  for (const Vertex& v : sub.vertices) {
    if (g.degree(v) % 2 == 1) out.push_back(v);
  }
  return out;
}

std::vector<Vertex> odd_vertices(const ResolutionGraph& g) {
  std::vector<Vertex> out;
  for (const Vertex& v : g.vertices()) {
    if (g.degree(v) % 2 == 1) out.push_back(v);
  }
  return out;
}

std::string export_edge_list(const Timeline& t, const ResolutionGraph& g) {
  std::ostringstream os;
  for (const Edge& e : g.edges()) {
    os << vertex_label(t, e.a) << " -- " << vertex_label(t, e.b) << " # event=" << e.event + 1
       << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

HomotopyScript random_contraction_script(int m, std::uint64_t seed,
                                         const RandomScriptOptions& options) {
  auto [d, r] = canonical_perturbed_m_gamma(m);
  HomotopyScript script;
  script.initial = d;
  script.m = m;
  script.terminal_disc = true;
  script.bound = options.bound.value_or(d.total_length() + 1.0);

  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  auto emit = [&](const MoveResult& res) {
    script.events.push_back(res.event);
    d = res.after;
  };

  while (d.crossing_count() > 0) {
    std::vector<MoveResult> stack;
    const int ops = std::uniform_int_distribution<int>(0, 2 * std::max(0, options.padding))(rng);
    for (int op = 0; op < ops; ++op) {
      const bool room = d.crossing_count() + 2 <= options.max_crossings;
      if (!stack.empty() && (!room || std::bernoulli_distribution(0.35)(rng))) {
        const MoveResult top = std::move(stack.back());
        stack.pop_back();
        emit(resolve_move(d, inverse_move(top)));
        continue;
      }
      if (!room) continue;
      std::vector<std::pair<MoveKind, MoveSite>> options_here;
      for (MoveKind k : {MoveKind::R1Birth, MoveKind::R2Birth, MoveKind::R3}) {
        auto sites = find_sites(d, k);
        if (sites.empty()) continue;
        options_here.emplace_back(k, sites[pick(sites.size())]);
      }
      const auto& [kind, site] = options_here[pick(options_here.size())];
      MoveEvent e;
      e.kind = kind;
      e.site.darts = site.darts;
      MoveResult res = resolve_move(d, e);
      emit(res);
      stack.push_back(std::move(res));
    }
    while (!stack.empty()) {
      const MoveResult top = std::move(stack.back());
      stack.pop_back();
      emit(resolve_move(d, inverse_move(top)));
    }

    // Kill a kink at the smallest crossing, preferring the newer (inner) arc.
    auto sites = find_sites(d, MoveKind::R1Death);
    if (sites.empty()) throw InvariantViolation("contraction has no kink to remove");
    auto crossing_of = [&](const MoveSite& s) { return d.arc(s.darts[0].arc).head->crossing; };
    const auto best = std::min_element(sites.begin(), sites.end(), [&](const auto& a, const auto& b) {
      const auto ka = std::make_pair(crossing_of(a), -a.darts[0].arc);
      const auto kb = std::make_pair(crossing_of(b), -b.darts[0].arc);
      return ka < kb;
    });
    MoveEvent e;
    e.kind = MoveKind::R1Death;
    e.site.darts = best->darts;
    emit(resolve_move(d, e));
  }
  return script;
}

}  // namespace curvesplit
