#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvesplit/diagram.hpp"
#include "curvesplit/moves.hpp"

namespace curvesplit {

/// A discrete homotopy: the initial diagram and one move per time interval.
struct HomotopyScript {
  CurveDiagram initial;
  std::vector<MoveEvent> events;
  std::optional<double> bound;
  bool terminal_disc = false;
  /// Number of loops of the distinguished resolution; defaults to j0 + 1.
  std::optional<int> m;

  friend bool operator==(const HomotopyScript&, const HomotopyScript&) = default;
};

/// Bit positions touched by one event: disc crossings on each side, and each
/// outside crossing's position before and after.
struct EventLayout {
  std::vector<int> before_bits;
  std::vector<int> after_bits;
  std::vector<std::pair<int, int>> outside;
};

/// A script with every event resolved against its slice.
struct Timeline {
  std::vector<CurveDiagram> slices;
  std::vector<MoveEvent> events;
  std::vector<std::vector<LinkedPair>> tables;
  std::vector<EventLayout> layouts;
  std::optional<double> bound;
  bool terminal_disc = false;

  int last_level() const { return static_cast<int>(slices.size()) - 1; }
};

/// Folds the events over the initial diagram. Throws ScriptError citing the
/// 1-based step whose move does not embed, and BoundError for a slice whose
/// length reaches the bound.
Timeline resolve_script(const HomotopyScript& script);
std::vector<CurveDiagram> slice_diagrams(const HomotopyScript& script);

struct Vertex {
  int level = 0;
  std::uint64_t mask = 0;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// An edge of the resolution graph. `a` lifts `pair.first` of the event's
/// table, `b` lifts `pair.second`.
struct Edge {
  Vertex a;
  Vertex b;
  int event = 0;  // 0-based index into the timeline's events
  int pair = 0;   // index into that event's edge table

  Vertex other(const Vertex& v) const { return v == a ? b : a; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

std::string vertex_label(const Timeline& t, const Vertex& v);

/// The bits of `v` at the disc crossings of `event` on `side` (v must sit at
/// that side's level).
std::uint32_t local_choice(const Timeline& t, int event, Side side, const Vertex& v);

/// Every edge touching `v`, from the events on both sides of its level.
std::vector<Edge> incident_edges(const Timeline& t, const Vertex& v);

/// The unique resolution of slice 0 with `loops` loops. Throws
/// PreconditionError when there is none or more than one.
Vertex find_v_star(const CurveDiagram& d, int loops, int cap = kDefaultCrossingCap);
int distinguished_loops(const HomotopyScript& script);

enum class GraphMode { Full, Lazy };

class ResolutionGraph {
 public:
  ResolutionGraph() = default;
  ResolutionGraph(std::vector<Vertex> vertices, std::vector<Edge> edges, Vertex v_star,
                  GraphMode mode);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Vertex& v_star() const { return v_star_; }
  GraphMode mode() const { return mode_; }

  bool contains(const Vertex& v) const { return incidence_.contains(v); }
  /// Edge indices incident to `v`. Throws DomainError for unknown vertices.
  const std::vector<int>& incident(const Vertex& v) const;
  int degree(const Vertex& v) const { return static_cast<int>(incident(v).size()); }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::map<Vertex, std::vector<int>> incidence_;
  Vertex v_star_;
  GraphMode mode_ = GraphMode::Full;
};

ResolutionGraph build_graph(const Timeline& t, const Vertex& v_star, GraphMode mode,
                            int cap = kDefaultCrossingCap);
ResolutionGraph build_graph(const HomotopyScript& script, GraphMode mode,
                            int cap = kDefaultCrossingCap);

struct Subgraph {
  std::vector<Vertex> vertices;  // sorted
  std::vector<int> edges;        // sorted edge indices
};

Subgraph component_of(const ResolutionGraph& g, const Vertex& v);
std::vector<Vertex> odd_vertices(const ResolutionGraph& g, const Subgraph& sub);
std::vector<Vertex> odd_vertices(const ResolutionGraph& g);

/// One line per edge: `level:bits -- level:bits # event=k` (k is 1-based).
std::string export_edge_list(const Timeline& t, const ResolutionGraph& g);

struct RandomScriptOptions {
  int padding = 4;  // expected number of padding moves before each main step
  int max_crossings = 10;  // padding births stop here
  std::optional<double> bound;  // defaults to initial length + 1
};

/// A contraction of the canonical m-fold diagram: kinks die one at a time,
/// interleaved with random births and R3 moves that are undone before each death.
HomotopyScript random_contraction_script(int m, std::uint64_t seed,
                                         const RandomScriptOptions& options = {});

}  // namespace curvesplit
