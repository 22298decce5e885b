#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "curvesplit/diagram.hpp"

namespace curvesplit {

enum class MoveKind : std::uint8_t { R1Birth, R1Death, R2Birth, R2Death, R3 };

std::string_view to_string(MoveKind k);
MoveKind move_kind_from_string(std::string_view s);
bool is_birth(MoveKind k);
/// Crossings inside the disc before and after the move.
int disc_crossings_before(MoveKind k);
int disc_crossings_after(MoveKind k);

/// Where a move happens.
///
/// Deaths and R3 name the face being collapsed or flipped as its dart cycle
/// (monogon, bigon, triangle). Births name host darts; the new crossings appear
/// in the face on the left of each dart (for R2 both darts must share that face).
struct MoveSite {
  std::vector<Dart> darts;
  std::vector<CrossingId> new_crossings;  // births; allocated when empty
  /// Births: R1 -> {kink, continuation}; R2 -> {bigon side 1, bigon side 2,
  /// continuation 1, continuation 2}. Continuations of free-loop hosts stay unused.
  std::vector<ArcId> new_arcs;
  double new_length = 1e-3;  // length of each new arc inside the disc

  friend bool operator==(const MoveSite&, const MoveSite&) = default;
};

enum class Side : std::uint8_t { Before = 0, After = 1 };

struct InnerArc {
  ArcId id = 0;
  Slot tail;
  Slot head;

  friend bool operator==(const InnerArc&, const InnerArc&) = default;
};

/// One side of a move disc: the crossings and arcs inside it and how boundary
/// points attach. Boundary labels are shared by both sides.
struct DiscSide {
  std::vector<CrossingId> crossings;  // ascending; bit i of a local choice is crossings[i]
  std::vector<InnerArc> inner_arcs;
  std::vector<Slot> boundary_slots;         // per label, sides with crossings
  std::vector<std::pair<int, int>> through;  // label pairs, crossing-free sides

  bool has_inner_arc(ArcId a) const;
  friend bool operator==(const DiscSide&, const DiscSide&) = default;
};

struct LocalDisc {
  /// Outside arc end attached at each boundary point, counterclockwise. The ends
  /// refer to the diagram on the side that has crossings (before side for R3).
  std::vector<ArcEnd> boundary;
  DiscSide before;
  DiscSide after;

  const DiscSide& side(Side s) const { return s == Side::Before ? before : after; }
  friend bool operator==(const LocalDisc&, const LocalDisc&) = default;
};

struct EventProvenance {
  int frame = 0;  // index of the first frame after the event
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const EventProvenance&, const EventProvenance&) = default;
};

struct MoveEvent {
  MoveKind kind = MoveKind::R1Death;
  MoveSite site;
  /// Derived by resolve_move; empty until then.
  LocalDisc disc;
  /// Outside arcs of the before diagram -> the arc carrying them afterwards.
  std::map<ArcId, ArcId> carry;
  /// Optional measured lengths applied to the after diagram.
  std::map<ArcId, double> arc_lengths;
  std::optional<EventProvenance> provenance;

  friend bool operator==(const MoveEvent&, const MoveEvent&) = default;
};

struct MoveResult {
  CurveDiagram after;
  MoveEvent event;  // with disc, carry, and allocated ids filled in
  std::vector<Dart> after_face;  // births and R3: the face created by the move
};

/// Checks the site against `d`, fills in the disc data, and rewrites the diagram.
/// Throws MoveMismatchError naming the failing incidence when the disc does not
/// embed. When `e.disc` is already populated it must agree with the recomputation.
MoveResult resolve_move(const CurveDiagram& d, const MoveEvent& e);
CurveDiagram apply_move(const CurveDiagram& d, const MoveEvent& e);

/// The move that undoes a resolved birth or R3 event, stated against `after`.
MoveEvent inverse_move(const MoveResult& r);

/// Every site of the given kind in `d`.
std::vector<MoveSite> find_sites(const CurveDiagram& d, MoveKind kind);

/// Resolved picture inside a disc: a non-crossing matching on the boundary
/// points plus the number of closed circles.
struct LocalTangle {
  int arity = 0;
  std::vector<std::pair<int, int>> pairing;  // each pair (low, high), sorted
  int circles = 0;

  friend bool operator==(const LocalTangle&, const LocalTangle&) = default;
};

bool is_non_crossing(const std::vector<std::pair<int, int>>& pairing);

LocalTangle local_tangle(const MoveEvent& e, Side side, const Resolution& local_choice);
LocalTangle local_tangle(const MoveEvent& e, Side side, std::uint32_t local_mask);

/// True iff the tangles are isotopic rel boundary. Throws DomainError for
/// differing boundary arity.
bool tangles_isotopic(const LocalTangle& a, const LocalTangle& b);

struct TangleInstance {
  Side side = Side::Before;
  std::uint32_t choice = 0;

  friend auto operator<=>(const TangleInstance&, const TangleInstance&) = default;
};

struct LinkedPair {
  TangleInstance first;
  TangleInstance second;

  friend bool operator==(const LinkedPair&, const LinkedPair&) = default;
};

/// All unordered pairs of distinct isotopic tangle instances of one move.
std::vector<LinkedPair> edge_table(const MoveEvent& e);

/// Number of linked partners of each local choice on `side`, indexed by mask.
std::vector<int> partner_counts(const std::vector<LinkedPair>& table, const MoveEvent& e,
                                Side side);

/// A canonical isolated instance of each move kind, for exhaustive local checks.
MoveEvent model_event(MoveKind kind);

}  // namespace curvesplit
