#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curvesplit {

using CrossingId = int;
using ArcId = int;

enum class ArcEndKind : std::uint8_t { Tail = 0, Head = 1 };

/// One end of an arc. Arcs are oriented along the component traversal.
struct ArcEnd {
  ArcId arc = 0;
  ArcEndKind end = ArcEndKind::Tail;

  friend auto operator<=>(const ArcEnd&, const ArcEnd&) = default;
};

/// A half-edge slot: position 0..3 in the counterclockwise rotation at a crossing.
/// Along a strand, slot k continues straight through to slot k+2 (mod 4).
struct Slot {
  CrossingId crossing = 0;
  int index = 0;

  friend auto operator<=>(const Slot&, const Slot&) = default;
};

inline int opposite_slot(int k) { return (k + 2) & 3; }

struct Crossing {
  CrossingId id = 0;
  std::array<ArcEnd, 4> slots{};
};

/// An arc between two crossing slots, or a free embedded loop when both ends
/// are empty.
struct Arc {
  ArcId id = 0;
  double length = 0.0;
  std::optional<Slot> tail;
  std::optional<Slot> head;

  bool is_free_loop() const { return !tail && !head; }
};

/// A traversal direction along an arc. Faces are traced with the face on the
/// left of each dart.
struct Dart {
  ArcId arc = 0;
  bool reversed = false;

  friend auto operator<=>(const Dart&, const Dart&) = default;
};

/// Immersed closed curve(s) as a 4-valent combinatorial map with arc lengths.
///
/// Arc endpoints are derived from the crossing slot table, so the slot table is
/// the single source of truth; `components` is stored as given and checked by
/// `validate`.
class CurveDiagram {
 public:
  CurveDiagram() = default;

  /// Adds a crossing whose slot table references arcs that may be added later.
  void add_crossing(CrossingId id, const std::array<ArcEnd, 4>& slots);
  void add_arc(ArcId id, double length);
  void set_components(std::vector<std::vector<ArcId>> components) {
    components_ = std::move(components);
  }
  /// Recomputes components by traversal; components start at their smallest arc
  /// unless a previous component order can be kept.
  void retrace_components();
  void set_genus(std::optional<int> genus) { genus_ = genus; }

  const std::map<CrossingId, Crossing>& crossings() const { return crossings_; }
  const std::map<ArcId, Arc>& arcs() const { return arcs_; }
  const std::vector<std::vector<ArcId>>& components() const { return components_; }
  std::optional<int> genus() const { return genus_; }

  const Crossing& crossing(CrossingId id) const;
  const Arc& arc(ArcId id) const;
  bool has_crossing(CrossingId id) const { return crossings_.contains(id); }
  bool has_arc(ArcId id) const { return arcs_.contains(id); }
  ArcEnd at(const Slot& s) const { return crossing(s.crossing).slots[s.index]; }
  std::optional<Slot> slot_of(const ArcEnd& e) const;

  int crossing_count() const { return static_cast<int>(crossings_.size()); }
  double total_length() const;
  std::vector<CrossingId> crossing_ids() const;
  /// Bit position of a crossing in resolution masks (ascending id order).
  int bit_of(CrossingId id) const;

  CrossingId next_crossing_id() const;
  ArcId next_arc_id() const;

  void set_arc_length(ArcId id, double length);

  /// Rebuilds arc endpoint caches from the slot table. Called by mutators.
  void reindex();

  /// Next dart in the face to the left of `d`.
  Dart face_successor(const Dart& d) const;
  /// All faces as dart cycles, each starting from its smallest dart.
  std::vector<std::vector<Dart>> faces() const;
  /// The face containing `d`.
  std::vector<Dart> face_of(const Dart& d) const;

  friend bool operator==(const CurveDiagram&, const CurveDiagram&);

 private:
  std::map<CrossingId, Crossing> crossings_;
  std::map<ArcId, Arc> arcs_;
  std::vector<std::vector<ArcId>> components_;
  std::optional<int> genus_;
};

struct Finding {
  std::string code;
  std::string message;
};
using ValidationReport = std::vector<Finding>;

ValidationReport validate(const CurveDiagram& d);

enum class Smoothing : std::uint8_t { A = 0, B = 1 };

/// Slot partner under a smoothing: A pairs (0,1),(2,3); B pairs (0,3),(1,2).
inline int smoothing_partner(int slot, Smoothing s) {
  if (s == Smoothing::A) return slot ^ 1;
  return 3 - slot;
}

/// A smoothing choice per crossing.
struct Resolution {
  std::map<CrossingId, Smoothing> choice;

  static Resolution from_mask(const CurveDiagram& d, std::uint64_t mask);
  /// Throws IncompleteResolutionError when a crossing of `d` is missing.
  std::uint64_t to_mask(const CurveDiagram& d) const;
  /// One character per crossing in ascending id order: '0' = A, '1' = B.
  std::string to_bits(const CurveDiagram& d) const;
  static Resolution from_bits(const CurveDiagram& d, std::string_view bits);

  friend bool operator==(const Resolution&, const Resolution&) = default;
};

std::string mask_to_bits(std::uint64_t mask, int width);
std::uint64_t bits_to_mask(std::string_view bits);

struct Loop {
  std::vector<ArcId> arcs;  // cyclic, rotated to start at the smallest arc
  double length = 0.0;

  ArcId id() const { return arcs.front(); }
};

struct LoopCollection {
  std::vector<Loop> loops;  // ordered by smallest arc id
  double total_length = 0.0;

  /// Index into `loops` of the loop containing `arc`.
  int loop_containing(ArcId arc) const;
};

LoopCollection smooth(const CurveDiagram& d, const Resolution& r);
int count_loops(const CurveDiagram& d, const Resolution& r);
/// Same as count_loops with the resolution given as a bit mask over ascending ids.
int count_loops_mask(const CurveDiagram& d, std::uint64_t mask);

inline constexpr int kDefaultCrossingCap = 20;

/// Lazily enumerates all 2^j resolutions of a diagram in mask order.
class ResolutionRange {
 public:
  class iterator {
   public:
    using value_type = Resolution;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(const CurveDiagram* d, std::uint64_t mask) : d_(d), mask_(mask) {}
    Resolution operator*() const { return Resolution::from_mask(*d_, mask_); }
    iterator& operator++() {
      ++mask_;
      return *this;
    }
    iterator operator++(int) {
      auto old = *this;
      ++mask_;
      return old;
    }
    std::uint64_t mask() const { return mask_; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.mask_ == b.mask_; }

   private:
    const CurveDiagram* d_ = nullptr;
    std::uint64_t mask_ = 0;
  };

  ResolutionRange(const CurveDiagram& d, std::uint64_t count) : d_(&d), count_(count) {}
  iterator begin() const { return {d_, 0}; }
  iterator end() const { return {d_, count_}; }
  std::uint64_t size() const { return count_; }

 private:
  const CurveDiagram* d_;
  std::uint64_t count_;
};

/// Throws ResourceError when the diagram has more than `cap` crossings.
ResolutionRange enumerate_resolutions(const CurveDiagram& d, int cap = kDefaultCrossingCap);

/// The standard m-layer spiral diagram with m-1 crossings and its m-loop resolution.
std::pair<CurveDiagram, Resolution> canonical_perturbed_m_gamma(int m);

/// Parses a signed Gauss code such as "O1+U1+". Over/under letters are
/// accepted and ignored; the sign selects the rotation at the crossing
/// ('+' when the second pass crosses the first from right to left).
/// Components are separated by ';' or whitespace.
CurveDiagram from_gauss_code(std::string_view code, double arc_length = 1.0);

/// Builds a diagram from per-component crossing passes. Each pass names a
/// crossing and whether it is that crossing's first or second pass together
/// with the rotation sign. Shared by the Gauss importer and the geometry layer.
struct CrossingPass {
  CrossingId crossing = 0;
  bool second = false;
  bool positive = true;  // second pass direction lies counterclockwise of the first
};
CurveDiagram build_from_passes(const std::vector<std::vector<CrossingPass>>& components,
                               const std::vector<std::vector<double>>& arc_lengths);

/// Orientation- and direction-preserving isomorphism between two diagrams,
/// ignoring ids and lengths.
struct DiagramMorphism {
  std::map<CrossingId, CrossingId> crossings;
  std::map<ArcId, ArcId> arcs;
};

/// Finds an isomorphism a -> b. When `hint` is given, an isomorphism agreeing
/// with every hinted crossing pair is preferred.
std::optional<DiagramMorphism> find_isomorphism(
    const CurveDiagram& a, const CurveDiagram& b,
    const std::map<CrossingId, CrossingId>* hint = nullptr);

}  // namespace curvesplit
