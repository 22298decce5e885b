#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "curvesplit/diagram.hpp"
#include "curvesplit/moves.hpp"
#include "curvesplit/resgraph.hpp"

namespace curvesplit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Closed polyline; the last vertex connects back to the first.
using Polyline = std::vector<Vec2>;

double polyline_length(const Polyline& p, bool closed = true);

struct PolylineFrame {
  double t = 0.0;
  std::vector<Polyline> curves;

  double total_length() const;
  friend bool operator==(const PolylineFrame&, const PolylineFrame&) = default;
};

/// A point on a frame: curve index and position `seg + t` along it.
struct CurvePoint {
  int curve = 0;
  int seg = 0;
  double t = 0.0;

  double param() const { return seg + t; }
  friend auto operator<=>(const CurvePoint&, const CurvePoint&) = default;
};

/// A transverse double point. `first` precedes `second` in traversal order
/// (curve index, then position).
struct Intersection {
  Vec2 point;
  CurvePoint first;
  CurvePoint second;
  bool positive = true;  // second pass crosses the first from right to left
};

inline constexpr double kDefaultTolerance = 1e-3;

/// All transverse double points, sorted by `first`. Tangential or near-parallel
/// crossings (|sin angle| < tol), intersections through a polyline vertex,
/// overlapping segments and double points closer than tol raise GenericityError.
std::vector<Intersection> frame_intersections(const PolylineFrame& f,
                                              double tol = kDefaultTolerance);
std::vector<Intersection> self_intersections(const Polyline& p, double tol = kDefaultTolerance);

/// Span of one diagram arc on the frame, from one pass to the next.
struct ArcSpan {
  int curve = 0;
  double from = 0.0;  // curve parameter
  double to = 0.0;    // may wrap past the curve's end
  double length = 0.0;
};

struct FrameDiagram {
  CurveDiagram diagram;
  std::vector<Intersection> crossings;  // indexed by crossing id
  std::map<ArcId, ArcSpan> arcs;
};

/// Crossings are numbered in traversal order of their first pass; arcs run
/// from pass to pass with measured lengths.
FrameDiagram diagram_from_frame(const PolylineFrame& f, double tol = kDefaultTolerance);

/// Cuts a ball of `radius` around the crossing and reconnects the four exit
/// points with straight chords as the smoothing `choice` does in the diagram
/// built by diagram_from_frame. Throws RadiusError when the ball meets a third
/// strand or another crossing.
std::vector<Polyline> geometric_smooth(const std::vector<Polyline>& curves,
                                       const Intersection& x, double radius, Smoothing choice);

/// Smooths every crossing of the frame by `mask` (bit i: crossing i of
/// diagram_from_frame), using the given radius.
std::vector<Polyline> smooth_frame(const PolylineFrame& f, std::uint64_t mask, double radius,
                                   double tol = kDefaultTolerance);

struct PlantedEvent {
  MoveKind kind = MoveKind::R1Death;
  int frame = 0;  // first frame after the event
  Vec2 point;

  friend bool operator==(const PlantedEvent&, const PlantedEvent&) = default;
};

struct GeneratedHomotopy {
  std::vector<PolylineFrame> frames;
  std::vector<PlantedEvent> events;
  double bound = 0.0;
  int m = 0;
};

/// Frames contracting the perturbed m-fold circle: an optional finger move
/// (R2 birth and death), then the innermost kink shrinks and dies m-1 times,
/// then the remaining circle shrinks.
GeneratedHomotopy generate_contraction(int m, double bound, int steps, bool finger = true);

/// Offset between layers of the generated spiral.
double layer_offset(int m, double bound);

/// Infers one move between consecutive frames. The result has measured arc
/// lengths and frame provenance on every event.
HomotopyScript detect_events(const std::vector<PolylineFrame>& frames,
                             std::optional<double> bound, double tol = kDefaultTolerance);

struct SvgOptions {
  double size = 480.0;
  bool show_crossings = true;
  double tol = kDefaultTolerance;
};

std::string render_svg(const std::vector<Polyline>& curves, const SvgOptions& options = {});

}  // namespace curvesplit
