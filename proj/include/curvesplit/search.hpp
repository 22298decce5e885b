#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curvesplit/resgraph.hpp"

namespace curvesplit {

enum class VertexCase { Case1, Case2, Case3, Even, Start };

std::string_view to_string(VertexCase c);

/// A resolution whose local picture at a move has a closed circle and no
/// linked partner.
struct CircleEvidence {
  int event = 0;  // 0-based
  Side side = Side::Before;
  std::uint32_t choice = 0;
  ArcId loop = 0;  // id of the global loop formed by the circle
  std::vector<ArcId> arcs;

  friend bool operator==(const CircleEvidence&, const CircleEvidence&) = default;
};

struct Classification {
  VertexCase kind = VertexCase::Even;
  std::optional<CircleEvidence> evidence;
};

/// Cases follow the parity argument: odd vertices at level 0 other than v*
/// (Case1), at the last level (Case2), or in between (Case3, with evidence).
/// v* itself is Start when odd and Even (with evidence when available) otherwise.
Classification classify_vertex(const Timeline& t, const ResolutionGraph& g, const Vertex& w);

/// Zero-partner circle evidence for `v` at an adjacent event, if any.
std::optional<CircleEvidence> circle_evidence(const Timeline& t, const Vertex& v);

/// Loop ids of the resolution at `v`, mapped across an edge to loop ids at the other end.
std::vector<std::pair<ArcId, ArcId>> loop_bijection(const Timeline& t, const Edge& e,
                                                    const Vertex& from);

enum class TerminalKind { DiscContraction, LocalCircle };

std::string_view to_string(TerminalKind k);

struct PathStep {
  Vertex vertex;
  ArcId curve = 0;

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

struct PathEdge {
  int event = 0;  // 0-based
  int pair = 0;
  std::vector<std::pair<ArcId, ArcId>> bijection;  // loops of step i -> loops of step i+1

  friend bool operator==(const PathEdge&, const PathEdge&) = default;
};

struct Terminal {
  TerminalKind kind = TerminalKind::DiscContraction;
  VertexCase vertex_case = VertexCase::Case2;
  bool degenerate = false;  // v* itself has even degree
  bool terminal_disc = false;
  std::optional<CircleEvidence> evidence;

  friend bool operator==(const Terminal&, const Terminal&) = default;
};

inline constexpr int kCertificateSchemaVersion = 1;

struct Certificate {
  int schema_version = kCertificateSchemaVersion;
  int m = 0;
  std::vector<PathStep> path;   // path[0] is v*
  std::vector<PathEdge> edges;  // edges[i] joins path[i] and path[i+1]
  Terminal terminal;
  double length_audit = 0.0;  // longest slice visited by the path
  std::optional<double> bound;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Breadth-first search from v* to the nearest odd vertex, ties broken by
/// level and then by resolution bits.
Certificate find_certificate(const Timeline& t, int m, int cap = kDefaultCrossingCap);
Certificate find_certificate(const HomotopyScript& script, int cap = kDefaultCrossingCap);

struct VerificationFailure {
  std::string code;
  std::string message;
};

struct VerificationReport {
  std::vector<VerificationFailure> failures;

  bool accepted() const { return failures.empty(); }
};

/// Rechecks every path edge, bijection, loop count, length and the terminal
/// evidence against the script. Never throws for malformed certificates.
VerificationReport verify_certificate(const HomotopyScript& script, const Certificate& cert);

}  // namespace curvesplit
