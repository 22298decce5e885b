#include "curvesplit/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "curvesplit/errors.hpp"

namespace curvesplit {

double polyline_length(const Polyline& p, bool closed) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) total += norm(p[i + 1] - p[i]);
  if (closed && p.size() > 1) total += norm(p.front() - p.back());
  return total;
}

double PolylineFrame::total_length() const {
  double total = 0.0;
  for (const auto& c : curves) total += polyline_length(c);
  return total;
}

namespace {

std::string seg_name(int curve, int seg) {
  return "curve " + std::to_string(curve) + " segment " + std::to_string(seg);
}

struct Seg {
  int curve;
  int index;
  Vec2 a;
  Vec2 b;
  double xmin, xmax, ymin, ymax;
};

std::vector<Seg> segments_of(const PolylineFrame& f, double tol) {
  std::vector<Seg> out;
  for (std::size_t c = 0; c < f.curves.size(); ++c) {
    const auto& p = f.curves[c];
    const int n = static_cast<int>(p.size());
    if (n < 3) {
      throw GenericityError("curve " + std::to_string(c) + " has fewer than 3 vertices");
    }
    for (int i = 0; i < n; ++i) {
      const Vec2 a = p[static_cast<std::size_t>(i)];
      const Vec2 b = p[static_cast<std::size_t>((i + 1) % n)];
      if (a == b) {
        throw GenericityError(seg_name(static_cast<int>(c), i) + " has repeated endpoints");
      }
      out.push_back({static_cast<int>(c), i, a, b, std::min(a.x, b.x), std::max(a.x, b.x),
                     std::min(a.y, b.y), std::max(a.y, b.y)});
    }
    // Fold-back: consecutive segments doubling back on each other.
    for (int i = 0; i < n; ++i) {
      const Vec2 v = p[static_cast<std::size_t>(i)];
      const Vec2 r1 = v - p[static_cast<std::size_t>((i + n - 1) % n)];
      const Vec2 r2 = p[static_cast<std::size_t>((i + 1) % n)] - v;
      if (std::abs(cross(r1, r2)) < tol * norm(r1) * norm(r2) && dot(r1, r2) < 0) {
        throw GenericityError(seg_name(static_cast<int>(c), (i + n - 1) % n) + " folds back onto " +
                              seg_name(static_cast<int>(c), i));
      }
    }
  }
  return out;
}

bool adjacent(const Seg& s, const Seg& t, const PolylineFrame& f) {
  if (s.curve != t.curve) return false;
  const int n = static_cast<int>(f.curves[static_cast<std::size_t>(s.curve)].size());
  return (s.index + 1) % n == t.index || (t.index + 1) % n == s.index;
}

}  // namespace

std::vector<Intersection> frame_intersections(const PolylineFrame& f, double tol) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  const auto segs = segments_of(f, tol);
  std::vector<Intersection> out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Seg& s = segs[i];
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const Seg& t = segs[j];
      if (s.xmax < t.xmin || t.xmax < s.xmin || s.ymax < t.ymin || t.ymax < s.ymin) continue;
      if (adjacent(s, t, f)) continue;
      const Vec2 r = s.b - s.a;
      const Vec2 q = t.b - t.a;
      const double o1 = cross(r, t.a - s.a);
      const double o2 = cross(r, t.b - s.a);
      const double o3 = cross(q, s.a - t.a);
      const double o4 = cross(q, s.b - t.a);
      const double scale = norm(r) * norm(q);
      const double eps = 1e-12 * scale;
      const bool touch = (std::abs(o1) <= eps || std::abs(o2) <= eps || std::abs(o3) <= eps ||
                          std::abs(o4) <= eps);
      const bool straddle_t = (o1 < 0) != (o2 < 0);
      const bool straddle_s = (o3 < 0) != (o4 < 0);
      if (touch) {
        // Collinear overlap or a vertex lying on the other segment.
        auto on = [&](Vec2 p, Vec2 a, Vec2 b) {
          const Vec2 d = b - a;
          return std::abs(cross(d, p - a)) <= 1e-12 * norm(d) * std::max(norm(p - a), 1e-300) &&
                 dot(p - a, p - b) <= 0;
        };
        if (on(t.a, s.a, s.b) || on(t.b, s.a, s.b) || on(s.a, t.a, t.b) || on(s.b, t.a, t.b)) {
          throw GenericityError(seg_name(s.curve, s.index) + " and " + seg_name(t.curve, t.index) +
                                " meet at a vertex or overlap");
        }
        continue;
      }
      if (!straddle_t || !straddle_s) continue;
      const double denom = cross(r, q);
      if (std::abs(denom) < tol * scale) {
        throw GenericityError(seg_name(s.curve, s.index) + " and " + seg_name(t.curve, t.index) +
                              " cross tangentially");
      }
      const double ts = cross(t.a - s.a, q) / denom;
      const double tt = cross(t.a - s.a, r) / denom;
      Intersection x;
      x.point = s.a + ts * r;
      CurvePoint ps{s.curve, s.index, ts};
      CurvePoint pt{t.curve, t.index, tt};
      Vec2 d1 = r;
      Vec2 d2 = q;
      if (pt < ps) {
        std::swap(ps, pt);
        std::swap(d1, d2);
      }
      x.first = ps;
      x.second = pt;
      x.positive = cross(d1, d2) > 0;
      out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Intersection& a, const Intersection& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (norm(out[i].point - out[j].point) < tol) {
        std::ostringstream msg;
        msg << "double points on " << seg_name(out[i].first.curve, out[i].first.seg) << " and "
            << seg_name(out[j].first.curve, out[j].first.seg) << " are closer than " << tol;
        throw GenericityError(msg.str());
      }
    }
  }
  return out;
}

std::vector<Intersection> self_intersections(const Polyline& p, double tol) {
  return frame_intersections(PolylineFrame{0.0, {p}}, tol);
}

namespace {

std::vector<double> cumulative(const Polyline& p) {
  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    cum.push_back(cum.back() + norm(p[(i + 1) % p.size()] - p[i]));
  }
  return cum;
}

}  // namespace

FrameDiagram diagram_from_frame(const PolylineFrame& f, double tol) {
  FrameDiagram out;
  out.crossings = frame_intersections(f, tol);

  struct Pass {
    double pos;
    CrossingPass pass;
  };
  std::vector<std::vector<Pass>> passes(f.curves.size());
  std::vector<std::vector<double>> cum;
  for (const auto& c : f.curves) cum.push_back(cumulative(c));
  auto pos = [&](const CurvePoint& p) {
    const auto& cc = cum[static_cast<std::size_t>(p.curve)];
    const auto s = static_cast<std::size_t>(p.seg);
    return cc[s] + p.t * (cc[s + 1] - cc[s]);
  };
  for (std::size_t i = 0; i < out.crossings.size(); ++i) {
    const auto& x = out.crossings[i];
    const auto id = static_cast<CrossingId>(i);
    passes[static_cast<std::size_t>(x.first.curve)].push_back({pos(x.first), {id, false, x.positive}});
    passes[static_cast<std::size_t>(x.second.curve)].push_back(
        {pos(x.second), {id, true, x.positive}});
  }

  std::vector<std::vector<CrossingPass>> components;
  std::vector<std::vector<double>> lengths;
  ArcId next = 0;
  for (std::size_t c = 0; c < f.curves.size(); ++c) {
    auto& ps = passes[c];
    std::sort(ps.begin(), ps.end(), [](const Pass& a, const Pass& b) { return a.pos < b.pos; });
    const double total = cum[c].back();
    std::vector<CrossingPass> comp;
    std::vector<double> lens;
    if (ps.empty()) {
      lens.push_back(total);
      out.arcs[next++] = ArcSpan{static_cast<int>(c), 0.0, total, total};
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      comp.push_back(ps[i].pass);
      const double from = ps[i].pos;
      double to = ps[(i + 1) % ps.size()].pos;
      if (to <= from) to += total;
      lens.push_back(to - from);
      out.arcs[next++] = ArcSpan{static_cast<int>(c), from, to, to - from};
    }
    components.push_back(std::move(comp));
    lengths.push_back(std::move(lens));
  }
  out.diagram = build_from_passes(components, lengths);
  out.diagram.set_genus(0);
  return out;
}

namespace {

struct Exit {
  double param = 0.0;  // seg + t
  Vec2 point;
};

// First parameter along the curve (forward or backward from `from`) where it
// leaves the disc around `c`. Records the segments walked.
Exit exit_from(const Polyline& p, const CurvePoint& from, Vec2 c, double r, bool forward,
               std::vector<int>& walked) {
  const int n = static_cast<int>(p.size());
  int seg = from.seg;
  double t0 = from.t;
  for (int step = 0; step <= n; ++step) {
    walked.push_back(seg);
    const Vec2 a = p[static_cast<std::size_t>(seg)];
    const Vec2 b = p[static_cast<std::size_t>((seg + 1) % n)];
    // Solve |a + u (b - a) - c| = r for the first u past t0 in the walking direction.
    const Vec2 d = b - a;
    const Vec2 w = a - c;
    const double qa = dot(d, d);
    const double qb = 2 * dot(w, d);
    const double qc = dot(w, w) - r * r;
    const double disc = qb * qb - 4 * qa * qc;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      const double u1 = (-qb - sq) / (2 * qa);
      const double u2 = (-qb + sq) / (2 * qa);
      if (forward) {
        for (double u : {u1, u2}) {
          if (u > t0 && u <= 1.0 && dot(w + u * d, d) > 0) return {seg + u, a + u * d};
        }
      } else {
        for (double u : {u2, u1}) {
          if (u < t0 && u >= 0.0 && dot(w + u * d, d) < 0) return {seg + u, a + u * d};
        }
      }
    }
    if (forward) {
      seg = (seg + 1) % n;
      t0 = 0.0;
    } else {
      seg = (seg + n - 1) % n;
      t0 = 1.0;
    }
  }
  throw RadiusError("radius " + std::to_string(r) + " contains a whole curve");
}

double seg_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double u = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
  return norm(a + u * d - p);
}

struct Cut {
  double start = 0.0;  // back exit
  double end = 0.0;    // forward exit
  Vec2 start_point;
  Vec2 end_point;
  int crossing = 0;
  int back_slot = 0;
  int fwd_slot = 0;
};

struct Piece {
  std::vector<Vec2> points;
  std::pair<int, int> start;  // (crossing, slot)
  std::pair<int, int> end;
};

// Vertices strictly between parameters a and b going forward, bracketed by the points.
std::vector<Vec2> extract(const Polyline& p, double a, Vec2 pa, double b, Vec2 pb) {
  const int n = static_cast<int>(p.size());
  auto fwd = [&](double from, double to) { return std::fmod(to - from + 2.0 * n, n); };
  const double span = fwd(a, b);
  std::vector<Vec2> out{pa};
  int j = static_cast<int>(std::floor(a)) + 1;
  for (int k = 0; k <= n; ++k, ++j) {
    const double dj = fwd(a, j);
    if (dj >= span || (k > 0 && dj == 0.0)) break;
    const Vec2 v = p[static_cast<std::size_t>(j % n)];
    if (!(v == out.back())) out.push_back(v);
  }
  if (!(pb == out.back())) out.push_back(pb);
  return out;
}

std::vector<Polyline> surgery(const std::vector<Polyline>& curves,
                              const std::vector<std::pair<Intersection, Smoothing>>& sites,
                              double radius) {
  if (!(radius > 0)) throw RadiusError("radius must be positive");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (norm(sites[i].first.point - sites[j].first.point) <= 2 * radius) {
        throw RadiusError("balls of radius " + std::to_string(radius) + " around two crossings overlap");
      }
    }
  }
  std::vector<std::vector<Cut>> cuts(curves.size());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Intersection& x = sites[k].first;
    std::set<std::pair<int, int>> covered;
    std::array<int, 2> fwd_slots{0, x.positive ? 1 : 3};
    std::array<int, 2> back_slots{2, x.positive ? 3 : 1};
    std::array<CurvePoint, 2> passes{x.first, x.second};
    for (int s = 0; s < 2; ++s) {
      const CurvePoint cp = passes[static_cast<std::size_t>(s)];
      if (cp.curve < 0 || static_cast<std::size_t>(cp.curve) >= curves.size()) {
        throw DomainError("intersection refers to a missing curve");
      }
      const Polyline& p = curves[static_cast<std::size_t>(cp.curve)];
      std::vector<int> walked;
      const Exit f = exit_from(p, cp, x.point, radius, true, walked);
      const Exit b = exit_from(p, cp, x.point, radius, false, walked);
      for (int seg : walked) {
        if (!covered.insert({cp.curve, seg}).second && seg != cp.seg) {
          throw RadiusError("ball of radius " + std::to_string(radius) + " meets " +
                            seg_name(cp.curve, seg) + " twice");
        }
      }
      cuts[static_cast<std::size_t>(cp.curve)].push_back(
          {b.param, f.param, b.point, f.point, static_cast<int>(k),
           back_slots[static_cast<std::size_t>(s)], fwd_slots[static_cast<std::size_t>(s)]});
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
      const auto& p = curves[c];
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (covered.contains({static_cast<int>(c), static_cast<int>(i)})) continue;
        if (seg_distance(x.point, p[i], p[(i + 1) % p.size()]) < radius) {
          throw RadiusError("ball of radius " + std::to_string(radius) + " around crossing meets " +
                            seg_name(static_cast<int>(c), static_cast<int>(i)));
        }
      }
    }
  }

  std::vector<Piece> pieces;
  std::vector<int> first_piece(curves.size(), -1);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    auto& cs = cuts[c];
    if (cs.empty()) continue;
    std::sort(cs.begin(), cs.end(), [](const Cut& a, const Cut& b) { return a.start < b.start; });
    first_piece[c] = static_cast<int>(pieces.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Cut& from = cs[i];
      const Cut& to = cs[(i + 1) % cs.size()];
      Piece piece;
      piece.points = extract(curves[c], from.end, from.end_point, to.start, to.start_point);
      piece.start = {from.crossing, from.fwd_slot};
      piece.end = {to.crossing, to.back_slot};
      pieces.push_back(std::move(piece));
    }
  }
  std::map<std::pair<int, int>, std::pair<int, bool>> endpoint;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    endpoint[pieces[i].start] = {static_cast<int>(i), true};
    endpoint[pieces[i].end] = {static_cast<int>(i), false};
  }

  std::vector<Polyline> out;
  std::vector<bool> used(pieces.size(), false);
  auto trace = [&](int start) {
    Polyline poly;
    int cur = start;
    bool forward = true;
    while (!used[static_cast<std::size_t>(cur)]) {
      used[static_cast<std::size_t>(cur)] = true;
      const Piece& pc = pieces[static_cast<std::size_t>(cur)];
      auto append = [&](Vec2 v) {
        if (poly.empty() || !(poly.back() == v)) poly.push_back(v);
      };
      if (forward) {
        for (Vec2 v : pc.points) append(v);
      } else {
        for (auto it = pc.points.rbegin(); it != pc.points.rend(); ++it) append(*it);
      }
      const auto e = forward ? pc.end : pc.start;
      const auto choice = sites[static_cast<std::size_t>(e.first)].second;
      const auto [next, is_start] = endpoint.at({e.first, smoothing_partner(e.second, choice)});
      cur = next;
      forward = is_start;
    }
    while (poly.size() > 1 && poly.back() == poly.front()) poly.pop_back();
    out.push_back(std::move(poly));
  };
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (first_piece[c] < 0) {
      out.push_back(curves[c]);
      continue;
    }
    for (std::size_t i = static_cast<std::size_t>(first_piece[c]); i < pieces.size(); ++i) {
      if (!used[i]) trace(static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace

std::vector<Polyline> geometric_smooth(const std::vector<Polyline>& curves, const Intersection& x,
                                       double radius, Smoothing choice) {
  return surgery(curves, {{x, choice}}, radius);
}

std::vector<Polyline> smooth_frame(const PolylineFrame& f, std::uint64_t mask, double radius,
                                   double tol) {
  const auto xs = frame_intersections(f, tol);
  std::vector<std::pair<Intersection, Smoothing>> sites;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sites.emplace_back(xs[i], ((mask >> i) & 1u) ? Smoothing::B : Smoothing::A);
  }
  return surgery(f.curves, sites, radius);
}

}  // namespace curvesplit
