#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"

namespace curvesplit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFeatureSize = 0.25;
constexpr int kSamplesPerTurn = 96;
constexpr double kFingerWidth = 0.25;  // half-width in radians
constexpr double kFingerPeak = 1.6;    // in layer spacings

struct Spiral {
  int m = 0;
  double eps = 0.0;

  double spacing() const { return eps / m; }
  double radius(double phi) const { return 1.0 + eps * phi / (kTwoPi * m); }
};

double finger_profile(double phi) {
  const double x = (phi - std::numbers::pi) / kFingerWidth;
  if (std::abs(x) >= 1.0) return 0.0;
  const double c = std::cos(std::numbers::pi * x / 2);
  return c * c;
}

// The spiral r = 1 + eps * phi / (2 pi m), phi in (0, 2 pi m), closed by the
// straight segment from its outer end back to its start.
Polyline spiral(const Spiral& s, double finger) {
  std::vector<double> phis;
  const int total = kSamplesPerTurn * s.m;
  for (int k = 0; k < total; ++k) phis.push_back(kTwoPi * s.m * (k + 0.5) / total);
  if (finger > 0) {
    for (int k = -39; k <= 39; k += 2) {
      phis.push_back(std::numbers::pi + kFingerWidth * k / 40.0);
    }
    std::sort(phis.begin(), phis.end());
    phis.erase(std::unique(phis.begin(), phis.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               phis.end());
  }
  Polyline p;
  for (double phi : phis) {
    double r = s.radius(phi);
    if (phi < kTwoPi) r += finger * finger_profile(phi);
    p.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  return p;
}

// The innermost kink: vertices 0..seg of the curve plus the crossing where the
// spiral meets the closing segment.
struct Kink {
  int last_vertex = 0;
  Vec2 point;
};

Kink innermost_kink(const Polyline& p, double tol) {
  const auto xs = self_intersections(p, tol);
  if (xs.empty()) throw InvariantViolation("no kink left to remove");
  const auto it = std::min_element(xs.begin(), xs.end(), [](const auto& a, const auto& b) {
    return a.first < b.first;
  });
  return {it->first.seg, it->point};
}

Polyline shrink_kink(const Polyline& p, const Kink& k, double s) {
  Polyline out = p;
  for (int i = 0; i <= k.last_vertex; ++i) {
    auto& v = out[static_cast<std::size_t>(i)];
    v = k.point + s * (v - k.point);
  }
  return out;
}

Polyline remove_kink(const Polyline& p, const Kink& k) {
  Polyline out{k.point};
  out.insert(out.end(), p.begin() + k.last_vertex + 1, p.end());
  return out;
}

}  // namespace

double layer_offset(int m, double bound) {
  if (m < 2) throw DomainError("m must be at least 2, got " + std::to_string(m));
  const double base = kTwoPi * m;
  if (!(bound > base)) {
    throw BoundError("bound " + std::to_string(bound) + " does not exceed the length " +
                         std::to_string(base) + " of the " + std::to_string(m) + "-fold circle",
                     0);
  }
  return std::min(kFeatureSize, (bound - base) / (4.0 * m));
}

GeneratedHomotopy generate_contraction(int m, double bound, int steps, bool finger) {
  const Spiral s{m, layer_offset(m, bound)};
  if (s.spacing() < 20 * kDefaultTolerance) {
    throw BoundError("bound " + std::to_string(bound) +
                         " leaves too little room to separate the layers",
                     0);
  }
  const int phases = (finger ? 1 : 0) + (m - 1) + 1;
  const int per = steps / phases;
  if (per < 4) {
    throw DomainError(std::to_string(steps) + " steps are too few for m = " + std::to_string(m) +
                      "; need at least " + std::to_string(4 * phases));
  }

  GeneratedHomotopy out;
  out.m = m;
  out.bound = bound;
  auto emit = [&](Polyline p) {
    const double t = static_cast<double>(out.frames.size()) / steps;
    out.frames.push_back(PolylineFrame{t, {std::move(p)}});
  };
  Polyline base = spiral(s, 0.0);
  emit(base);

  if (finger) {
    // Push a finger of the innermost turn across the next one and pull it back.
    const double low = 0.8 * s.spacing();
    const double high = 1.25 * s.spacing();
    const Vec2 where{-s.radius(3 * std::numbers::pi), 0.0};
    bool crossed = false;
    for (int j = 1; j <= per; ++j) {
      double a = kFingerPeak * s.spacing() * std::sin(std::numbers::pi * j / per);
      if (j == per) a = 0.0;
      if (a > low && a < high) a = a < s.spacing() ? low : high;
      const bool now = a >= high;
      if (now != crossed) {
        out.events.push_back({now ? MoveKind::R2Birth : MoveKind::R2Death,
                              static_cast<int>(out.frames.size()), where});
        crossed = now;
      }
      emit(a > 0 ? spiral(s, a) : base);
    }
  }

  Polyline cur = base;
  for (int k = 0; k + 1 < m; ++k) {
    const Kink kink = innermost_kink(cur, kDefaultTolerance);
    for (int j = 1; j < per; ++j) {
      emit(shrink_kink(cur, kink, 1.0 - static_cast<double>(j) / per));
    }
    cur = remove_kink(cur, kink);
    out.events.push_back({MoveKind::R1Death, static_cast<int>(out.frames.size()), kink.point});
    emit(cur);
  }

  const int rest = steps - static_cast<int>(out.frames.size()) + 1;
  for (int j = 1; j <= rest; ++j) {
    const double f = 1.0 - 0.9 * j / rest;
    Polyline p = cur;
    for (auto& v : p) v = f * v;
    emit(std::move(p));
  }

  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    const double len = out.frames[i].total_length();
    if (!(len < bound)) {
      throw BoundError("frame " + std::to_string(i) + " has length " + std::to_string(len) +
                           ", not below " + std::to_string(bound),
                       static_cast<int>(i));
    }
  }
  return out;
}

}  // namespace curvesplit
