#include <cmath>
#include <numbers>
#include <random>

#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"
#include "curvesplit/resgraph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvesplit;

namespace {

Polyline figure_eight(int n = 40, double scale = 1.0) {
  Polyline p;
  for (int k = 0; k < n; ++k) {
    const double th = 2 * std::numbers::pi * (k + 0.5) / n;
    p.push_back({scale * std::sin(th), scale * std::sin(th) * std::cos(th)});
  }
  return p;
}

Polyline regular(int k, double r, Vec2 c = {}) {
  Polyline p;
  for (int i = 0; i < k; ++i) {
    const double th = 2 * std::numbers::pi * i / k;
    p.push_back({c.x + r * std::cos(th), c.y + r * std::sin(th)});
  }
  return p;
}

double total(const std::vector<Polyline>& cs) {
  double s = 0;
  for (const auto& c : cs) s += polyline_length(c);
  return s;
}

}  // namespace

TEST_CASE("polyline length") {
  const Polyline square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polyline_length(square) == doctest::Approx(4.0));
  CHECK(polyline_length(square, false) == doctest::Approx(3.0));
  for (int k : {3, 7, 64}) {
    CHECK(polyline_length(regular(k, 2.5)) ==
          doctest::Approx(k * 2 * 2.5 * std::sin(std::numbers::pi / k)));
  }
  const Polyline a{{0, 0}, {1, 0}, {1, 2}};
  const Polyline b{{1, 2}, {-3, 2}};
  Polyline ab = a;
  ab.push_back(b.back());
  CHECK(polyline_length(ab, false) ==
        doctest::Approx(polyline_length(a, false) + polyline_length(b, false)));
}

TEST_CASE("self intersections") {
  CHECK(self_intersections(regular(12, 1.0)).empty());
  const auto xs = self_intersections(figure_eight());
  REQUIRE(xs.size() == 1);
  CHECK(norm(xs[0].point) < 1e-9);
  CHECK(xs[0].first < xs[0].second);

  // Two nearly parallel segments crossing at a tiny angle.
  const PolylineFrame shallow{0.0, {{{0, 0}, {10, 0}, {5, 5}}, {{0, -0.002}, {10, 0.002}, {5, -5}}}};
  CHECK_THROWS_AS(frame_intersections(shallow), GenericityError);
  // A vertex lying on another segment.
  const Polyline touch{{0, 0}, {2, 0}, {2, 2}, {1, 0}, {0, 2}};
  CHECK_THROWS_AS(self_intersections(touch), GenericityError);
  const Polyline repeated{{0, 0}, {1, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(self_intersections(repeated), GenericityError);
  const Polyline fold{{0, 0}, {2, 0}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(self_intersections(fold), GenericityError);
  try {
    (void)frame_intersections(shallow);
  } catch (const GenericityError& e) {
    CHECK(std::string(e.what()).find("segment") != std::string::npos);
  }
}

TEST_CASE("frame diagram of a figure-eight") {
  const auto fd = diagram_from_frame({0.0, {figure_eight()}});
  CHECK(fd.diagram.crossing_count() == 1);
  CHECK(validate(fd.diagram).empty());
  CHECK(fd.diagram.total_length() == doctest::Approx(polyline_length(figure_eight())));
  CHECK(count_loops_mask(fd.diagram, 0) + count_loops_mask(fd.diagram, 1) == 3);

  const auto two = diagram_from_frame({0.0, {regular(8, 1.0), regular(8, 1.0, {1.2, 0.1})}});
  CHECK(two.diagram.crossing_count() == 2);
  CHECK(two.diagram.components().size() == 2);
  CHECK(validate(two.diagram).empty());
}

TEST_CASE("smoothing a figure-eight") {
  const auto p = figure_eight();
  const auto xs = self_intersections(p);
  const double before = polyline_length(p);
  const auto fd = diagram_from_frame({0.0, {p}});
  for (Smoothing s : {Smoothing::A, Smoothing::B}) {
    const auto out = geometric_smooth({p}, xs[0], 0.1, s);
    CHECK(static_cast<int>(out.size()) == count_loops_mask(fd.diagram, s == Smoothing::B ? 1 : 0));
    CHECK(total(out) <= before);
    const auto fx = frame_intersections({0.0, out});
    CHECK(fx.empty());
  }
  CHECK_THROWS_AS(geometric_smooth({p}, xs[0], 1.5, Smoothing::A), RadiusError);
  CHECK_THROWS_AS(geometric_smooth({p, regular(6, 0.05, {0.02, 0.0})}, xs[0], 0.1, Smoothing::A),
                  RadiusError);
}

TEST_CASE("frame smoothing matches combinatorial loop counts") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 60; ++trial) {
    Polyline p;
    for (int i = 0; i < 7; ++i) p.push_back({u(rng), u(rng)});
    PolylineFrame f{0.0, {p}};
    std::optional<FrameDiagram> fd;
    try {
      fd = diagram_from_frame(f);
    } catch (const GenericityError&) {
      continue;
    }
    const int n = fd->diagram.crossing_count();
    if (n == 0 || n > 8) continue;
    double gap = 1.0;
    for (std::size_t i = 0; i < fd->crossings.size(); ++i) {
      for (std::size_t j = i + 1; j < fd->crossings.size(); ++j) {
        gap = std::min(gap, norm(fd->crossings[i].point - fd->crossings[j].point));
      }
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      double r = gap / 3;
      std::vector<Polyline> out;
      for (int tries = 0; tries < 30 && out.empty(); ++tries, r /= 2) {
        try {
          out = smooth_frame(f, mask, r);
        } catch (const RadiusError&) {
        }
      }
      REQUIRE(!out.empty());
      CHECK(static_cast<int>(out.size()) == oracle::loop_count(fd->diagram, mask));
      CHECK(total(out) <= f.total_length() * (1 + 1e-9));
    }
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("generated contraction frames") {
  for (int m = 2; m <= 6; ++m) {
    CAPTURE(m);
    const double bound = 2 * std::numbers::pi * m + 3.0;
    const auto g = generate_contraction(m, bound, 60);
    REQUIRE(g.frames.size() == 61);
    CHECK(g.frames.front().t == 0.0);
    CHECK(g.frames.back().t == 1.0);
    CHECK(static_cast<int>(self_intersections(g.frames[0].curves[0]).size()) == m - 1);
    const auto first = diagram_from_frame(g.frames[0]);
    CHECK(find_isomorphism(first.diagram, canonical_perturbed_m_gamma(m).first).has_value());
    CHECK(frame_intersections(g.frames.back()).empty());
    int prev = m - 1;
    for (const auto& f : g.frames) {
      CHECK(f.total_length() < bound);
      const int n = static_cast<int>(frame_intersections(f).size());
      CHECK(std::abs(n - prev) <= 2);
      prev = n;
    }
    CHECK(g.events.size() == static_cast<std::size_t>(m + 1));
  }
  CHECK_THROWS_AS(generate_contraction(3, 6 * std::numbers::pi, 100), BoundError);
  CHECK_THROWS_AS(generate_contraction(3, 19.0, 100), BoundError);
  CHECK_THROWS_AS(generate_contraction(3, 100.0, 10), DomainError);
  CHECK_THROWS_AS(generate_contraction(1, 100.0, 100), DomainError);
}

TEST_CASE("layer offset") {
  CHECK(layer_offset(2, 100.0) == 0.25);
  CHECK(layer_offset(3, 6 * std::numbers::pi + 1.2) == doctest::Approx(0.1));
}

TEST_CASE("detection recovers the planted events") {
  for (int m = 2; m <= 6; ++m) {
    for (int steps : {50, 200}) {
      CAPTURE(m);
      CAPTURE(steps);
      const auto g = generate_contraction(m, 100.0, steps);
      const auto script = detect_events(g.frames, g.bound);
      REQUIRE(script.events.size() == g.events.size());
      for (std::size_t i = 0; i < g.events.size(); ++i) {
        CHECK(script.events[i].kind == g.events[i].kind);
        REQUIRE(script.events[i].provenance.has_value());
        CHECK(script.events[i].provenance->frame == g.events[i].frame);
        const Vec2 p{script.events[i].provenance->x, script.events[i].provenance->y};
        CHECK(norm(p - g.events[i].point) < 0.05);
      }
      CHECK(script.terminal_disc);
      CHECK(script.bound == g.bound);
      const auto t = resolve_script(script);
      for (std::size_t i = 0; i < t.slices.size(); ++i) {
        const int frame = i == 0 ? 0 : script.events[i - 1].provenance->frame;
        CHECK(t.slices[i].total_length() ==
              doctest::Approx(g.frames[static_cast<std::size_t>(frame)].total_length()));
      }
    }
  }
}

TEST_CASE("a shrinking kink is one R1 death") {
  const auto g = generate_contraction(2, 100.0, 20, false);
  REQUIRE(g.events.size() == 1);
  const std::vector<PolylineFrame> frames(g.frames.begin(), g.frames.begin() + g.events[0].frame + 1);
  const auto script = detect_events(frames, std::nullopt);
  REQUIRE(script.events.size() == 1);
  CHECK(script.events[0].kind == MoveKind::R1Death);
  CHECK(script.terminal_disc);
  CHECK(!script.bound.has_value());
}

TEST_CASE("detection errors") {
  const auto g = generate_contraction(3, 100.0, 30, false);
  REQUIRE(g.events.size() == 2);
  std::vector<PolylineFrame> skipped;
  for (std::size_t i = 0; i < g.frames.size(); ++i) {
    const auto f = static_cast<int>(i);
    if (f >= g.events[0].frame - 1 && f < g.events[1].frame) continue;
    skipped.push_back(g.frames[i]);
  }
  try {
    (void)detect_events(skipped, g.bound);
    FAIL("expected a resolution error");
  } catch (const DetectionError& e) {
    CHECK(e.code() == "resolution");
    CHECK(std::string(e.what()).find("sample") != std::string::npos);
  }

  const PolylineFrame one{0.0, {regular(8, 1.0)}};
  const PolylineFrame two{1.0, {regular(8, 1.0), regular(8, 0.2, {5, 5})}};
  try {
    (void)detect_events({one, two}, std::nullopt);
    FAIL("expected a classification error");
  } catch (const DetectionError& e) {
    CHECK(e.code() == "classification");
    CHECK(e.step() == 1);
  }

  try {
    (void)detect_events(g.frames, 10.0);
    FAIL("expected a bound error");
  } catch (const BoundError& e) {
    CHECK(e.step() == 0);
  }
  auto bad = g.frames;
  bad[3].curves[0][1] = bad[3].curves[0][0];
  try {
    (void)detect_events(bad, std::nullopt);
    FAIL("expected a genericity error");
  } catch (const GenericityError& e) {
    CHECK(std::string(e.what()).find("frame 3") != std::string::npos);
  }
  auto unordered = g.frames;
  std::swap(unordered[1], unordered[2]);
  CHECK_THROWS_AS(detect_events(unordered, std::nullopt), ValidationError);
}

TEST_CASE("svg rendering") {
  const std::string svg = render_svg({figure_eight(), regular(6, 0.3, {2, 0})});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t polygons = 0;
  for (std::size_t pos = 0; (pos = svg.find("<polygon", pos)) != std::string::npos; ++pos) ++polygons;
  CHECK(polygons == 2);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(render_svg({figure_eight()}) == render_svg({figure_eight()}));
  SvgOptions plain;
  plain.show_crossings = false;
  CHECK(render_svg({figure_eight()}, plain).find("<circle") == std::string::npos);
}
