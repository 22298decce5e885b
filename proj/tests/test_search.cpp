#include <algorithm>

#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"
#include "curvesplit/search.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvesplit;

namespace {

HomotopyScript kink_script(const CurveDiagram& d, std::optional<int> m) {
  HomotopyScript s;
  s.initial = d;
  MoveEvent e;
  e.kind = MoveKind::R1Death;
  e.site = find_sites(d, MoveKind::R1Death).front();
  s.events.push_back(e);
  s.terminal_disc = true;
  s.m = m;
  return s;
}

bool has_failure(const VerificationReport& r, const std::string& code) {
  return std::any_of(r.failures.begin(), r.failures.end(),
                     [&](const VerificationFailure& f) { return f.code == code; });
}

// A certificate with at least `edges` path edges from the random suite.
std::pair<HomotopyScript, Certificate> long_certificate(std::size_t edges) {
  for (std::uint64_t seed = 1;; ++seed) {
    auto script = random_contraction_script(3, seed);
    auto cert = find_certificate(script);
    if (cert.edges.size() >= edges) return {script, cert};
  }
}

}  // namespace

TEST_CASE("two-gamma: v* loses a loop to the kink") {
  const auto script = kink_script(canonical_perturbed_m_gamma(2).first, 2);
  const auto t = resolve_script(script);
  const auto full = build_graph(script, GraphMode::Full);
  CHECK(classify_vertex(t, full, Vertex{1, 0}).kind == VertexCase::Case2);
  const auto at_start = classify_vertex(t, full, full.v_star());
  CHECK(at_start.kind == VertexCase::Even);
  REQUIRE(at_start.evidence.has_value());
  CHECK(at_start.evidence->arcs.size() <= 2);

  const auto cert = find_certificate(script);
  CHECK(cert.path.size() == 1);
  CHECK(cert.edges.empty());
  CHECK(cert.terminal.degenerate);
  CHECK(cert.terminal.kind == TerminalKind::LocalCircle);
  CHECK(cert.path[0].curve == cert.terminal.evidence->loop);
  CHECK(verify_certificate(script, cert).accepted());
}

TEST_CASE("classification of other vertices") {
  const auto script = random_contraction_script(3, 2);
  const auto t = resolve_script(script);
  const auto g = build_graph(script, GraphMode::Full);
  for (const Vertex& v : g.vertices()) {
    const auto c = classify_vertex(t, g, v);
    const bool odd = g.degree(v) % 2 == 1;
    if (v == g.v_star()) {
      CHECK(c.kind == (odd ? VertexCase::Start : VertexCase::Even));
    } else if (!odd) {
      CHECK(c.kind == VertexCase::Even);
    } else if (v.level == 0) {
      CHECK(c.kind == VertexCase::Case1);
      // Such vertices exist but never share a component with v*.
      const auto comp = component_of(g, g.v_star());
      CHECK_FALSE(std::binary_search(comp.vertices.begin(), comp.vertices.end(), v));
    } else if (v.level == t.last_level()) {
      CHECK(c.kind == VertexCase::Case2);
    } else {
      CHECK(c.kind == VertexCase::Case3);
      REQUIRE(c.evidence.has_value());
      CHECK(local_tangle(t.events[static_cast<std::size_t>(c.evidence->event)], c.evidence->side,
                         c.evidence->choice)
                .circles == 1);
    }
  }
}

TEST_CASE("certificates round trip on random scripts") {
  int degenerate = 0;
  int paths = 0;
  for (int m = 2; m <= 5; ++m) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      CAPTURE(m);
      CAPTURE(seed);
      RandomScriptOptions opt;
      opt.padding = seed % 4 == 0 ? 0 : 4;
      const auto script = random_contraction_script(m, seed, opt);
      const auto cert = find_certificate(script);
      CHECK(cert == find_certificate(script));
      const auto report = verify_certificate(script, cert);
      CHECK(report.accepted());
      for (const auto& f : report.failures) MESSAGE(f.code << ": " << f.message);
      const auto t = resolve_script(script);
      for (const auto& step : cert.path) {
        const auto& d = t.slices[static_cast<std::size_t>(step.vertex.level)];
        CHECK(oracle::loop_count(d, step.vertex.mask) == m);
      }
      CHECK(cert.length_audit < *script.bound);
      if (cert.terminal.degenerate) {
        ++degenerate;
        REQUIRE(cert.terminal.evidence.has_value());
        CHECK(cert.terminal.evidence->arcs.size() <= 2);
        CHECK(cert.terminal.evidence->event == 0);
      } else {
        ++paths;
        CHECK((cert.terminal.vertex_case == VertexCase::Case2 ||
               cert.terminal.vertex_case == VertexCase::Case3));
      }
    }
  }
  CHECK(degenerate > 0);
  CHECK(paths > 0);
}

TEST_CASE("forged certificates are rejected") {
  const auto [script, cert] = long_certificate(3);
  const auto t = resolve_script(script);
  REQUIRE(verify_certificate(script, cert).accepted());

  SUBCASE("flipped resolution bit") {
    Certificate forged = cert;
    auto& v = forged.path[forged.path.size() / 2].vertex;
    REQUIRE(t.slices[static_cast<std::size_t>(v.level)].crossing_count() > 0);
    v.mask ^= 1u;
    const auto report = verify_certificate(script, forged);
    CHECK_FALSE(report.accepted());
    CHECK(has_failure(report, "non-edge"));
  }
  SUBCASE("permuted tracked curve") {
    Certificate forged = cert;
    auto& step = forged.path[1];
    const auto loops = smooth(t.slices[static_cast<std::size_t>(step.vertex.level)],
                              Resolution::from_mask(t.slices[static_cast<std::size_t>(step.vertex.level)],
                                                    step.vertex.mask));
    for (const auto& l : loops.loops) {
      if (l.id() != step.curve) {
        step.curve = l.id();
        break;
      }
    }
    const auto report = verify_certificate(script, forged);
    CHECK_FALSE(report.accepted());
    CHECK(has_failure(report, "bijection-mismatch"));
  }
  SUBCASE("swapped bijection targets") {
    Certificate forged = cert;
    auto& bij = forged.edges[0].bijection;
    REQUIRE(bij.size() >= 2);
    std::swap(bij[0].second, bij[1].second);
    CHECK(has_failure(verify_certificate(script, forged), "bijection-mismatch"));
  }
  SUBCASE("wrong terminal") {
    Certificate forged = cert;
    forged.terminal.kind = forged.terminal.kind == TerminalKind::LocalCircle
                               ? TerminalKind::DiscContraction
                               : TerminalKind::LocalCircle;
    CHECK(has_failure(verify_certificate(script, forged), "terminal"));
  }
  SUBCASE("understated length") {
    Certificate forged = cert;
    forged.length_audit *= 0.5;
    CHECK(has_failure(verify_certificate(script, forged), "length"));
  }
  SUBCASE("truncated path") {
    Certificate forged = cert;
    forged.path.pop_back();
    CHECK_FALSE(verify_certificate(script, forged).accepted());
  }
}

TEST_CASE("v* must be unique for a certificate") {
  const auto script = kink_script(from_gauss_code("O1+U1+ O2+U2+"), std::nullopt);
  CHECK_THROWS_AS(find_certificate(script), PreconditionError);
  const auto report = verify_certificate(script, Certificate{});
  CHECK_FALSE(report.accepted());
}

TEST_CASE("certificate for a generated contraction") {
  const auto g = generate_contraction(3, 100.0, 120);
  const auto script = detect_events(g.frames, g.bound);
  const auto t = resolve_script(script);
  const Certificate c = find_certificate(script);
  CHECK(verify_certificate(script, c).accepted());
  CHECK(!c.terminal.degenerate);
  CHECK(c.terminal.vertex_case == VertexCase::Case3);
  REQUIRE(c.terminal.evidence.has_value());
  CHECK(c.terminal.evidence->loop == c.path.back().curve);
  for (const auto& step : c.path) {
    CHECK(oracle::loop_count(t.slices[static_cast<std::size_t>(step.vertex.level)], step.vertex.mask) == 3);
  }
  CHECK(c.length_audit < 100.0);
}
