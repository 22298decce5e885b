// Acceptance checks, one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "curvesplit/errors.hpp"
#include "curvesplit/geometry.hpp"
#include "curvesplit/json_io.hpp"
#include "curvesplit/moves.hpp"
#include "curvesplit/resgraph.hpp"
#include "curvesplit/search.hpp"
#include "oracles.hpp"

using namespace curvesplit;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int report(int n, const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

HomotopyScript random_script(int i) {
  RandomScriptOptions opt;
  opt.padding = i % 7;
  opt.max_crossings = 8;
  return random_contraction_script(2 + i % 5, static_cast<std::uint64_t>(i) + 1, opt);
}

constexpr int kRandomScripts = 1000;

Outcome end_to_end() {
  Outcome o;
  std::ostringstream detail;
  for (int m = 2; m <= 6; ++m) {
    const auto t0 = std::chrono::steady_clock::now();
    const double bound = 100.0;
    const auto g = generate_contraction(m, bound, 200);
    // Pass every artifact through its JSON form, as the command-line tool does.
    const auto doc = frames_from_json(parse_json(to_json(to_document(g)).dump()));
    const auto script = script_from_json(parse_json(to_json(detect_events(doc.frames, doc.bound)).dump()));
    const auto t = resolve_script(script);
    const auto cert = certificate_from_json(parse_json(to_json(find_certificate(script), t).dump()));
    const auto rep = verify_certificate(script, cert);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string tag = "m=" + std::to_string(m) + ": ";
    if (!rep.accepted()) o.fail(tag + "rejected: " + rep.failures.front().message);
    for (const auto& step : cert.path) {
      const auto& d = t.slices[static_cast<std::size_t>(step.vertex.level)];
      if (oracle::loop_count(d, step.vertex.mask) != m) o.fail(tag + "path vertex without m loops");
    }
    if (cert.terminal.vertex_case != VertexCase::Case2 && cert.terminal.vertex_case != VertexCase::Case3) {
      o.fail(tag + "terminal case " + std::string(to_string(cert.terminal.vertex_case)));
    }
    double longest = 0.0;
    for (const auto& d : t.slices) longest = std::max(longest, d.total_length());
    for (const auto& f : g.frames) longest = std::max(longest, f.total_length());
    if (!(cert.length_audit < bound) || !(longest < bound)) o.fail(tag + "length audit reached the bound");
    if (secs >= 10.0) o.fail(tag + "took " + std::to_string(secs) + "s");
    detail << "m=" << m << " path " << cert.path.size() << " " << to_string(cert.terminal.vertex_case)
           << (m < 6 ? ", " : "");
  }
  if (o.pass) o.detail = detail.str();
  return o;
}

Outcome local_tangles() {
  Outcome o;
  std::ostringstream detail;
  for (MoveKind k : {MoveKind::R1Death, MoveKind::R2Death, MoveKind::R3}) {
    const MoveEvent e = model_event(k);
    const auto table = edge_table(e);
    int instances = 0;
    int lonely = 0;
    std::map<int, int> histogram;
    for (Side side : {Side::Before, Side::After}) {
      const int width = static_cast<int>(e.disc.side(side).crossings.size());
      const auto counts = partner_counts(table, e, side);
      for (std::uint32_t choice = 0; choice < (1u << width); ++choice) {
        ++instances;
        const int c = counts[choice];
        ++histogram[c];
        if (c != 0 && c != 1 && c != 3) o.fail(std::string(to_string(k)) + " has a tangle with " + std::to_string(c) + " partners");
        const LocalTangle t = local_tangle(e, side, choice);
        if (c == 0) {
          ++lonely;
          if (t.circles != 1) o.fail(std::string(to_string(k)) + " unpartnered tangle without a circle");
        }
        // Partners are recounted directly from the tangles.
        int direct = 0;
        for (Side s2 : {Side::Before, Side::After}) {
          const int w2 = static_cast<int>(e.disc.side(s2).crossings.size());
          for (std::uint32_t c2 = 0; c2 < (1u << w2); ++c2) {
            if (s2 == side && c2 == choice) continue;
            const LocalTangle u = local_tangle(e, s2, c2);
            if (u.pairing == t.pairing && u.circles == t.circles) ++direct;
          }
        }
        if (direct != c) o.fail(std::string(to_string(k)) + " partner count disagrees with direct comparison");
      }
    }
    detail << to_string(k) << " " << instances << " tangles, " << lonely << " unpartnered; ";
  }
  if (o.pass) o.detail = detail.str() + "partner counts in {0,1,3}";
  return o;
}

// Oracle check of one edge's loop bijection: one-to-one and onto, and every
// outside arc of a loop is carried into the loop it maps to.
bool bijection_valid(const Timeline& t, const Edge& e) {
  const auto& ev = t.events[static_cast<std::size_t>(e.event)];
  const auto bij = loop_bijection(t, e, e.a);
  const auto& da = t.slices[static_cast<std::size_t>(e.a.level)];
  const auto& db = t.slices[static_cast<std::size_t>(e.b.level)];
  const auto la = oracle::loop_labels(da, e.a.mask);
  const auto lb = oracle::loop_labels(db, e.b.mask);
  std::map<int, int> image;
  std::set<int> hit;
  for (const auto& [x, y] : bij) {
    if (!la.contains(x) || !lb.contains(y)) return false;
    if (!image.emplace(la.at(x), lb.at(y)).second || !hit.insert(lb.at(y)).second) return false;
  }
  std::set<int> all_a, all_b;
  for (const auto& [arc, l] : la) all_a.insert(l);
  for (const auto& [arc, l] : lb) all_b.insert(l);
  if (image.size() != all_a.size() || hit.size() != all_b.size()) return false;

  auto inside = [&](const DiscSide& s, ArcId a) { return s.has_inner_arc(a); };
  const bool a_before = e.a.level == e.event;
  const bool b_before = e.b.level == e.event;
  const DiscSide& sa = a_before ? ev.disc.before : ev.disc.after;
  for (const auto& [arc, label] : la) {
    if (inside(sa, arc)) continue;
    ArcId target = arc;
    if (a_before && !b_before) {
      target = ev.carry.at(arc);
    } else if (!a_before && b_before) {
      // arc lives after the move; find an outside arc carried onto it
      bool found = false;
      for (const auto& [from, to] : ev.carry) {
        if (to == arc) {
          target = from;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    if (!lb.contains(target) || lb.at(target) != image.at(label)) return false;
  }
  return true;
}

Outcome loop_count_preservation() {
  Outcome o;
  long edges = 0;
  for (int i = 0; i < kRandomScripts; ++i) {
    const auto script = random_script(i);
    const auto t = resolve_script(script);
    const auto g = build_graph(t, find_v_star(t.slices[0], *script.m), GraphMode::Full);
    for (const Edge& e : g.edges()) {
      ++edges;
      const int la = oracle::loop_count(t.slices[static_cast<std::size_t>(e.a.level)], e.a.mask);
      const int lb = oracle::loop_count(t.slices[static_cast<std::size_t>(e.b.level)], e.b.mask);
      if (la != lb) o.fail("script " + std::to_string(i) + ": edge joins " + std::to_string(la) + " and " + std::to_string(lb) + " loops");
      if (!bijection_valid(t, e)) o.fail("script " + std::to_string(i) + ": invalid loop bijection");
    }
  }
  if (o.pass) o.detail = std::to_string(kRandomScripts) + " scripts, " + std::to_string(edges) + " edges";
  return o;
}

Outcome uniqueness() {
  Outcome o;
  for (int m = 2; m <= 12; ++m) {
    const auto [d, r] = canonical_perturbed_m_gamma(m);
    const std::uint64_t total = std::uint64_t{1} << d.crossing_count();
    if (d.crossing_count() != m - 1) o.fail("m=" + std::to_string(m) + ": wrong crossing count");
    int hits = 0;
    std::uint64_t found = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if (oracle::loop_count(d, mask) == m) {
        ++hits;
        found = mask;
      }
    }
    if (hits != 1) o.fail("m=" + std::to_string(m) + ": " + std::to_string(hits) + " resolutions with m loops");
    if (hits == 1 && found != r.to_mask(d)) o.fail("m=" + std::to_string(m) + ": unexpected m-loop resolution");
  }
  if (o.pass) o.detail = "exactly one m-loop resolution for m = 2..12";
  return o;
}

Outcome handshake() {
  Outcome o;
  long components = 0;
  for (int i = 0; i < kRandomScripts; ++i) {
    const auto script = random_script(i);
    const auto t = resolve_script(script);
    const auto g = build_graph(t, find_v_star(t.slices[0], *script.m), GraphMode::Full);
    // Components by an independent union-find over the edge list.
    std::map<Vertex, Vertex> parent;
    std::function<Vertex(Vertex)> find = [&](Vertex v) {
      auto it = parent.find(v);
      if (it == parent.end() || it->second == v) return v;
      return it->second = find(it->second);
    };
    std::map<Vertex, int> degree;
    for (const Vertex& v : g.vertices()) {
      parent[v] = v;
      degree[v] = 0;
    }
    for (const Edge& e : g.edges()) {
      ++degree[e.a];
      ++degree[e.b];
      parent[find(e.a)] = find(e.b);
    }
    std::map<Vertex, int> odd_per_component;
    int odd = 0;
    for (const auto& [v, deg] : degree) {
      odd_per_component[find(v)] += deg % 2;
      odd += deg % 2;
    }
    components += static_cast<long>(odd_per_component.size());
    if (odd % 2 != 0) o.fail("script " + std::to_string(i) + ": odd number of odd vertices");
    for (const auto& [root, count] : odd_per_component) {
      if (count % 2 != 0) o.fail("script " + std::to_string(i) + ": component with odd number of odd vertices");
    }
    try {
      (void)find_certificate(t, *script.m);
    } catch (const InvariantViolation& e) {
      o.fail("script " + std::to_string(i) + ": " + e.what());
    }
  }
  if (o.pass) o.detail = std::to_string(kRandomScripts) + " graphs, " + std::to_string(components) + " components, no invariant violation";
  return o;
}

Outcome length_safety() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> frac(0.05, 0.45);
  std::bernoulli_distribution coin(0.5);
  int done = 0;
  double worst = -1.0;
  while (done < 10000) {
    Polyline p;
    const int n = 5 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
    std::vector<Intersection> xs;
    try {
      xs = self_intersections(p);
    } catch (const GenericityError&) {
      continue;
    }
    const double before = polyline_length(p);
    for (const auto& x : xs) {
      if (done >= 10000) break;
      double r = frac(rng);
      std::vector<Polyline> out;
      for (int tries = 0; tries < 40 && out.empty(); ++tries, r /= 2) {
        try {
          out = geometric_smooth({p}, x, r, coin(rng) ? Smoothing::B : Smoothing::A);
        } catch (const RadiusError&) {
        }
      }
      if (out.empty()) continue;
      double after = 0.0;
      for (const auto& c : out) after += polyline_length(c);
      worst = std::max(worst, (after - before) / before);
      if (after > before * (1 + 1e-9)) o.fail("smoothing increased length by " + std::to_string(after - before));
      ++done;
    }
  }
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d smoothings, largest relative change %.3e", done, worst);
    o.detail = buf;
  }
  return o;
}

Outcome detection_round_trip() {
  Outcome o;
  int homotopies = 0;
  for (int m = 2; m <= 6; ++m) {
    for (int steps : {50, 200}) {
      for (bool finger : {true, false}) {
        const auto g = generate_contraction(m, 100.0, steps, finger);
        const auto script = detect_events(g.frames, g.bound);
        std::vector<std::pair<MoveKind, int>> planted, found;
        for (const auto& e : g.events) planted.emplace_back(e.kind, e.frame);
        for (const auto& e : script.events) found.emplace_back(e.kind, e.provenance ? e.provenance->frame : -1);
        if (planted != found) {
          o.fail("m=" + std::to_string(m) + " steps=" + std::to_string(steps) + ": sequences differ");
        }
        ++homotopies;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(homotopies) + " homotopies, event sequences equal";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  failures += report(1, "end-to-end contraction", end_to_end);
  failures += report(2, "local tangle partner counts", local_tangles);
  failures += report(3, "loop counts across edges", loop_count_preservation);
  failures += report(4, "unique m-loop resolution", uniqueness);
  failures += report(5, "handshake parity", handshake);
  failures += report(6, "geometric length safety", length_safety);
  failures += report(7, "event detection round trip", detection_round_trip);
  return failures == 0 ? 0 : 1;
}
