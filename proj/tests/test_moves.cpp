#include <algorithm>
#include <set>

#include "curvesplit/diagram.hpp"
#include "curvesplit/errors.hpp"
#include "curvesplit/moves.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace curvesplit;

namespace {

MoveEvent event_at(MoveKind kind, std::vector<Dart> darts) {
  MoveEvent e;
  e.kind = kind;
  e.site.darts = std::move(darts);
  return e;
}

std::multiset<int> loop_spectrum(const CurveDiagram& d) {
  std::multiset<int> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << d.crossing_count()); ++m) {
    out.insert(oracle::loop_count(d, m));
  }
  return out;
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (MoveKind k : {MoveKind::R1Birth, MoveKind::R1Death, MoveKind::R2Birth, MoveKind::R2Death,
                     MoveKind::R3}) {
    CHECK(move_kind_from_string(to_string(k)) == k);
    CHECK(disc_crossings_before(k) + disc_crossings_after(k) ==
          (k == MoveKind::R3 ? 6 : (k == MoveKind::R1Birth || k == MoveKind::R1Death ? 1 : 2)));
  }
  CHECK_THROWS_AS(move_kind_from_string("R4"), ValidationError);
}

TEST_CASE("figure-eight loses its kink") {
  const CurveDiagram eight = from_gauss_code("O1+U1+");
  const auto sites = find_sites(eight, MoveKind::R1Death);
  CHECK(sites.size() == 2);
  for (const auto& s : sites) {
    const auto r = resolve_move(eight, event_at(MoveKind::R1Death, s.darts));
    CHECK(validate(r.after).empty());
    CHECK(r.after.crossing_count() == 0);
    REQUIRE(r.after.arcs().size() == 1);
    CHECK(r.after.arcs().begin()->second.is_free_loop());
    CHECK(r.after.total_length() == doctest::Approx(1.0));
    CHECK(r.event.disc.boundary.size() == 2);
    CHECK(r.event.disc.after.through == std::vector<std::pair<int, int>>{{0, 1}});
  }
  CHECK(find_sites(eight, MoveKind::R2Death).empty());
}

TEST_CASE("perturbed 2-gamma contracts to a circle") {
  const auto [d, r] = canonical_perturbed_m_gamma(2);
  const auto sites = find_sites(d, MoveKind::R1Death);
  REQUIRE(sites.size() == 2);
  const auto res = resolve_move(d, event_at(MoveKind::R1Death, sites.front().darts));
  CHECK(res.after.crossing_count() == 0);
  const double kink = d.arc(sites.front().darts[0].arc).length;
  CHECK(res.after.total_length() == doctest::Approx(d.total_length() - kink));
  for (const auto& [from, to] : res.event.carry) CHECK(res.after.has_arc(to));
}

TEST_CASE("death on a wrong face is rejected") {
  const auto d = canonical_perturbed_m_gamma(4).first;
  const auto monogon = find_sites(d, MoveKind::R1Death).front();
  CHECK_THROWS_AS(resolve_move(d, event_at(MoveKind::R2Death, monogon.darts)), MoveMismatchError);
  auto bad = monogon.darts;
  bad[0].reversed = !bad[0].reversed;
  CHECK_THROWS_AS(resolve_move(d, event_at(MoveKind::R1Death, bad)), MoveMismatchError);
  CHECK_THROWS_AS(resolve_move(d, event_at(MoveKind::R1Death, {{99, false}})), MoveMismatchError);
}

TEST_CASE("births are undone by their inverse") {
  std::vector<CurveDiagram> ds{from_gauss_code(""), from_gauss_code("# #"),
                               from_gauss_code("O1+U1+"), canonical_perturbed_m_gamma(3).first,
                               canonical_perturbed_m_gamma(4).first};
  for (const auto& d : ds) {
    for (MoveKind k : {MoveKind::R1Birth, MoveKind::R2Birth}) {
      for (const auto& site : find_sites(d, k)) {
        CAPTURE(to_string(k));
        const auto birth = resolve_move(d, event_at(k, site.darts));
        CHECK(validate(birth.after).empty());
        CHECK(birth.after.crossing_count() == d.crossing_count() + disc_crossings_after(k));
        CHECK(birth.after.total_length() ==
              doctest::Approx(d.total_length() + disc_crossings_after(k) * site.new_length));
        if (d.genus() == 0) CHECK(birth.after.genus() == 0);
        const auto death = resolve_move(birth.after, inverse_move(birth));
        CHECK(death.after.crossing_count() == d.crossing_count());
        CHECK(find_isomorphism(d, death.after).has_value());
        CHECK(death.after.total_length() ==
              doctest::Approx(d.total_length()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("R2 birth requires a shared face") {
  const auto d = canonical_perturbed_m_gamma(3).first;
  // Outer loop and inner kink border different faces on their left.
  std::set<std::pair<Dart, Dart>> ok;
  for (const auto& s : find_sites(d, MoveKind::R2Birth)) ok.emplace(s.darts[0], s.darts[1]);
  int rejected = 0;
  for (const auto& [a, x] : d.arcs()) {
    for (const auto& [b, y] : d.arcs()) {
      if (a >= b) continue;
      for (bool ra : {false, true}) {
        for (bool rb : {false, true}) {
          const Dart da{a, ra};
          const Dart db{b, rb};
          if (ok.contains({da, db})) continue;
          ++rejected;
          CHECK_THROWS_AS(resolve_move(d, event_at(MoveKind::R2Birth, {da, db})),
                          MoveMismatchError);
        }
      }
    }
  }
  CHECK(rejected > 0);
  CHECK_THROWS_AS(resolve_move(d, event_at(MoveKind::R2Birth, {{0, false}, {0, true}})),
                  MoveMismatchError);
}

TEST_CASE("R3 on a trefoil shadow") {
  const CurveDiagram t = from_gauss_code("O1+U2-O3+U1+O2-U3+");
  REQUIRE(validate(t).empty());
  const auto sites = find_sites(t, MoveKind::R3);
  REQUIRE_FALSE(sites.empty());
  for (const auto& s : sites) {
    const auto r = resolve_move(t, event_at(MoveKind::R3, s.darts));
    CHECK(validate(r.after).empty());
    CHECK(r.after.crossing_count() == 3);
    CHECK(r.after.total_length() == doctest::Approx(t.total_length()));
    const auto back = resolve_move(r.after, inverse_move(r));
    CHECK(back.after == t);
  }
}

TEST_CASE("recorded disc must match") {
  const CurveDiagram eight = from_gauss_code("O1+U1+");
  const auto site = find_sites(eight, MoveKind::R1Death).front();
  auto e = resolve_move(eight, event_at(MoveKind::R1Death, site.darts)).event;
  CHECK_NOTHROW(resolve_move(eight, e));
  e.disc.boundary[0].arc = 42;
  CHECK_THROWS_AS(resolve_move(eight, e), MoveMismatchError);
}

TEST_CASE("local tangles of the model moves") {
  SUBCASE("R1") {
    const auto e = model_event(MoveKind::R1Death);
    const auto table = edge_table(e);
    CHECK(table.size() == 1);
    const auto before = partner_counts(table, e, Side::Before);
    CHECK(std::count(before.begin(), before.end(), 1) == 1);
    CHECK(std::count(before.begin(), before.end(), 0) == 1);
    CHECK(partner_counts(table, e, Side::After) == std::vector<int>{1});
    for (std::uint32_t m = 0; m < 2; ++m) {
      const auto lt = local_tangle(e, Side::Before, m);
      CHECK(is_non_crossing(lt.pairing));
      if (before[m] == 0) CHECK(lt.circles == 1);
    }
  }
  SUBCASE("R2") {
    const auto e = model_event(MoveKind::R2Death);
    const auto table = edge_table(e);
    CHECK(table.size() == 2);
    const auto before = partner_counts(table, e, Side::Before);
    CHECK(std::count(before.begin(), before.end(), 1) == 3);
    CHECK(std::count(before.begin(), before.end(), 0) == 1);
    CHECK(partner_counts(table, e, Side::After) == std::vector<int>{1});
    for (std::uint32_t m = 0; m < 4; ++m) {
      CHECK(local_tangle(e, Side::Before, m).circles == (before[m] == 0 ? 1 : 0));
    }
    // B at both corners matches the crossing-free side; the mixed choices match each other.
    int inner = 0;
    for (const auto& p : table) {
      if (p.second.side == Side::Before) {
        ++inner;
        CHECK(std::set<std::uint32_t>{p.first.choice, p.second.choice} ==
              std::set<std::uint32_t>{1, 2});
      } else {
        CHECK(p.first.choice == 3u);
      }
    }
    CHECK(before[0] == 0);
    CHECK(inner == 1);
  }
  SUBCASE("births mirror deaths") {
    CHECK(edge_table(model_event(MoveKind::R1Birth)).size() == 1);
    CHECK(edge_table(model_event(MoveKind::R2Birth)).size() == 2);
  }
}

TEST_CASE("local tangle inputs") {
  const auto e = model_event(MoveKind::R2Death);
  CHECK_THROWS_AS(local_tangle(e, Side::Before, 4u), IncompleteResolutionError);
  CHECK_THROWS_AS(local_tangle(e, Side::Before, Resolution{}), IncompleteResolutionError);
  LocalTangle a{2, {{0, 1}}, 0};
  LocalTangle b{4, {{0, 1}, {2, 3}}, 0};
  CHECK_THROWS_AS(tangles_isotopic(a, b), DomainError);
  CHECK(is_non_crossing({{0, 3}, {1, 2}}));
  CHECK_FALSE(is_non_crossing({{0, 2}, {1, 3}}));
}

TEST_CASE("R3 local tangles: partners are 0, 1 or 3") {
  const auto e = model_event(MoveKind::R3);
  const auto table = edge_table(e);
  for (Side side : {Side::Before, Side::After}) {
    const auto counts = partner_counts(table, e, side);
    REQUIRE(counts.size() == 8);
    for (std::uint32_t m = 0; m < 8; ++m) {
      CAPTURE(m);
      const int c = counts[m];
      CHECK((c == 0 || c == 1 || c == 3));
      const auto lt = local_tangle(e, side, m);
      CHECK(lt.arity == 6);
      CHECK(is_non_crossing(lt.pairing));
      CHECK(lt.circles == (c == 0 ? 1 : 0));
    }
  }
  // Every partner set is symmetric: isotopy is an equivalence relation.
  std::set<std::pair<TangleInstance, TangleInstance>> pairs;
  for (const auto& p : table) pairs.emplace(p.first, p.second);
  for (const auto& [a, b] : pairs) {
    for (const auto& [c, d] : pairs) {
      if (b == c && a != d) CHECK((pairs.contains({a, d}) || pairs.contains({d, a})));
    }
  }
}

TEST_CASE("R3 keeps the loop-count spectrum on the trefoil shadow") {
  const CurveDiagram t = from_gauss_code("O1+U2-O3+U1+O2-U3+");
  for (const auto& s : find_sites(t, MoveKind::R3)) {
    const auto r = resolve_move(t, event_at(MoveKind::R3, s.darts));
    // Linked local choices extend to global resolutions with equal loop counts.
    for (const auto& p : edge_table(r.event)) {
      const CurveDiagram& d1 = p.first.side == Side::Before ? t : r.after;
      const CurveDiagram& d2 = p.second.side == Side::Before ? t : r.after;
      const auto& s1 = r.event.disc.side(p.first.side).crossings;
      const auto& s2 = r.event.disc.side(p.second.side).crossings;
      auto global = [](const CurveDiagram& d, const std::vector<CrossingId>& cs,
                       std::uint32_t local) {
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < cs.size(); ++i) {
          if ((local >> i) & 1u) mask |= std::uint64_t{1} << d.bit_of(cs[i]);
        }
        return mask;
      };
      CHECK(oracle::loop_count(d1, global(d1, s1, p.first.choice)) ==
            oracle::loop_count(d2, global(d2, s2, p.second.choice)));
    }
    CHECK(loop_spectrum(r.after).size() == 8);
  }
}
