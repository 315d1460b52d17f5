// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <set>

#include "core/tiling.hpp"
#include "doctest.h"

using namespace gf;

TEST_CASE("match table is a fixed-point-free involution") {
  const auto m = default_match_table();
  for (int a = 1; a <= kLabels; ++a) {
    CHECK(m[static_cast<std::size_t>(a)] != a);
    CHECK(m[static_cast<std::size_t>(m[static_cast<std::size_t>(a)])] == a);
  }
  const TileSet ts = bundled_tileset();
  CHECK(ts.match == m);
}

TEST_CASE("tuple indexing round trip") {
  for (int i = 0; i < kTupleSpace; i += 37) CHECK(tuple_index(tuple_from_index(i)) == i);
  CHECK(tuple_index({1, 1, 1, 1}) == 0);
}

TEST_CASE("tile rotation has order four and reflection is an involution") {
  const TileSet ts = bundled_tileset();
  for (const Tile& t : ts.tiles) {
    Tile x = t;
    for (int k = 0; k < 4; ++k) x = rotate_tile(x);
    CHECK(x == t);
    CHECK(reflect_tile(reflect_tile(t, ts.iota), ts.iota) == t);
  }
  CHECK(rotate_tile({1, 2, 3, 4}) == Tile{4, 1, 2, 3});
}

TEST_CASE("bundled tile set and its rotation closure") {
  const TileSet ts = bundled_tileset();
  CHECK(ts.tiles.size() == 56);
  CHECK(std::set<Tile>(ts.tiles.begin(), ts.tiles.end()).size() == ts.tiles.size());
  for (const Tile& t : ts.tiles) {
    CHECK(ts.contains(t));
    CHECK(ts.contains_rotated(t));
  }
  // Closure property: the site rotation keeps members inside the closure.
  for (int i = 0; i < kTupleSpace; ++i)
    if (ts.member_rot[static_cast<std::size_t>(i)]) {
      const Tile r = site_rotate_tuple(tuple_from_index(i), ts.match);
      CHECK(ts.member_rot[static_cast<std::size_t>(tuple_index(r))]);
    }
  CHECK_FALSE(ts.arm_pairs.empty());
  CHECK(ts.corners.size() >= 4);
}

TEST_CASE("segment bounds examples") {
  CHECK(segment_bounds(16, 16, 1).lower == 8);
  CHECK(segment_bounds(16, 16, 1).upper == 24);
  CHECK(segment_bounds(4, 4, 1).lower == 0);
  CHECK(segment_bounds(4, 4, 1).upper == 0);
  CHECK(segment_bounds(64, 32, 2).lower == 4 * 1 * 2 - 2 * 3);
  CHECK_THROWS_AS(segment_bounds(4, 4, 0), Error);
}

TEST_CASE("rigidity bound subtracts eight per defect and clamps at zero") {
  CHECK(rigidity_bound(16, 16, 1, 0).raw == 8);
  CHECK(rigidity_bound(16, 16, 1, 1).raw == 0);
  CHECK(rigidity_bound(16, 16, 1, 2).raw == -8);
  CHECK(rigidity_bound(16, 16, 1, 2).clamped == 0);
  CHECK_THROWS_AS(rigidity_bound(16, 16, 1, -1), Error);
}

TEST_CASE("solver tilings are edge matched and defect free") {
  const TileSet ts = bundled_tileset();
  const SolveResult r = solve_tiling(8, 8, ts, {}, 5);
  REQUIRE(r.tilings.size() == 5);
  for (const auto& t : r.tilings) {
    CHECK(t.edges_match(ts));
    CHECK(t.defects(ts).empty());
    for (const Tile& c : t.cells) CHECK(ts.contains(c));
  }
  // Distinct outputs.
  std::set<std::vector<Tile>> seen;
  for (const auto& t : r.tilings) seen.insert(t.cells);
  CHECK(seen.size() == r.tilings.size());
}

TEST_CASE("solver respects pins and is deterministic") {
  const TileSet ts = bundled_tileset();
  const Tile pin = ts.tiles[7];
  const SolveResult a = solve_tiling(6, 5, ts, {{2, 3, pin}}, 2);
  const SolveResult b = solve_tiling(6, 5, ts, {{2, 3, pin}}, 2);
  REQUIRE_FALSE(a.tilings.empty());
  CHECK(a.tilings.front().at(2, 3) == pin);
  CHECK(a.tilings.front().cells == b.tilings.front().cells);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("solver reports budget exhaustion") {
  const SolveResult r = solve_tiling(16, 16, bundled_tileset(), {}, 1, 5);
  CHECK(r.budget_hit);
  CHECK(r.tilings.empty());
}

TEST_CASE("injected defects are counted (random cells)") {
  const TileSet ts = bundled_tileset();
  const Tiling t = solve_tiling(8, 8, ts, {}, 1).tilings.front();
  std::mt19937 rng(4);
  for (int d = 1; d <= 3; ++d) {
    std::set<std::pair<int, int>> cells;
    while (static_cast<int>(cells.size()) < d) cells.insert({static_cast<int>(rng() % 8), static_cast<int>(rng() % 8)});
    const Tiling bad = inject_defects(t, {cells.begin(), cells.end()}, ts);
    CHECK(bad.defects(ts).size() == static_cast<std::size_t>(d));
  }
  CHECK_THROWS_AS(inject_defects(t, {{0, 0}, {0, 0}}, ts), Error);
  CHECK_THROWS_AS(inject_defects(t, {{9, 0}}, ts), Error);
}

TEST_CASE("periodic pattern windows are valid tilings with segments inside the bounds") {
  const TileSet ts = bundled_tileset();
  for (int off = 0; off < 8; off += 3) {
    const Tiling t = pattern_window(ts, 16, 16, off, off);
    CHECK(t.edges_match(ts));
    CHECK(t.defects(ts).empty());
  }
}

TEST_CASE("pair states and the tiling penalty") {
  const TileSet ts = bundled_tileset();
  for (int s = 0; s < kLabels; ++s) {
    const EdgePair e = edge_pair_state(s, ts);
    CHECK(e.first == s + 1);
    CHECK(e.second == ts.match[static_cast<std::size_t>(s + 1)]);
    CHECK(edge_pair_index(e.first, e.second, ts) == s);
  }
  const auto hc = tiling_penalty_term(ts);
  CHECK(hc->is_diagonal());
  CHECK(rotation_defect(*hc) == 0.0);
}

TEST_CASE("pins parse and reject malformed text") {
  const Pin p = parse_pin("1,2=3,4,5,6");
  CHECK(p.row == 1);
  CHECK(p.col == 2);
  CHECK(p.tile == Tile{3, 4, 5, 6});
  CHECK_THROWS_AS(parse_pin("1,2"), Error);
  CHECK_THROWS_AS(parse_pin("1,2=0,4,5,6"), Error);
}

TEST_CASE("SVG rendering is well formed") {
  const TileSet ts = bundled_tileset();
  const std::string svg = solve_tiling(8, 8, ts, {}, 1).tilings.front().to_svg(ts);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
