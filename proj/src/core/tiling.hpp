// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/report.hpp"

namespace gf {

constexpr int kLabels = 12;
constexpr int kTupleSpace = kLabels * kLabels * kLabels * kLabels;

using Tile = std::array<int, 4>;  // (top, right, bottom, left), labels 1..12

enum class CornerRole { none = 0, tl, tr, br, bl };

struct TileSet {
  std::vector<Tile> tiles;              // sorted, unique
  std::array<int, kLabels + 1> match{};   // match[a] = partner of a
  std::array<int, kLabels + 1> iota{};    // reflection involution
  std::vector<Tile> corner_tuples;
  std::vector<std::pair<CornerRole, Tile>> corners;
  std::vector<std::pair<int, int>> arm_pairs;
  std::string version;
  std::string description;
  std::vector<std::vector<Tile>> pattern;  // optional periodic witness block

  // Membership bitmaps over the 12^4 tuple space.
  std::vector<unsigned char> member;      // physical tile set
  std::vector<unsigned char> member_rot;  // closure under the site-rotation map

  bool contains(const Tile& t) const;
  bool contains_rotated(const Tile& t) const;
  CornerRole corner_role(const Tile& t) const;
  bool horizontal_arm(const Tile& t) const;
  bool vertical_arm(const Tile& t) const;
  json to_json() const;
};

int tuple_index(const Tile& t);
Tile tuple_from_index(int idx);

int match_edges(int a, int b, const std::array<int, kLabels + 1>& table);
std::array<int, kLabels + 1> default_match_table();

Tile rotate_tile(const Tile& t);  // (c1,c2,c3,c4) -> (c4,c1,c2,c3)
Tile reflect_tile(const Tile& t, const std::array<int, kLabels + 1>& iota);
// Action of the plaquette site rotation on inner tuples: (t,r,b,l) -> (l, m t, r, m b).
Tile site_rotate_tuple(const Tile& t, const std::array<int, kLabels + 1>& match);

TileSet load_tileset(const json& doc);
TileSet load_tileset_file(const std::string& path);
TileSet bundled_tileset();

// Site basis of the tiling layer: state s in 0..11 is the matched pair (s+1, match(s+1)),
// first member topmost (sites between vertically adjacent cells) or leftmost.
struct EdgePair {
  int first;
  int second;
};
EdgePair edge_pair_state(int s, const TileSet& ts);
int edge_pair_index(int first, int second, const TileSet& ts);

// Inner tuple (c1^2, c2^1, c3^1, c4^2) of a plaquette given its four site states.
Tile inner_tuple(const std::array<int, 4>& states, const TileSet& ts);
int plaquette_penalty(const std::array<int, 4>& states, const TileSet& ts);
// Diagonal 0/1 plaquette term h_c on the 12-dimensional pair space.
TermPtr tiling_penalty_term(const TileSet& ts);

struct Tiling {
  int width = 0;
  int height = 0;
  std::vector<Tile> cells;  // row-major
  const Tile& at(int r, int c) const { return cells[static_cast<std::size_t>(r * width + c)]; }
  Tile& at(int r, int c) { return cells[static_cast<std::size_t>(r * width + c)]; }
  std::vector<std::pair<int, int>> defects(const TileSet& ts) const;
  bool edges_match(const TileSet& ts) const;
  json to_json(const TileSet& ts) const;
  std::string to_svg(const TileSet& ts) const;
};

struct Pin {
  int row;
  int col;
  Tile tile;
};

struct SolveResult {
  std::vector<Tiling> tilings;
  std::uint64_t nodes = 0;
  bool exhausted = false;  // search tree fully explored
  bool budget_hit = false;
};

SolveResult solve_tiling(int L, int H, const TileSet& ts, const std::vector<Pin>& pins, std::size_t limit,
                         std::uint64_t node_budget = 50'000'000);

struct SegmentCount {
  int top = 0;
  int bottom = 0;
  int left = 0;
  int right = 0;
  int total() const { return top + bottom + left + right; }
};

// Complete red edges whose length is exactly 4^n tiles (corners included at both ends
// count as the first and last of the 4^n + 1 tiles).
SegmentCount count_red_segments(const Tiling& t, const TileSet& ts, int n);

struct SegmentBounds {
  long long lower;
  long long upper;
};
SegmentBounds segment_bounds(long long L, long long H, int n);

struct RigidityBound {
  long long raw;
  long long clamped;
};
RigidityBound rigidity_bound(long long L, long long H, int n, long long d);

Tiling inject_defects(const Tiling& t, const std::vector<std::pair<int, int>>& cells, const TileSet& ts);

Tiling pattern_window(const TileSet& ts, int L, int H, int row_offset, int col_offset);

Pin parse_pin(const std::string& spec);
std::string tile_str(const Tile& t);

}  // namespace gf
