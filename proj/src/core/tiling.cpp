// SPDX-License-Identifier: Apache-2.0
#include "core/tiling.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace gf {

int tuple_index(const Tile& t) { return (((t[0] - 1) * kLabels + (t[1] - 1)) * kLabels + (t[2] - 1)) * kLabels + (t[3] - 1); }

Tile tuple_from_index(int idx) {
  Tile t;
  for (int k = 3; k >= 0; --k) {
    t[static_cast<std::size_t>(k)] = idx % kLabels + 1;
    idx /= kLabels;
  }
  return t;
}

std::string tile_str(const Tile& t) {
  return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + "," + std::to_string(t[3]) + ")";
}

static void check_label(int a) {
  if (a < 1 || a > kLabels) fail_invalid("edge label out of range: " + std::to_string(a));
}

int match_edges(int a, int b, const std::array<int, kLabels + 1>& table) {
  check_label(a);
  check_label(b);
  return table[static_cast<std::size_t>(a)] == b ? 1 : 0;
}

std::array<int, kLabels + 1> default_match_table() {
  std::array<int, kLabels + 1> m{};
  for (int i = 1; i <= kLabels; ++i) m[static_cast<std::size_t>(i)] = 13 - i;
  return m;
}

Tile rotate_tile(const Tile& t) { return {t[3], t[0], t[1], t[2]}; }

Tile reflect_tile(const Tile& t, const std::array<int, kLabels + 1>& iota) {
  return {iota[static_cast<std::size_t>(t[3])], iota[static_cast<std::size_t>(t[2])], iota[static_cast<std::size_t>(t[1])],
          iota[static_cast<std::size_t>(t[0])]};
}

Tile site_rotate_tuple(const Tile& t, const std::array<int, kLabels + 1>& m) {
  return {t[3], m[static_cast<std::size_t>(t[0])], t[1], m[static_cast<std::size_t>(t[2])]};
}

bool TileSet::contains(const Tile& t) const { return member[static_cast<std::size_t>(tuple_index(t))] != 0; }
bool TileSet::contains_rotated(const Tile& t) const { return member_rot[static_cast<std::size_t>(tuple_index(t))] != 0; }

CornerRole TileSet::corner_role(const Tile& t) const {
  for (const auto& [role, c] : corners)
    if (c == t) return role;
  return CornerRole::none;
}

bool TileSet::horizontal_arm(const Tile& t) const {
  return std::find(arm_pairs.begin(), arm_pairs.end(), std::make_pair(t[3], t[1])) != arm_pairs.end();
}

bool TileSet::vertical_arm(const Tile& t) const {
  return std::find(arm_pairs.begin(), arm_pairs.end(), std::make_pair(t[0], t[2])) != arm_pairs.end();
}

static const char* role_name(CornerRole r) {
  switch (r) {
    case CornerRole::tl: return "tl";
    case CornerRole::tr: return "tr";
    case CornerRole::br: return "br";
    case CornerRole::bl: return "bl";
    default: return "none";
  }
}

static CornerRole role_from(const std::string& s) {
  if (s == "tl") return CornerRole::tl;
  if (s == "tr") return CornerRole::tr;
  if (s == "br") return CornerRole::br;
  if (s == "bl") return CornerRole::bl;
  fail_invalid("unknown corner role: " + s);
}

json TileSet::to_json() const {
  json j;
  j["format"] = "gapforge-tileset";
  j["version"] = version;
  j["description"] = description;
  j["match_table"] = std::vector<int>(match.begin() + 1, match.end());
  j["reflection_involution"] = std::vector<int>(iota.begin() + 1, iota.end());
  j["corner_tuples"] = corner_tuples;
  json cs = json::array();
  for (const auto& [r, t] : corners) cs.push_back({role_name(r), t});
  j["corners"] = cs;
  json ap = json::array();
  for (const auto& [a, b] : arm_pairs) ap.push_back({a, b});
  j["arm_pairs"] = ap;
  j["tiles"] = tiles;
  return j;
}

static Tile tile_from_json(const json& v) {
  if (!v.is_array() || v.size() != 4) fail_invalid("tile must be an array of 4 labels");
  Tile t;
  for (std::size_t k = 0; k < 4; ++k) {
    if (!v[k].is_number_integer()) fail_invalid("tile labels must be integers");
    t[k] = v[k].get<int>();
    check_label(t[k]);
  }
  return t;
}

static std::array<int, kLabels + 1> involution_from(const json& v, const char* what, bool fixed_point_free) {
  if (!v.is_array() || v.size() != kLabels) fail_invalid(std::string(what) + " must list 12 labels");
  std::array<int, kLabels + 1> m{};
  for (int i = 1; i <= kLabels; ++i) {
    int p = v[static_cast<std::size_t>(i - 1)].get<int>();
    check_label(p);
    m[static_cast<std::size_t>(i)] = p;
  }
  for (int i = 1; i <= kLabels; ++i) {
    if (m[static_cast<std::size_t>(m[static_cast<std::size_t>(i)])] != i)
      fail_invalid(std::string(what) + " is not an involution at label " + std::to_string(i));
    if (fixed_point_free && m[static_cast<std::size_t>(i)] == i)
      fail_invalid(std::string(what) + " has a fixed point at label " + std::to_string(i));
  }
  return m;
}

TileSet load_tileset(const json& doc) {
  if (!doc.is_object()) fail_invalid("tileset: expected a JSON object");
  TileSet ts;
  ts.match = doc.contains("match_table") ? involution_from(doc["match_table"], "match_table", true) : default_match_table();
  if (doc.contains("reflection_involution"))
    ts.iota = involution_from(doc["reflection_involution"], "reflection_involution", false);
  else
    for (int i = 1; i <= kLabels; ++i) ts.iota[static_cast<std::size_t>(i)] = i;
  if (!doc.contains("tiles") || !doc["tiles"].is_array() || doc["tiles"].empty()) fail_invalid("tileset: missing tiles");
  std::set<Tile> uniq;
  for (const auto& v : doc["tiles"]) uniq.insert(tile_from_json(v));
  ts.tiles.assign(uniq.begin(), uniq.end());
  ts.member.assign(kTupleSpace, 0);
  for (const auto& t : ts.tiles) ts.member[static_cast<std::size_t>(tuple_index(t))] = 1;
  for (const auto& t : ts.tiles) {
    Tile r = rotate_tile(t);
    if (!ts.contains(r)) fail_invalid("tileset closure violation: rotation of " + tile_str(t) + " gives " + tile_str(r) + ", which is missing");
    Tile f = reflect_tile(t, ts.iota);
    if (!ts.contains(f)) fail_invalid("tileset closure violation: reflection of " + tile_str(t) + " gives " + tile_str(f) + ", which is missing");
  }
  if (doc.contains("corner_tuples"))
    for (const auto& v : doc["corner_tuples"]) ts.corner_tuples.push_back(tile_from_json(v));
  for (const auto& c : ts.corner_tuples)
    if (!ts.contains(c)) fail_invalid("tileset: corner tuple " + tile_str(c) + " is not a tile");
  if (doc.contains("corners")) {
    for (const auto& v : doc["corners"]) ts.corners.emplace_back(role_from(v.at(0).get<std::string>()), tile_from_json(v.at(1)));
  } else if (ts.corner_tuples.size() == 4) {
    // Rotation orbit order: tl, tr, br, bl.
    const CornerRole order[4] = {CornerRole::tl, CornerRole::tr, CornerRole::br, CornerRole::bl};
    for (int k = 0; k < 4; ++k) ts.corners.emplace_back(order[k], ts.corner_tuples[static_cast<std::size_t>(k)]);
  }
  if (doc.contains("arm_pairs"))
    for (const auto& v : doc["arm_pairs"]) ts.arm_pairs.emplace_back(v.at(0).get<int>(), v.at(1).get<int>());
  ts.version = doc.value("version", "unversioned");
  ts.description = doc.value("description", "");
  if (doc.contains("pattern")) {
    for (const auto& row : doc["pattern"]["cells"]) {
      std::vector<Tile> r;
      for (const auto& c : row) r.push_back(tile_from_json(c));
      ts.pattern.push_back(r);
    }
  }
  // Closure under the plaquette site rotation, used by the penalty term.
  ts.member_rot.assign(kTupleSpace, 0);
  for (const auto& t0 : ts.tiles) {
    Tile t = t0;
    for (int k = 0; k < 4; ++k) {
      ts.member_rot[static_cast<std::size_t>(tuple_index(t))] = 1;
      t = site_rotate_tuple(t, ts.match);
    }
  }
  return ts;
}

TileSet load_tileset_file(const std::string& path) { return load_tileset(parse_json(read_file(path), path)); }

TileSet bundled_tileset() { return load_tileset_file(data_path("robinson_p8.json")); }

EdgePair edge_pair_state(int s, const TileSet& ts) {
  if (s < 0 || s >= kLabels) fail_invalid("edge pair state out of range");
  return {s + 1, ts.match[static_cast<std::size_t>(s + 1)]};
}

int edge_pair_index(int first, int second, const TileSet& ts) {
  if (match_edges(first, second, ts.match) != 1)
    fail_invalid("unmatched edge pair (" + std::to_string(first) + "," + std::to_string(second) + ")");
  return first - 1;
}

Tile inner_tuple(const std::array<int, 4>& s, const TileSet& ts) {
  return {edge_pair_state(s[0], ts).second, edge_pair_state(s[1], ts).first, edge_pair_state(s[2], ts).first,
          edge_pair_state(s[3], ts).second};
}

int plaquette_penalty(const std::array<int, 4>& states, const TileSet& ts) {
  return ts.contains_rotated(inner_tuple(states, ts)) ? 0 : 1;
}

TermPtr tiling_penalty_term(const TileSet& ts) {
  std::vector<double> diag(kTupleSpace);
  for (int i = 0; i < kTupleSpace; ++i) {
    std::array<int, 4> s{i / 1728, (i / 144) % 12, (i / 12) % 12, i % 12};
    diag[static_cast<std::size_t>(i)] = plaquette_penalty(s, ts);
  }
  return diagonal_term(4, kLabels, std::move(diag), "h_c");
}

std::vector<std::pair<int, int>> Tiling::defects(const TileSet& ts) const {
  std::vector<std::pair<int, int>> d;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      if (!ts.contains(at(r, c))) d.emplace_back(r, c);
  return d;
}

bool Tiling::edges_match(const TileSet& ts) const {
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      if (c + 1 < width && !match_edges(at(r, c)[1], at(r, c + 1)[3], ts.match)) return false;
      if (r + 1 < height && !match_edges(at(r, c)[2], at(r + 1, c)[0], ts.match)) return false;
    }
  return true;
}

json Tiling::to_json(const TileSet& ts) const {
  json grid = json::array();
  for (int r = 0; r < height; ++r) {
    json row = json::array();
    for (int c = 0; c < width; ++c) row.push_back(at(r, c));
    grid.push_back(row);
  }
  json d = json::array();
  for (auto [r, c] : defects(ts)) d.push_back({r, c});
  return {{"width", width}, {"height", height}, {"cells", grid}, {"defects", d}, {"tileset_version", ts.version}};
}

std::string Tiling::to_svg(const TileSet& ts) const {
  const int s = 24;
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width * s << "\" height=\"" << height * s << "\" viewBox=\"0 0 "
    << width * s << " " << height * s << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << width * s << "\" height=\"" << height * s << "\" fill=\"#ffffff\"/>\n";
  auto line = [&](double x1, double y1, double x2, double y2) {
    o << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
      << "\" stroke=\"#d0021b\" stroke-width=\"3\"/>\n";
  };
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const Tile& t = at(r, c);
      double x0 = c * s, y0 = r * s, cx = x0 + s / 2.0, cy = y0 + s / 2.0;
      bool bad = !ts.contains(t);
      o << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << s << "\" height=\"" << s << "\" fill=\""
        << (bad ? "#888888" : "#f4f4f4") << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
      if (ts.horizontal_arm(t)) line(x0, cy, x0 + s, cy);
      if (ts.vertical_arm(t)) line(cx, y0, cx, y0 + s);
      switch (ts.corner_role(t)) {
        case CornerRole::tl: line(cx, cy, x0 + s, cy); line(cx, cy, cx, y0 + s); break;
        case CornerRole::tr: line(x0, cy, cx, cy); line(cx, cy, cx, y0 + s); break;
        case CornerRole::br: line(x0, cy, cx, cy); line(cx, y0, cx, cy); break;
        case CornerRole::bl: line(cx, cy, x0 + s, cy); line(cx, y0, cx, cy); break;
        default: break;
      }
    }
  o << "</svg>\n";
  return o.str();
}

namespace {

class Solver {
 public:
  Solver(int L, int H, const TileSet& ts, std::size_t limit, std::uint64_t budget)
      : L_(L), H_(H), ts_(ts), limit_(limit), budget_(budget), nt_(static_cast<int>(ts.tiles.size())), words_((nt_ + 63) / 64) {
    for (int side = 0; side < 4; ++side)
      for (int lab = 0; lab <= kLabels; ++lab) by_label_[side][lab].assign(static_cast<std::size_t>(words_), 0);
    for (int i = 0; i < nt_; ++i)
      for (int side = 0; side < 4; ++side) set_bit(by_label_[side][ts.tiles[static_cast<std::size_t>(i)][static_cast<std::size_t>(side)]], i);
  }

  SolveResult run(const std::vector<Pin>& pins) {
    std::vector<std::uint64_t> dom(static_cast<std::size_t>(L_ * H_ * words_), 0);
    for (int cell = 0; cell < L_ * H_; ++cell)
      for (int i = 0; i < nt_; ++i) set_bit(&dom[static_cast<std::size_t>(cell * words_)], i);
    for (const auto& p : pins) {
      if (p.row < 0 || p.row >= H_ || p.col < 0 || p.col >= L_) fail_invalid("pin outside the rectangle");
      auto it = std::lower_bound(ts_.tiles.begin(), ts_.tiles.end(), p.tile);
      std::uint64_t* d = &dom[static_cast<std::size_t>((p.row * L_ + p.col) * words_)];
      std::vector<std::uint64_t> keep(static_cast<std::size_t>(words_), 0);
      if (it != ts_.tiles.end() && *it == p.tile) {
        int idx = static_cast<int>(it - ts_.tiles.begin());
        if (test_bit(d, idx)) set_bit(keep.data(), idx);
      }
      std::copy(keep.begin(), keep.end(), d);
    }
    std::vector<int> queue;
    for (int c = 0; c < L_ * H_; ++c) queue.push_back(c);
    if (propagate(dom, queue)) search(dom);
    result_.exhausted = !result_.budget_hit && result_.tilings.size() < limit_;
    return std::move(result_);
  }

 private:
  static void set_bit(std::vector<std::uint64_t>& v, int i) { v[static_cast<std::size_t>(i / 64)] |= 1ULL << (i % 64); }
  static void set_bit(std::uint64_t* v, int i) { v[i / 64] |= 1ULL << (i % 64); }
  static bool test_bit(const std::uint64_t* v, int i) { return (v[i / 64] >> (i % 64)) & 1ULL; }

  int count(const std::uint64_t* d) const {
    int n = 0;
    for (int w = 0; w < words_; ++w) n += __builtin_popcountll(d[w]);
    return n;
  }

  // Labels on `side` present in the domain.
  unsigned labels(const std::uint64_t* d, int side) const {
    unsigned mask = 0;
    for (int w = 0; w < words_; ++w) {
      std::uint64_t bits = d[w];
      while (bits) {
        int b = __builtin_ctzll(bits);
        bits &= bits - 1;
        mask |= 1u << ts_.tiles[static_cast<std::size_t>(w * 64 + b)][static_cast<std::size_t>(side)];
      }
    }
    return mask;
  }

  // Restrict cell `to` so that its `to_side` edge matches some `from_side` label of `from`.
  bool revise(std::vector<std::uint64_t>& dom, int from, int from_side, int to, int to_side, bool& changed) {
    unsigned lab = labels(&dom[static_cast<std::size_t>(from * words_)], from_side);
    std::vector<std::uint64_t> allowed(static_cast<std::size_t>(words_), 0);
    for (int a = 1; a <= kLabels; ++a)
      if (lab & (1u << a)) {
        const auto& m = by_label_[to_side][ts_.match[static_cast<std::size_t>(a)]];
        for (int w = 0; w < words_; ++w) allowed[static_cast<std::size_t>(w)] |= m[static_cast<std::size_t>(w)];
      }
    std::uint64_t* d = &dom[static_cast<std::size_t>(to * words_)];
    changed = false;
    bool nonempty = false;
    for (int w = 0; w < words_; ++w) {
      std::uint64_t nv = d[w] & allowed[static_cast<std::size_t>(w)];
      if (nv != d[w]) changed = true;
      d[w] = nv;
      if (nv) nonempty = true;
    }
    return nonempty;
  }

  bool propagate(std::vector<std::uint64_t>& dom, std::vector<int>& queue) {
    std::vector<char> inq(static_cast<std::size_t>(L_ * H_), 0);
    for (int c : queue) inq[static_cast<std::size_t>(c)] = 1;
    std::size_t head = 0;
    while (head < queue.size()) {
      int c = queue[head++];
      inq[static_cast<std::size_t>(c)] = 0;
      int r = c / L_, x = c % L_;
      struct Nb {
        int cell, from_side, to_side;
      };
      Nb nbs[4];
      int k = 0;
      if (x + 1 < L_) nbs[k++] = {c + 1, 1, 3};
      if (x > 0) nbs[k++] = {c - 1, 3, 1};
      if (r + 1 < H_) nbs[k++] = {c + L_, 2, 0};
      if (r > 0) nbs[k++] = {c - L_, 0, 2};
      for (int i = 0; i < k; ++i) {
        bool changed = false;
        if (!revise(dom, c, nbs[i].from_side, nbs[i].cell, nbs[i].to_side, changed)) return false;
        if (changed && !inq[static_cast<std::size_t>(nbs[i].cell)]) {
          inq[static_cast<std::size_t>(nbs[i].cell)] = 1;
          queue.push_back(nbs[i].cell);
        }
      }
      if (head > 4096 && head * 2 > queue.size()) {
        queue.erase(queue.begin(), queue.begin() + static_cast<long>(head));
        head = 0;
      }
    }
    return true;
  }

  void search(std::vector<std::uint64_t>& dom) {
    if (result_.tilings.size() >= limit_ || result_.budget_hit) return;
    if (++result_.nodes > budget_) {
      result_.budget_hit = true;
      return;
    }
    int best = -1, best_n = 1 << 30;
    for (int c = 0; c < L_ * H_; ++c) {
      int n = count(&dom[static_cast<std::size_t>(c * words_)]);
      if (n > 1 && n < best_n) {
        best = c;
        best_n = n;
      }
    }
    if (best < 0) {
      Tiling t;
      t.width = L_;
      t.height = H_;
      for (int c = 0; c < L_ * H_; ++c) {
        const std::uint64_t* d = &dom[static_cast<std::size_t>(c * words_)];
        for (int w = 0; w < words_; ++w)
          if (d[w]) {
            t.cells.push_back(ts_.tiles[static_cast<std::size_t>(w * 64 + __builtin_ctzll(d[w]))]);
            break;
          }
      }
      result_.tilings.push_back(std::move(t));
      return;
    }
    std::vector<std::uint64_t> saved(dom.begin() + best * words_, dom.begin() + (best + 1) * words_);
    for (int i = 0; i < nt_; ++i) {
      if (!test_bit(saved.data(), i)) continue;
      std::vector<std::uint64_t> next = dom;
      std::uint64_t* d = &next[static_cast<std::size_t>(best * words_)];
      std::fill(d, d + words_, 0);
      set_bit(d, i);
      std::vector<int> queue{best};
      if (propagate(next, queue)) search(next);
      if (result_.tilings.size() >= limit_ || result_.budget_hit) return;
    }
  }

  int L_, H_;
  const TileSet& ts_;
  std::size_t limit_;
  std::uint64_t budget_;
  int nt_, words_;
  std::vector<std::uint64_t> by_label_[4][kLabels + 1];
  SolveResult result_;
};

}  // namespace

SolveResult solve_tiling(int L, int H, const TileSet& ts, const std::vector<Pin>& pins, std::size_t limit, std::uint64_t node_budget) {
  if (L < 1 || H < 1) fail_invalid("solve_tiling: dimensions must be positive");
  if (limit == 0) return {};
  Solver s(L, H, ts, limit, node_budget);
  return s.run(pins);
}

SegmentCount count_red_segments(const Tiling& t, const TileSet& ts, int n) {
  if (n < 1) fail_invalid("count_red_segments: n must be at least 1");
  SegmentCount sc;
  long long len = 1;
  for (int i = 0; i < n; ++i) len *= 4;
  const long long arms = len - 1;
  auto matched = [&](const Tile& a, int sa, const Tile& b, int sb) {
    return ts.match[static_cast<std::size_t>(a[static_cast<std::size_t>(sa)])] == b[static_cast<std::size_t>(sb)];
  };
  for (int r = 0; r < t.height; ++r)
    for (int c = 0; c + arms + 1 < t.width; ++c) {
      CornerRole a = ts.corner_role(t.at(r, c));
      if (a != CornerRole::tl && a != CornerRole::bl) continue;
      bool ok = true;
      for (long long k = 1; k <= arms && ok; ++k) ok = ts.horizontal_arm(t.at(r, c + static_cast<int>(k)));
      for (long long k = 0; k <= arms && ok; ++k) ok = matched(t.at(r, c + static_cast<int>(k)), 1, t.at(r, c + static_cast<int>(k) + 1), 3);
      if (!ok) continue;
      CornerRole b = ts.corner_role(t.at(r, c + static_cast<int>(arms) + 1));
      if (a == CornerRole::tl && b == CornerRole::tr) sc.top++;
      if (a == CornerRole::bl && b == CornerRole::br) sc.bottom++;
    }
  for (int c = 0; c < t.width; ++c)
    for (int r = 0; r + arms + 1 < t.height; ++r) {
      CornerRole a = ts.corner_role(t.at(r, c));
      if (a != CornerRole::tl && a != CornerRole::tr) continue;
      bool ok = true;
      for (long long k = 1; k <= arms && ok; ++k) ok = ts.vertical_arm(t.at(r + static_cast<int>(k), c));
      for (long long k = 0; k <= arms && ok; ++k) ok = matched(t.at(r + static_cast<int>(k), c), 2, t.at(r + static_cast<int>(k) + 1, c), 0);
      if (!ok) continue;
      CornerRole b = ts.corner_role(t.at(r + static_cast<int>(arms) + 1, c));
      if (a == CornerRole::tl && b == CornerRole::bl) sc.left++;
      if (a == CornerRole::tr && b == CornerRole::br) sc.right++;
    }
  return sc;
}

SegmentBounds segment_bounds(long long L, long long H, int n) {
  if (n < 1) fail_invalid("segment_bounds: n must be at least 1");
  if (L < 0 || H < 0) fail_invalid("segment_bounds: negative size");
  long long q = 1LL << (2 * n + 1);
  long long fh = H / q, fl = L / q;
  return {4 * fh * fl - 2 * (fh + fl), 4 * fh * fl + 2 * (fh + fl)};
}

RigidityBound rigidity_bound(long long L, long long H, int n, long long d) {
  if (d < 0) fail_invalid("rigidity_bound: negative defect count");
  long long raw = segment_bounds(L, H, n).lower - 8 * d;
  return {raw, std::max(0LL, raw)};
}

Tiling inject_defects(const Tiling& t, const std::vector<std::pair<int, int>>& cells, const TileSet& ts) {
  std::set<std::pair<int, int>> seen;
  for (const auto& rc : cells)
    if (!seen.insert(rc).second) fail_invalid("inject_defects: duplicate cell");
  Tiling out = t;
  for (auto [r, c] : cells) {
    if (r < 0 || r >= t.height || c < 0 || c >= t.width) fail_invalid("inject_defects: cell outside the tiling");
    // Change the first edge that admits a label outside both closures; keeps three edges intact.
    const Tile orig = t.at(r, c);
    bool done = false;
    for (int side = 0; side < 4 && !done; ++side)
      for (int lab = 1; lab <= kLabels && !done; ++lab) {
        Tile cand = orig;
        cand[static_cast<std::size_t>(side)] = lab;
        if (!ts.contains(cand) && !ts.contains_rotated(cand)) {
          out.at(r, c) = cand;
          done = true;
        }
      }
    if (!done) {
      for (int i = 0; i < kTupleSpace && !done; ++i) {
        Tile cand = tuple_from_index(i);
        if (!ts.contains(cand) && !ts.contains_rotated(cand)) {
          out.at(r, c) = cand;
          done = true;
        }
      }
    }
    if (!done) fail_invalid("inject_defects: no tuple outside the tile set");
  }
  return out;
}

Tiling pattern_window(const TileSet& ts, int L, int H, int row_offset, int col_offset) {
  if (ts.pattern.empty()) fail_invalid("tileset has no periodic pattern");
  int p = static_cast<int>(ts.pattern.size());
  Tiling t;
  t.width = L;
  t.height = H;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < L; ++c)
      t.cells.push_back(ts.pattern[static_cast<std::size_t>(((r + row_offset) % p + p) % p)][static_cast<std::size_t>(((c + col_offset) % p + p) % p)]);
  return t;
}

Pin parse_pin(const std::string& spec) {
  Pin p{};
  int a, b, c, d;
  char tail;
  if (std::sscanf(spec.c_str(), "%d,%d=%d,%d,%d,%d%c", &p.row, &p.col, &a, &b, &c, &d, &tail) != 6)
    fail_invalid("pin must look like r,c=a,b,c,d: " + spec);
  p.tile = {a, b, c, d};
  for (int v : p.tile) check_label(v);
  return p;
}

}  // namespace gf
