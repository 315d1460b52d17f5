// SPDX-License-Identifier: Apache-2.0
#include "core/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace gf {

FusedSiteSpace::FusedSiteSpace(const TileSet& tiles, const RuleSet& rules) : ts(&tiles), rs(&rules), C(rules.dim() + 1) {}

namespace {

using Quad = std::array<int, 4>;

// Argument permutation for U^dagger with U|t r b l> = |l t r b>.
Quad turn(const Quad& x) { return {x[1], x[2], x[3], x[0]}; }

Tile apply_t(const Tile& t, const TileSet& ts, int times) {
  Tile x = t;
  for (int i = 0; i < ((times % 4) + 4) % 4; ++i) x = site_rotate_tuple(x, ts.match);
  return x;
}

int role_index(CornerRole r) {
  switch (r) {
    case CornerRole::tl: return 1;
    case CornerRole::tr: return 2;
    case CornerRole::br: return 3;
    case CornerRole::bl: return 4;
    default: return 0;
  }
}

}  // namespace

FusionGeometry::FusionGeometry(const TileSet& ts) : cls(static_cast<std::size_t>(kTupleSpace), 0) {
  // Role-1 predicate: tl corners plus the pre-images of the other roles under the site rotation.
  std::set<int> p1;
  for (const auto& [role, tile] : ts.corners) {
    const int k = role_index(role);
    if (k == 0) continue;
    p1.insert(tuple_index(apply_t(tile, ts, -(k - 1))));
  }
  std::vector<std::set<int>> roles(4);
  for (int k = 0; k < 4; ++k)
    for (int idx : p1) roles[static_cast<std::size_t>(k)].insert(tuple_index(apply_t(tuple_from_index(idx), ts, k)));
  for (int k = 0; k < 4; ++k)
    for (int j = k + 1; j < 4; ++j)
      for (int idx : roles[static_cast<std::size_t>(k)])
        if (roles[static_cast<std::size_t>(j)].count(idx)) fail_invalid("corner tuples overlap under rotation");

  for (int pt = 0; pt < kLabels; ++pt)
    for (int pr = 0; pr < kLabels; ++pr)
      for (int pb = 0; pb < kLabels; ++pb)
        for (int pl = 0; pl < kLabels; ++pl) {
          const Tile t = inner_tuple({pt, pr, pb, pl}, ts);
          const int idx = tuple_index(t);
          unsigned c = 0;
          if (!ts.member_rot[static_cast<std::size_t>(idx)]) c |= kDefect;
          if (ts.horizontal_arm(t)) c |= kHarm;
          if (ts.vertical_arm(t)) c |= kVarm;
          for (int k = 0; k < 4; ++k)
            if (roles[static_cast<std::size_t>(k)].count(idx)) c |= kRole1 << k;
          cls[static_cast<std::size_t>(key(pt, pr, pb, pl))] = static_cast<unsigned char>(c);
        }
}

unsigned FusionGeometry::of_tuple(const Tile& t, const TileSet& ts) const {
  const auto& m = ts.match;
  // Pair state index is first - 1; the top and left sites store the partner label first.
  return at(m[static_cast<std::size_t>(t[0])] - 1, t[1] - 1, t[2] - 1, m[static_cast<std::size_t>(t[3])] - 1);
}

int FusionGeometry::role(unsigned c) {
  for (int k = 0; k < 4; ++k)
    if (c & (kRole1 << k)) return k + 1;
  return 0;
}

struct FusionKernel {
  struct Pattern {
    bool vertical = false;
    std::vector<unsigned char> a, b;
    std::array<bool, 3> a_kind{}, b_kind{};  // some state of that kind lies in the set
  };

  FusedSiteSpace space;
  FusionGeometry geo;
  double weight;
  std::vector<Pattern> patterns;

  FusionKernel(const FusedSiteSpace& s, double w) : space(s), geo(*s.ts), weight(w) {
    const auto& rs = *s.rs;
    auto add = [&](const std::vector<std::pair<int, int>>& pairs, bool vertical) {
      for (const auto& [a, b] : pairs) {
        Pattern p;
        p.vertical = vertical;
        p.a.assign(static_cast<std::size_t>(s.C), 0);
        p.b.assign(static_cast<std::size_t>(s.C), 0);
        p.a[static_cast<std::size_t>(a)] = 1;
        p.b[static_cast<std::size_t>(b)] = 1;
        p.a_kind[static_cast<std::size_t>(s.kind(a))] = true;
        p.b_kind[static_cast<std::size_t>(s.kind(b))] = true;
        patterns.push_back(std::move(p));
      }
    };
    add(rs.horizontal_orientation, false);
    add(rs.vertical_orientation, true);
  }

  Quad kinds(const Quad& k) const { return {space.kind(k[0]), space.kind(k[1]), space.kind(k[2]), space.kind(k[3])}; }

  double segment(const Quad& p, const Quad& kd) const {
    const bool arm = geo.at(p[0], p[1], p[2], p[3]) & FusionGeometry::kHarm;
    const bool q = kd[3] == 2 && kd[1] == 2;
    return arm != q ? weight : 0.0;
  }
  static bool detected(const Quad& kd) { return kd[0] == 1 && kd[3] == 1 && kd[1] == 2 && kd[2] == 2; }
  bool is_corner(const Quad& p) const { return FusionGeometry::role(geo.at(p[0], p[1], p[2], p[3])) == 1; }
  double corner(const Quad& p, const Quad& kd) const { return is_corner(p) != detected(kd) ? 1.0 : 0.0; }
  bool pattern_hit(const Pattern& pt, const Quad& k) const {
    const int X = space.marker();
    if (!pt.vertical) return k[0] == X && pt.a[static_cast<std::size_t>(k[3])] && pt.b[static_cast<std::size_t>(k[1])];
    return k[3] == X && pt.a[static_cast<std::size_t>(k[0])] && pt.b[static_cast<std::size_t>(k[2])];
  }
  bool pattern_possible(const Pattern& pt, const Quad& kd) const {
    const auto A = [](const std::array<bool, 3>& s, int kind) { return s[static_cast<std::size_t>(kind)]; };
    if (!pt.vertical) return kd[0] == 1 && A(pt.a_kind, kd[3]) && A(pt.b_kind, kd[1]);
    return kd[3] == 1 && A(pt.a_kind, kd[0]) && A(pt.b_kind, kd[2]);
  }
  double orientation(const Quad& k) const {
    double e = 0.0;
    Quad x = k;
    for (int j = 0; j < 4; ++j, x = turn(x))
      for (const auto& pt : patterns) e += pattern_hit(pt, x) ? 1.0 : 0.0;
    return e;
  }
  bool orientation_possible(const Quad& kd) const {
    Quad x = kd;
    for (int j = 0; j < 4; ++j, x = turn(x))
      for (const auto& pt : patterns)
        if (pattern_possible(pt, x)) return true;
    return false;
  }
};

namespace {

void decode(std::uint64_t col, std::size_t d, int C, Quad& p, Quad& k) {
  for (int i = 3; i >= 0; --i) {
    const auto s = static_cast<int>(col % d);
    col /= d;
    p[static_cast<std::size_t>(i)] = s / C;
    k[static_cast<std::size_t>(i)] = s % C;
  }
}

using QuadFn = std::function<double(const Quad& p, const Quad& k)>;

class FnTerm : public LocalTerm {
 public:
  FnTerm(const FusedSiteSpace& s, QuadFn f, const std::string& tag) : LocalTerm(4, s.dim(), tag), C_(s.C), f_(std::move(f)) {}
  void column(std::uint64_t col, std::vector<Entry>& out) const override {
    Quad p, k;
    decode(col, site_dim(), C_, p, k);
    const double v = f_(p, k);
    if (v != 0.0) out.push_back({col, cplx(v, 0.0)});
  }
  bool is_diagonal() const override { return true; }

 private:
  int C_;
  QuadFn f_;
};

std::shared_ptr<const FusionKernel> make_kernel(const FusedSiteSpace& s, double w = 0.25) {
  if (s.ts->arm_pairs.empty()) fail_invalid("arm pair set is empty under the loaded tile set");
  return std::make_shared<FusionKernel>(s, w);
}

// Composes a generator with the (n-1)-fold argument turn: the n-th rotation image.
QuadFn rotated(QuadFn g, int times) {
  return [g = std::move(g), times](const Quad& p, const Quad& k) {
    Quad pp = p, kk = k;
    for (int i = 0; i < times; ++i) {
      pp = turn(pp);
      kk = turn(kk);
    }
    return g(pp, kk);
  };
}

void check_which(int which) {
  if (which < 1 || which > 4) fail_invalid("corner index must be 1..4");
}

}  // namespace

TermPtr corner_projector(const FusedSiteSpace& space, int which) {
  check_which(which);
  auto K = make_kernel(space);
  QuadFn g = [K](const Quad& p, const Quad& k) { return K->is_corner(p) && FusionKernel::detected(K->kinds(k)) ? 1.0 : 0.0; };
  return std::make_shared<FnTerm>(space, rotated(g, which - 1), "corner_projector_" + std::to_string(which));
}

TermPtr corner_term(const FusedSiteSpace& space, int which) {
  check_which(which);
  auto K = make_kernel(space);
  QuadFn g = [K](const Quad& p, const Quad& k) { return K->corner(p, K->kinds(k)); };
  return std::make_shared<FnTerm>(space, rotated(g, which - 1), "h_n" + std::to_string(which));
}

std::pair<TermPtr, TermPtr> build_segment_terms(const FusedSiteSpace& space, double weight) {
  auto K = make_kernel(space, weight);
  QuadFn g = [K](const Quad& p, const Quad& k) { return K->segment(p, K->kinds(k)); };
  return {std::make_shared<FnTerm>(space, g, "h_sh"), std::make_shared<FnTerm>(space, rotated(g, 1), "h_sv")};
}

std::vector<TermPtr> build_orientation_terms(const FusedSiteSpace& space) {
  auto K = make_kernel(space);
  if (K->patterns.empty() || space.rs->horizontal_orientation.empty() || space.rs->vertical_orientation.empty())
    fail_invalid("layout missing arrow states for the orientation terms");
  std::vector<TermPtr> out;
  for (int j = 0; j < 4; ++j)
    for (std::size_t i = 0; i < K->patterns.size(); ++i) {
      QuadFn g = [K, i](const Quad&, const Quad& k) { return K->pattern_hit(K->patterns[i], k) ? 1.0 : 0.0; };
      out.push_back(std::make_shared<FnTerm>(space, rotated(g, j), "h_c" + std::to_string(i + 1) + "_r" + std::to_string(j)));
    }
  return out;
}

FusedTerm::FusedTerm(const FusedSiteSpace& space, unsigned components, const FusionOptions& opt)
    : LocalTerm(4, space.dim(), "h_f"), kernel_(make_kernel(space, opt.segment_weight)), components_(components), C_(space.C) {
  const auto& rs = *space.rs;
  const auto& ts = *space.ts;
  if (components_ & kOrient) {
    if (kernel_->patterns.empty() || rs.horizontal_orientation.empty() || rs.vertical_orientation.empty())
      fail_invalid("layout missing arrow states for the orientation terms");
  }
  if (components_ & (kSh | kSv)) {
    // h_sh + h_sv is rotation invariant only if the arm set is closed under the half turn.
    for (const auto& [a, b] : ts.arm_pairs) {
      const auto half = std::make_pair(ts.match[static_cast<std::size_t>(b)], ts.match[static_cast<std::size_t>(a)]);
      if (std::find(ts.arm_pairs.begin(), ts.arm_pairs.end(), half) == ts.arm_pairs.end())
        fail_invalid("arm pairs are not closed under the half turn");
    }
  }
  for (const auto& r : rs.rules)
    if (space.kind(r.a) != space.kind(r.c) || space.kind(r.b) != space.kind(r.d)) kinds_conserved_ = false;

  const int C = space.C;
  const int n = rs.dim();
  pairs_.assign(static_cast<std::size_t>(C * C), PairEntry{});
  build_tables();
  if (!(components_ & kHq)) return;
  const double s = rs.transition_scale;
  const bool halt = opt.halting && rs.has_halt_marker;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      PairEntry& e = pairs_[static_cast<std::size_t>(x * C + y)];
      e.diag = rs.pair_illegal(x, y) ? 1.0 : 0.0;
      if (halt) e.diag += 0.5 * (rs.halting[static_cast<std::size_t>(x)] + rs.halting[static_cast<std::size_t>(y)]);
      const auto at = static_cast<std::size_t>(x * n + y);
      if (const int f = rs.forward[at]; f >= 0) {
        const auto& r = rs.rules[static_cast<std::size_t>(f)];
        e.diag += s;
        e.moves.emplace_back(r.c * C + r.d, -s * r.phase);
      }
      if (const int b = rs.backward[at]; b >= 0) {
        const auto& r = rs.rules[static_cast<std::size_t>(b)];
        e.diag += s;
        e.moves.emplace_back(r.a * C + r.b, -s * std::conj(r.phase));
      }
      if (!e.moves.empty()) offdiag_ = true;
    }
  // The (l,r) and (t,b) embeddings map onto each other under rotation only for a swap-symmetric pair term.
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const auto& e = pair(x, y);
      const auto& f = pair(y, x);
      bool ok = e.diag == f.diag && e.moves.size() == f.moves.size();
      for (const auto& [t, v] : e.moves) {
        const int mirrored = (t % C) * C + t / C;
        ok = ok && std::any_of(f.moves.begin(), f.moves.end(), [&](const auto& m) { return m.first == mirrored && m.second == v; });
      }
      if (!ok) fail_invalid("chain pair term is not reflection symmetric; the plaquette embedding would break rotation invariance");
    }
}

void FusedTerm::build_tables() {
  const auto& K = *kernel_;
  const int C = C_;
  kind_.resize(static_cast<std::size_t>(C));
  split_.resize(static_cast<std::size_t>(kLabels * C));
  for (int x = 0; x < kLabels * C; ++x) split_[static_cast<std::size_t>(x)] = {x / C, x % C};
  for (int k = 0; k < C; ++k) kind_[static_cast<std::size_t>(k)] = K.space.kind(k);
  // Byte codes into a short value list keep the table cache resident.
  class_tab_.assign(static_cast<std::size_t>(kTupleSpace) * 81, 0);
  std::map<double, unsigned char> codes;
  class_vals_.clear();
  for (int key = 0; key < kTupleSpace; ++key) {
    const Quad p{key / 1728, (key / 144) % 12, (key / 12) % 12, key % 12};
    for (int c = 0; c < 81; ++c) {
      const double v = class_energy(p, {c / 27, (c / 9) % 3, (c / 3) % 3, c % 3});
      auto [it, fresh] = codes.emplace(v, static_cast<unsigned char>(class_vals_.size()));
      if (fresh) {
        if (class_vals_.size() == 256) fail_invariant("too many distinct class energies");
        class_vals_.push_back(v);
      }
      class_tab_[static_cast<std::size_t>(key) * 81 + static_cast<std::size_t>(c)] = it->second;
    }
  }
  // States with equal marker flag and pattern memberships behave alike under the orientation terms.
  std::map<std::vector<int>, int> ids;
  std::vector<int> rep;
  sig_.resize(static_cast<std::size_t>(C));
  for (int k = 0; k < C; ++k) {
    std::vector<int> key{k == K.space.marker()};
    for (const auto& pt : K.patterns) {
      key.push_back(pt.a[static_cast<std::size_t>(k)]);
      key.push_back(pt.b[static_cast<std::size_t>(k)]);
    }
    auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()));
    if (fresh) rep.push_back(k);
    sig_[static_cast<std::size_t>(k)] = it->second;
  }
  sigs_ = static_cast<int>(ids.size());
  const auto S = static_cast<std::size_t>(sigs_);
  orient_tab_.assign(S * S * S * S, 0.0);
  if (!(components_ & kOrient)) return;
  for (std::size_t i = 0; i < orient_tab_.size(); ++i) {
    const Quad k{rep[i / (S * S * S)], rep[(i / (S * S)) % S], rep[(i / S) % S], rep[i % S]};
    orient_tab_[i] = K.orientation(k);
  }
}

const FusedSiteSpace& FusedTerm::space() const { return kernel_->space; }

double FusedTerm::class_energy(const Quad& p, const Quad& kd) const {
  const auto& K = *kernel_;
  double e = 0.0;
  if (components_ & kHc) e += (K.geo.at(p[0], p[1], p[2], p[3]) & FusionGeometry::kDefect) ? 1.0 : 0.0;
  if (components_ & kSh) e += K.segment(p, kd);
  if (components_ & kSv) e += K.segment(turn(p), turn(kd));
  if (components_ & kCorner) {
    Quad pp = p, kk = kd;
    for (int j = 0; j < 4; ++j, pp = turn(pp), kk = turn(kk)) e += K.corner(pp, kk);
  }
  return e;
}

double FusedTerm::diag(const Quad& p, const Quad& k) const {
  const auto K = [&](int i) { return kind_[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])]; };
  const auto G = [&](int i) { return static_cast<std::size_t>(sig_[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])]); };
  const auto key = static_cast<std::size_t>(FusionGeometry::key(p[0], p[1], p[2], p[3]));
  double e = class_vals_[class_tab_[key * 81 + static_cast<std::size_t>(((K(0) * 3 + K(1)) * 3 + K(2)) * 3 + K(3))]];
  if (components_ & kOrient) {
    const auto S = static_cast<std::size_t>(sigs_);
    e += orient_tab_[((G(0) * S + G(1)) * S + G(2)) * S + G(3)];
  }
  if (components_ & kHq) e += pair(k[3], k[1]).diag + pair(k[0], k[2]).diag;
  return e;
}

void FusedTerm::column(std::uint64_t col, std::vector<Entry>& out) const {
  Quad p, k;
  const std::size_t d = site_dim();
  if (dim() <= 0xffffffffULL) {
    auto c = static_cast<std::uint32_t>(col);
    const auto d32 = static_cast<std::uint32_t>(d);
    for (int i = 3; i >= 0; --i) {
      const auto& [pp, kk] = split_[c % d32];
      c /= d32;
      p[static_cast<std::size_t>(i)] = pp;
      k[static_cast<std::size_t>(i)] = kk;
    }
  } else {
    decode(col, d, C_, p, k);
  }
  const double dv = diag(p, k);
  if (dv != 0.0) out.push_back({col, cplx(dv, 0.0)});
  if (!offdiag_) return;
  const std::uint64_t w1 = d * d, w2 = d, w3 = 1, w0 = d * d * d;
  auto moves = [&](int a, int b, std::uint64_t wa, std::uint64_t wb) {
    for (const auto& [t, v] : pair(k[static_cast<std::size_t>(a)], k[static_cast<std::size_t>(b)]).moves) {
      const auto na = static_cast<std::int64_t>(t / C_) - k[static_cast<std::size_t>(a)];
      const auto nb = static_cast<std::int64_t>(t % C_) - k[static_cast<std::size_t>(b)];
      const auto row = static_cast<std::uint64_t>(static_cast<std::int64_t>(col) + na * static_cast<std::int64_t>(wa) +
                                                  nb * static_cast<std::int64_t>(wb));
      out.push_back({row, v});
    }
  };
  moves(3, 1, w3, w1);
  moves(0, 2, w0, w2);
}

std::shared_ptr<const FusedTerm> assemble_hf(const FusedSiteSpace& space, const FusionOptions& opt) {
  unsigned comp = kHc | kHq | kSh | kSv;
  if (opt.orientation_terms) comp |= kOrient;
  if (opt.corner_terms) comp |= kCorner;
  return std::make_shared<FusedTerm>(space, comp, opt);
}

std::vector<int> tiling_pair_states(const Lattice& lat, const Tiling& t, const TileSet& ts) {
  if (t.width != lat.L || t.height != lat.H) fail_invalid("tiling size does not match the lattice");
  if (!t.edges_match(ts)) fail_invalid("tiling edges do not match; pair states undefined");
  const auto& m = ts.match;
  std::vector<int> s(static_cast<std::size_t>(lat.num_sites), -1);
  for (int y = 0; y <= lat.H; ++y)
    for (int x = 0; x < lat.L; ++x)
      s[static_cast<std::size_t>(lat.horizontal(x, y))] =
          (y < lat.H ? m[static_cast<std::size_t>(t.at(y, x)[0])] : t.at(lat.H - 1, x)[2]) - 1;
  for (int y = 0; y < lat.H; ++y)
    for (int x = 0; x <= lat.L; ++x)
      s[static_cast<std::size_t>(lat.vertical(x, y))] =
          (x < lat.L ? m[static_cast<std::size_t>(t.at(y, x)[3])] : t.at(y, lat.L - 1)[1]) - 1;
  return s;
}

Tiling tiling_from_pair_states(const Lattice& lat, const std::vector<int>& pairs, const TileSet& ts) {
  if (pairs.size() != static_cast<std::size_t>(lat.num_sites)) fail_invalid("pair state count does not match the lattice");
  Tiling t;
  t.width = lat.L;
  t.height = lat.H;
  t.cells.resize(static_cast<std::size_t>(lat.L * lat.H));
  for (int y = 0; y < lat.H; ++y)
    for (int x = 0; x < lat.L; ++x) {
      const auto& q = lat.plaquette(x, y);
      t.at(y, x) = inner_tuple({pairs[static_cast<std::size_t>(q[0])], pairs[static_cast<std::size_t>(q[1])],
                                pairs[static_cast<std::size_t>(q[2])], pairs[static_cast<std::size_t>(q[3])]},
                               ts);
    }
  return t;
}

std::vector<FusedSegment> fused_segments(const Tiling& t, const TileSet& ts) {
  const FusionGeometry geo(ts);
  std::vector<unsigned> cls(t.cells.size());
  for (std::size_t i = 0; i < t.cells.size(); ++i) cls[i] = geo.of_tuple(t.cells[i], ts);
  auto at = [&](int r, int c) { return cls[static_cast<std::size_t>(r * t.width + c)]; };
  auto matched = [&](const Tile& a, int sa, const Tile& b, int sb) {
    return ts.match[static_cast<std::size_t>(a[static_cast<std::size_t>(sa)])] == b[static_cast<std::size_t>(sb)];
  };
  std::vector<FusedSegment> out;
  // Rows start at corners with a marker on the left site (roles 1, 4) and end at roles 2, 3.
  for (int r = 0; r < t.height; ++r)
    for (int c = 0; c < t.width; ++c) {
      const int a = FusionGeometry::role(at(r, c));
      if (a != 1 && a != 4) continue;
      int e = c + 1;
      while (e < t.width && (at(r, e) & FusionGeometry::kHarm) && matched(t.at(r, e - 1), 1, t.at(r, e), 3)) ++e;
      if (e >= t.width || !matched(t.at(r, e - 1), 1, t.at(r, e), 3)) continue;
      const int b = FusionGeometry::role(at(r, e));
      if (b == 2 || b == 3) out.push_back({r, c, true, e - c - 1});
    }
  // Columns start at roles 1, 2 (marker on top) and end at roles 4, 3.
  for (int c = 0; c < t.width; ++c)
    for (int r = 0; r < t.height; ++r) {
      const int a = FusionGeometry::role(at(r, c));
      if (a != 1 && a != 2) continue;
      int e = r + 1;
      while (e < t.height && (at(e, c) & FusionGeometry::kVarm) && matched(t.at(e - 1, c), 2, t.at(e, c), 0)) ++e;
      if (e >= t.height || !matched(t.at(e - 1, c), 2, t.at(e, c), 0)) continue;
      const int b = FusionGeometry::role(at(e, c));
      if (b == 4 || b == 3) out.push_back({r, c, false, e - r - 1});
    }
  return out;
}

int fused_defects(const Tiling& t, const TileSet& ts) {
  int d = 0;
  for (const auto& c : t.cells) d += ts.contains_rotated(c) ? 0 : 1;
  return d;
}

double classical_branch_energy(const Tiling& t, const TileSet& ts, const Lambda0Table& table) {
  double e = fused_defects(t, ts);
  for (const auto& s : fused_segments(t, ts)) {
    const auto v = table.lookup(s.length());
    if (!v) fail_invalid("missing lambda0 entry for chain length " + std::to_string(s.length()));
    e += *v;
  }
  return e;
}

EnergySearch min_energy_over_tilings(int L, int H, const TileSet& ts, const Lambda0Table& table, std::uint64_t budget) {
  for (const auto& e : table.entries)
    if (e.lambda0 < 0.0) fail_invalid("lambda0 entries must be non-negative");
  EnergySearch out;
  const SolveResult sr = solve_tiling(L, H, ts, {}, 100'000, budget);
  out.nodes = sr.nodes;
  out.energy = std::numeric_limits<double>::infinity();
  for (const auto& t : sr.tilings) {
    ++out.tilings_examined;
    const double e = classical_branch_energy(t, ts, table);
    if (e < out.energy) {
      out.energy = e;
      out.witness = t;
    }
    if (out.energy == 0.0) break;  // every energy is non-negative
  }
  if (sr.tilings.empty()) {
    // Without a valid tiling the energy is at least 1; the all-defect bound is the best known value.
    out.energy = static_cast<double>(L) * H;
    out.complete = false;
    return out;
  }
  // A defect costs 1, so once every defect-free tiling is scored a best value <= 1 is optimal.
  out.complete = out.energy == 0.0 || (sr.exhausted && out.energy <= 1.0);
  return out;
}

double segment_lambda0(const RuleSet& rs, int length, std::uint64_t budget) {
  ChainOptions opt;
  opt.halting = rs.has_halt_marker;
  opt.orientation = true;
  opt.any_length = true;
  opt.budget = budget;
  const auto h = build_chain_hamiltonian(length, rs, opt);
  return std::max(0.0, low_spectrum(h.op, 1, 1e-10).values.front());
}

namespace {

// Ground energy of the chain terms along one path, given the kinds of its sites.
class PathSolver {
 public:
  PathSolver(const FusedTerm& hf, std::uint64_t budget) : hf_(hf), budget_(budget) {}

  double operator()(const std::vector<int>& kinds) {
    double e = 0.0;
    std::size_t i = 0;
    while (i < kinds.size()) {
      if (kinds[i] == 0) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < kinds.size() && kinds[j] != 0) ++j;
      if (j - i >= 2) e += run(std::vector<int>(kinds.begin() + static_cast<long>(i), kinds.begin() + static_cast<long>(j)));
      i = j;
    }
    return e;
  }

 private:
  double run(const std::vector<int>& kinds) {
    auto it = cache_.find(kinds);
    if (it != cache_.end()) return it->second;
    const auto& sp = hf_.space();
    const int nc = sp.C - 2;
    std::vector<std::vector<int>> choices;
    std::uint64_t dim = 1;
    for (int k : kinds) {
      std::vector<int> c;
      if (k == 1) c.push_back(sp.marker());
      else
        for (int s = 0; s < nc; ++s) c.push_back(s);
      dim *= c.size();
      if (dim > budget_) fail_budget("path block exceeds budget " + std::to_string(budget_));
      choices.push_back(std::move(c));
    }
    // Mixed radix: position of each site's state within its choice list.
    auto state_of = [&](std::uint64_t idx) {
      std::vector<int> s(kinds.size());
      for (std::size_t q = kinds.size(); q-- > 0;) {
        s[q] = choices[q][idx % choices[q].size()];
        idx /= choices[q].size();
      }
      return s;
    };
    auto index_of = [&](const std::vector<int>& s) {
      std::uint64_t idx = 0;
      for (std::size_t q = 0; q < s.size(); ++q) {
        const auto& c = choices[q];
        idx = idx * c.size() + static_cast<std::uint64_t>(std::find(c.begin(), c.end(), s[q]) - c.begin());
      }
      return idx;
    };
    SparseOperator op(dim);
    for (std::uint64_t col = 0; col < dim; ++col) {
      const auto s = state_of(col);
      for (std::size_t q = 0; q + 1 < s.size(); ++q) {
        const auto& pe = hf_.pair(s[q], s[q + 1]);
        if (pe.diag != 0.0) op.add(col, col, pe.diag);
        for (const auto& [t, v] : pe.moves) {
          auto n = s;
          n[q] = t / sp.C;
          n[q + 1] = t % sp.C;
          op.add(index_of(n), col, v);
        }
      }
    }
    op.canonicalize();
    double e = op.triplets.empty() ? 0.0 : low_spectrum(op, 1, 1e-12).values.front();
    if (e < 0.0 && e > -1e-10) e = 0.0;  // chain terms are PSD; drop rounding noise so ties sort exactly
    cache_.emplace(kinds, e);
    return e;
  }

  const FusedTerm& hf_;
  std::uint64_t budget_;
  std::map<std::vector<int>, double> cache_;
};

}  // namespace

BlockSearch restricted_ground_energy(const Lattice& lat, const std::shared_ptr<const FusedTerm>& hf,
                                     const std::vector<int>& pairs, std::uint64_t block_budget) {
  const FusedTerm& H = *hf;
  if (!H.kinds_conserved()) fail_invalid("chain rules move a marker; the kind sectors are not invariant");
  const int N = lat.num_sites;
  if (N > 14) fail_budget("kind-sector search is limited to 14 sites");
  if (pairs.size() != static_cast<std::size_t>(N)) fail_invalid("pair state count does not match the lattice");
  const auto& sp = H.space();
  const auto nq = lat.plaquettes.size();

  std::uint64_t sectors = 1;
  for (int i = 0; i < N; ++i) sectors *= 3;
  // Class energy per plaquette for all 81 kind tuples.
  std::vector<std::array<double, 81>> cls(nq);
  std::vector<char> orient_any(81, 0);
  for (std::size_t q = 0; q < nq; ++q) {
    const auto& s = lat.plaquettes[q];
    const Quad p{pairs[static_cast<std::size_t>(s[0])], pairs[static_cast<std::size_t>(s[1])],
                 pairs[static_cast<std::size_t>(s[2])], pairs[static_cast<std::size_t>(s[3])]};
    for (int c = 0; c < 81; ++c) {
      const Quad kd{c / 27, (c / 9) % 3, (c / 3) % 3, c % 3};
      cls[q][static_cast<std::size_t>(c)] = H.class_energy(p, kd);
      if (q == 0) orient_any[static_cast<std::size_t>(c)] = (H.components() & kOrient) && H.kernel().orientation_possible(kd);
    }
  }
  // Chain paths: rows of vertical-edge sites and columns of horizontal-edge sites.
  std::vector<std::vector<int>> paths;
  for (int y = 0; y < lat.H; ++y) {
    std::vector<int> p;
    for (int x = 0; x <= lat.L; ++x) p.push_back(lat.vertical(x, y));
    paths.push_back(p);
  }
  for (int x = 0; x < lat.L; ++x) {
    std::vector<int> p;
    for (int y = 0; y <= lat.H; ++y) p.push_back(lat.horizontal(x, y));
    paths.push_back(p);
  }
  PathSolver path_energy(H, block_budget);

  std::vector<int> kind(static_cast<std::size_t>(N), 0);
  auto quad_code = [&](const std::array<int, 4>& s) {
    return ((kind[static_cast<std::size_t>(s[0])] * 3 + kind[static_cast<std::size_t>(s[1])]) * 3 +
            kind[static_cast<std::size_t>(s[2])]) * 3 + kind[static_cast<std::size_t>(s[3])];
  };
  auto set_kinds = [&](std::uint64_t code) {
    for (int i = N - 1; i >= 0; --i) {
      kind[static_cast<std::size_t>(i)] = static_cast<int>(code % 3);
      code /= 3;
    }
  };
  std::vector<std::pair<double, std::uint64_t>> bounds;
  bounds.reserve(static_cast<std::size_t>(sectors));
  std::vector<int> pk;
  for (std::uint64_t code = 0; code < sectors; ++code) {
    set_kinds(code);
    double lb = 0.0;
    for (std::size_t q = 0; q < nq; ++q) lb += cls[q][static_cast<std::size_t>(quad_code(lat.plaquettes[q]))];
    for (const auto& p : paths) {
      pk.clear();
      for (int s : p) pk.push_back(kind[static_cast<std::size_t>(s)]);
      lb += path_energy(pk);
    }
    bounds.emplace_back(lb, code);
  }
  std::sort(bounds.begin(), bounds.end());

  BlockSearch out;
  out.sectors = sectors;
  double best = std::numeric_limits<double>::infinity();
  const auto zero_site = std::shared_ptr<const LocalTerm>();
  for (const auto& [lb, code] : bounds) {
    if (lb >= best - 1e-12) break;
    set_kinds(code);
    bool orient = false;
    for (const auto& q : lat.plaquettes) orient = orient || orient_any[static_cast<std::size_t>(quad_code(q))];
    if (!orient) {
      // Remaining terms are constant or act on disjoint paths: the bound is the block energy.
      best = lb;
      continue;
    }
    std::vector<Config> basis(1, Config(static_cast<std::size_t>(N)));
    for (int i = 0; i < N; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const int p = pairs[si];
      std::vector<int> ks;
      if (kind[si] == 0) ks.push_back(sp.blank());
      else if (kind[si] == 1) ks.push_back(sp.marker());
      else
        for (int s = 0; s < sp.C - 2; ++s) ks.push_back(s);
      std::vector<Config> next;
      next.reserve(basis.size() * ks.size());
      for (const auto& c : basis)
        for (int k : ks) {
          Config n = c;
          n[si] = static_cast<std::uint16_t>(sp.index(p, k));
          next.push_back(std::move(n));
        }
      basis = std::move(next);
      if (basis.size() > block_budget) fail_budget("sector block exceeds budget " + std::to_string(block_budget));
    }
    out.largest_block = std::max<std::uint64_t>(out.largest_block, basis.size());
    const auto op = assemble_hamiltonian(lat, zero_site, hf, &basis);
    best = std::min(best, low_spectrum(op, 1, 1e-12).values.front());
    ++out.solved;
  }
  out.energy = best;
  return out;
}

}  // namespace gf
