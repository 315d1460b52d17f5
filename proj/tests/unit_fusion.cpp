// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "core/fusion.hpp"
#include "doctest.h"

using namespace gf;

namespace {

const TileSet& tiles() {
  static const TileSet ts = bundled_tileset();
  return ts;
}

const RuleSet& reduced() {
  static const RuleSet rs = load_ruleset_file(data_path("reduced_halting.json"));
  return rs;
}

// Sum of diagonal or sparse plaquette terms on a shared site space.
TermPtr total(const std::vector<TermPtr>& parts) {
  std::vector<std::pair<double, TermPtr>> v;
  for (const auto& p : parts) v.emplace_back(1.0, p);
  return sum_terms(v, "sum");
}

Tiling mini_square() {
  const FusionGeometry geo(tiles());
  std::vector<Tile> by_role[5];
  for (int i = 0; i < kTupleSpace; ++i) {
    const Tile t = tuple_from_index(i);
    const unsigned k = geo.of_tuple(t, tiles());
    if (!(k & FusionGeometry::kDefect) && FusionGeometry::role(k)) by_role[FusionGeometry::role(k)].push_back(t);
  }
  for (const auto& a : by_role[1])
    for (const auto& b : by_role[2])
      for (const auto& c : by_role[4])
        for (const auto& d : by_role[3]) {
          Tiling t;
          t.width = t.height = 2;
          t.cells = {a, b, c, d};
          if (t.edges_match(tiles())) return t;
        }
  FAIL("no minimal square");
  return {};
}

}  // namespace

TEST_CASE("fused site space layout") {
  const FusedSiteSpace sp(tiles(), reduced());
  CHECK(sp.C == reduced().dim() + 1);
  CHECK(sp.dim() == static_cast<std::size_t>(12 * sp.C));
  CHECK(sp.kind(sp.blank()) == 0);
  CHECK(sp.kind(sp.marker()) == 1);
  for (int k = 0; k < sp.C - 2; ++k) CHECK(sp.kind(k) == 2);
}

TEST_CASE("pair states round trip through tilings") {
  for (int L : {2, 3, 4}) {
    const Lattice lat = build_lattice(L, L);
    for (const Tiling& t : solve_tiling(L, L, tiles(), {}, 4).tilings) {
      const auto s = tiling_pair_states(lat, t, tiles());
      CHECK(tiling_from_pair_states(lat, s, tiles()).cells == t.cells);
      for (const auto& p : lat.plaquettes)
        CHECK(plaquette_penalty({s[static_cast<std::size_t>(p[0])], s[static_cast<std::size_t>(p[1])],
                                 s[static_cast<std::size_t>(p[2])], s[static_cast<std::size_t>(p[3])]},
                                tiles()) == 0);
    }
  }
}

TEST_CASE("geometry marks tile-set members as defect free") {
  const FusionGeometry geo(tiles());
  for (const Tile& t : tiles().tiles) CHECK((geo.of_tuple(t, tiles()) & FusionGeometry::kDefect) == 0u);
  for (const auto& [role, t] : tiles().corners) CHECK(FusionGeometry::role(geo.of_tuple(t, tiles())) == static_cast<int>(role));
}

TEST_CASE("h_f and its components are rotation invariant (reduced layout)") {
  const FusedSiteSpace sp(tiles(), reduced());
  FusionOptions opt;
  opt.orientation_terms = false;
  CHECK(rotation_defect(*assemble_hf(sp, opt)) == 0.0);
  opt.corner_terms = false;
  CHECK(rotation_defect(*assemble_hf(sp, opt)) == 0.0);
  // Corner terms: each is a rotation of the first; only the sum is invariant.
  std::vector<TermPtr> corners;
  for (int w = 1; w <= 4; ++w) corners.push_back(corner_term(sp, w));
  CHECK(rotation_defect(*corners[0]) > 0.0);
  CHECK(rotation_defect(*total(corners)) == 0.0);
  const auto [sh, sv] = build_segment_terms(sp);
  CHECK(rotation_defect(*total({sh, sv})) == 0.0);
}

TEST_CASE("orientation terms need arrow states") {
  const FusedSiteSpace sp(tiles(), reduced());
  CHECK_THROWS_AS(build_orientation_terms(sp), Error);
  const RuleSet t0 = load_ruleset_file(data_path("track0.json"));
  CHECK(build_orientation_terms(FusedSiteSpace(tiles(), t0)).size() == 16);
}

TEST_CASE("h_f is Hermitian on sampled columns") {
  const FusedSiteSpace sp(tiles(), reduced());
  FusionOptions opt;
  opt.orientation_terms = false;
  const auto hf = assemble_hf(sp, opt);
  std::mt19937_64 rng(9);
  std::vector<Entry> col, back;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::uint64_t c = rng() % hf->dim();
    col = canonical_column(*hf, c);
    for (const auto& e : col) {
      back = canonical_column(*hf, e.row);
      cplx v = 0.0;
      for (const auto& b : back)
        if (b.row == c) v = b.val;
      CHECK(std::abs(v - std::conj(e.val)) < 1e-14);
    }
  }
}

TEST_CASE("defect term alone matches the rotation closure") {
  const FusedSiteSpace sp(tiles(), reduced());
  const FusedTerm hc(sp, kHc);
  std::mt19937 rng(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::array<int, 4> p{static_cast<int>(rng() % 12), static_cast<int>(rng() % 12), static_cast<int>(rng() % 12),
                               static_cast<int>(rng() % 12)};
    const bool member = tiles().contains_rotated(inner_tuple(p, tiles()));
    CHECK(hc.class_energy(p, {0, 0, 0, 0}) == (member ? 0.0 : 1.0));
  }
}

TEST_CASE("minimal square hosts four complete chains") {
  const Tiling t = mini_square();
  const auto segs = fused_segments(t, tiles());
  CHECK(segs.size() == 4);
  for (const auto& s : segs) CHECK(s.length() == 3);
  CHECK(fused_defects(t, tiles()) == 0);
}

TEST_CASE("restricted diagonalization equals the classical branch energy") {
  const FusedSiteSpace sp(tiles(), reduced());
  FusionOptions opt;
  opt.orientation_terms = false;
  const auto hf = assemble_hf(sp, opt);
  const double lam = segment_lambda0(reduced(), 3);
  CHECK(lam > 0.0);
  Lambda0Table table;
  table.entries.push_back({3, lam, "computed"});
  const Lattice lat = build_lattice(2, 2);
  const Tiling sq = mini_square();
  const BlockSearch b = restricted_ground_energy(lat, hf, tiling_pair_states(lat, sq, tiles()));
  CHECK(classical_branch_energy(sq, tiles(), table) == doctest::Approx(4 * lam).epsilon(1e-12));
  CHECK(b.energy == doctest::Approx(4 * lam).epsilon(1e-9));
  const EnergySearch best = min_energy_over_tilings(2, 2, tiles(), table);
  CHECK(best.complete);
  CHECK(best.energy == 0.0);
  CHECK(restricted_ground_energy(lat, hf, tiling_pair_states(lat, best.witness, tiles())).energy ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("segment lambda0 agrees with the chain module") {
  ChainOptions opt;
  opt.halting = true;
  opt.orientation = true;
  opt.any_length = true;
  const double direct = ground_space(build_chain_hamiltonian(3, reduced(), opt)).energy;
  CHECK(segment_lambda0(reduced(), 3) == doctest::Approx(direct).epsilon(1e-12));
  CHECK_THROWS_AS(segment_lambda0(reduced(), 4), Error);
}

TEST_CASE("missing lambda0 entries are reported") {
  const Tiling sq = mini_square();
  CHECK_THROWS_AS(classical_branch_energy(sq, tiles(), Lambda0Table{}), Error);
}
