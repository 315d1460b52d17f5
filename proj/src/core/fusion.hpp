// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "core/chain.hpp"
#include "core/lattice.hpp"
#include "core/tiling.hpp"

namespace gf {

// Site space: tiling pair state p (0..11) times computational state k (0..C-1),
// index p*C + k. Computational states: chain symbols, then the marker, then blank.
struct FusedSiteSpace {
  const TileSet* ts = nullptr;
  const RuleSet* rs = nullptr;
  int C = 0;

  FusedSiteSpace(const TileSet& tiles, const RuleSet& rules);
  std::size_t dim() const { return static_cast<std::size_t>(kLabels * C); }
  int blank() const { return C - 1; }
  int marker() const { return C - 2; }
  int index(int p, int k) const { return p * C + k; }
  bool chain(int k) const { return k < C - 2; }
  // 0 blank, 1 marker, 2 chain symbol.
  int kind(int k) const { return k == C - 1 ? 0 : (k == C - 2 ? 1 : 2); }
};

// Per-tuple classification over the 12^4 pair-state tuples (p_t, p_r, p_b, p_l).
struct FusionGeometry {
  static constexpr unsigned kDefect = 1, kHarm = 2, kVarm = 4;
  static constexpr unsigned kRole1 = 8;  // roles 1..4 occupy bits 3..6
  std::vector<unsigned char> cls;

  explicit FusionGeometry(const TileSet& ts);
  static int key(int pt, int pr, int pb, int pl) { return ((pt * kLabels + pr) * kLabels + pb) * kLabels + pl; }
  unsigned at(int pt, int pr, int pb, int pl) const { return cls[static_cast<std::size_t>(key(pt, pr, pb, pl))]; }
  // Same classification for an inner tuple of labels 1..12.
  unsigned of_tuple(const Tile& t, const TileSet& ts) const;
  // Role 1..4 (tl, tr, br, bl) or 0.
  static int role(unsigned c);
};

enum FusionComponent : unsigned {
  kHc = 1,
  kHq = 2,
  kSh = 4,
  kSv = 8,
  kOrient = 16,
  kCorner = 32,
  kAllComponents = 63,
};

struct FusionOptions {
  bool corner_terms = true;
  bool orientation_terms = true;
  bool halting = true;
  double segment_weight = 0.25;
};

struct FusionKernel;

// h_f on one plaquette; diagonal parts are tabulated, chain transitions come from pair tables.
class FusedTerm : public LocalTerm {
 public:
  FusedTerm(const FusedSiteSpace& space, unsigned components, const FusionOptions& opt = {});
  void column(std::uint64_t col, std::vector<Entry>& out) const override;
  bool is_diagonal() const override { return !offdiag_; }

  unsigned components() const { return components_; }
  // Diagonal part fixed by the pair states and the computational kinds (h_c, segments, corners).
  double class_energy(const std::array<int, 4>& p, const std::array<int, 4>& kinds) const;
  // Two-site chain term on computational states (x first): diagonal and transitions.
  struct PairEntry {
    double diag = 0.0;
    std::vector<std::pair<int, cplx>> moves;  // target x'*C + y'
  };
  const PairEntry& pair(int x, int y) const { return pairs_[static_cast<std::size_t>(x * C_ + y)]; }
  const FusedSiteSpace& space() const;
  const FusionKernel& kernel() const { return *kernel_; }
  // Chain rules never move a marker or a blank, so kinds are conserved by every term.
  bool kinds_conserved() const { return kinds_conserved_; }
  double diag(const std::array<int, 4>& p, const std::array<int, 4>& k) const;

 private:
  void build_tables();

  std::shared_ptr<const FusionKernel> kernel_;
  unsigned components_;
  int C_ = 0;
  bool offdiag_ = false;
  bool kinds_conserved_ = true;
  std::vector<PairEntry> pairs_;
  std::vector<std::pair<int, int>> split_;  // site state -> (pair state, computational state)
  std::vector<int> kind_;           // per computational state
  std::vector<int> sig_;            // per computational state: orientation signature id
  int sigs_ = 1;
  std::vector<unsigned char> class_tab_;  // pair-state tuple key * 81 + kind code
  std::vector<double> class_vals_;
  std::vector<double> orient_tab_;  // signature quadruple
};

// Detection projector of corner `which` (1..4): role tuple and its marker pattern.
TermPtr corner_projector(const FusedSiteSpace& space, int which);
// h_{n_which} = P(1 - D) + (1 - P) D.
TermPtr corner_term(const FusedSiteSpace& space, int which);
std::pair<TermPtr, TermPtr> build_segment_terms(const FusedSiteSpace& space, double weight = 0.25);
// Generators h_c1..h_c4 followed by their rotations: 16 diagonal projectors.
std::vector<TermPtr> build_orientation_terms(const FusedSiteSpace& space);
std::shared_ptr<const FusedTerm> assemble_hf(const FusedSiteSpace& space, const FusionOptions& opt = {});

// Pair state of every lattice site read off an edge-matched tiling.
std::vector<int> tiling_pair_states(const Lattice& lat, const Tiling& t, const TileSet& ts);
Tiling tiling_from_pair_states(const Lattice& lat, const std::vector<int>& pairs, const TileSet& ts);

// A complete chain: a starting corner, k arm tiles, an ending corner; length k + 3.
struct FusedSegment {
  int row = 0;
  int col = 0;
  bool horizontal = true;
  int arms = 0;
  int length() const { return arms + 3; }
};
std::vector<FusedSegment> fused_segments(const Tiling& t, const TileSet& ts);
// Cells outside the rotation closure of the tile set.
int fused_defects(const Tiling& t, const TileSet& ts);

double classical_branch_energy(const Tiling& t, const TileSet& ts, const Lambda0Table& table);

struct EnergySearch {
  double energy = 0.0;
  Tiling witness;
  bool complete = false;
  std::uint64_t tilings_examined = 0;
  std::uint64_t nodes = 0;
};
EnergySearch min_energy_over_tilings(int L, int H, const TileSet& ts, const Lambda0Table& table,
                                     std::uint64_t budget = 50'000'000);

// Exact ground energy of the assembled H_f restricted to a fixed tiling-layer state.
struct BlockSearch {
  double energy = 0.0;
  std::uint64_t sectors = 0;       // computational kind assignments scanned
  std::uint64_t solved = 0;        // sectors diagonalised exactly
  std::uint64_t largest_block = 0;
};
BlockSearch restricted_ground_energy(const Lattice& lat, const std::shared_ptr<const FusedTerm>& hf,
                                     const std::vector<int>& pairs, std::uint64_t block_budget = 200'000);

// lambda0 of one segment chain (any length >= 3) with halting and orientation penalties.
double segment_lambda0(const RuleSet& rs, int length, std::uint64_t budget = 200'000);

}  // namespace gf
