// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/linalg.hpp"
#include "core/report.hpp"

namespace gf {

enum class Orientation { canonical, reverse };

struct Track {
  std::string name;
  std::vector<std::string> symbols;
};

struct TransitionRule {
  int a, b, c, d;  // site-symbol indices
  Orientation orientation;
  cplx phase{1.0, 0.0};  // unitary attachment (one-dimensional)
};

// Pattern over the track layout; "*" matches any symbol on that track.
struct SitePattern {
  std::vector<std::string> parts;
  bool matches(const std::vector<std::string>& site_parts) const;
};

// Site basis: every combination of track symbols (joined by '|'), then the marker as the last index.
struct RuleSet {
  std::string name;
  std::string version;
  std::vector<Track> tracks;
  std::string marker_name = "X";
  std::string blank_name = "-";
  std::vector<std::string> symbols;
  std::vector<std::vector<std::string>> parts;  // per-symbol track components
  std::vector<TransitionRule> rules;
  std::vector<unsigned char> illegal;      // dim x dim pair penalty count (0/1)
  std::vector<unsigned char> orient_pen;   // dim x dim orientation boundary penalty (both ends)
  std::vector<std::pair<int, int>> horizontal_orientation;  // as listed, marker first
  std::vector<std::pair<int, int>> vertical_orientation;
  std::vector<unsigned char> halting;      // per symbol: carries the halting marker
  bool has_halt_marker = false;
  double transition_scale = 1.0;
  std::vector<int> forward;   // (a,b) -> rule index or -1
  std::vector<int> backward;  // (c,d) -> rule index or -1
  std::optional<std::vector<std::string>> initial_first_cycle_last;

  int dim() const { return static_cast<int>(symbols.size()); }
  int marker() const { return dim() - 1; }
  int symbol(const std::string& name) const;
  bool pair_illegal(int a, int b) const { return illegal[static_cast<std::size_t>(a * dim() + b)] != 0; }
  int rule_at(int a, int b) const { return forward[static_cast<std::size_t>(a * dim() + b)]; }
  json to_json() const;
};

RuleSet load_ruleset(const json& doc);
RuleSet load_ruleset_file(const std::string& path);
// Adds the mirror image of every canonical rule (ab -> cd becomes ba -> dc) and mirrors penalties.
RuleSet reflect_ruleset(const RuleSet& canonical);

using ChainConfig = Config;

std::string config_str(const ChainConfig& c, const RuleSet& rs);
ChainConfig parse_config(const std::string& text, const RuleSet& rs);
ChainConfig reflect_config(const ChainConfig& c);
bool config_legal(const ChainConfig& c, const RuleSet& rs);
bool is_bracketed(const ChainConfig& c, const RuleSet& rs);

// Canonical start configuration of length L (markers included); reverse is its mirror image.
ChainConfig initial_config(int L, const RuleSet& rs, Orientation o = Orientation::canonical);

std::vector<ChainConfig> enumerate_bracketed_legal(int L, const RuleSet& rs, std::uint64_t budget = 2'000'000);

std::optional<ChainConfig> evolve_step(const ChainConfig& c, const RuleSet& rs);

struct Orbit {
  std::vector<ChainConfig> configs;
  std::optional<std::size_t> period;  // set when the orbit returns to its start
  bool halted_flag = false;          // some configuration carries the halting marker
  std::size_t halting_steps = 0;     // number of configurations carrying it
  std::vector<Orientation> rule_orientations;
};
Orbit orbit(const ChainConfig& c0, const RuleSet& rs, std::size_t max_steps = 1'000'000);
// Fixed-width rendering: one configuration per line, track columns padded.
std::string orbit_trace(const Orbit& o, const RuleSet& rs);

struct ChainOptions {
  bool restrict_subspace = true;
  bool halting = false;       // add a one-site projector on every halting-marked site
  bool orientation = false;   // add the boundary orientation penalties
  std::uint64_t budget = 2'000'000;
  bool any_length = false;    // admit odd lengths down to 3 (segment chains on small lattices)
};

struct ChainHamiltonian {
  SparseOperator op;
  std::vector<ChainConfig> basis;
  double transition_scale = 1.0;
  std::size_t legal_count = 0;
  std::size_t index_of(const ChainConfig& c) const;  // throws when absent
  std::unordered_map<std::string, std::size_t> index;
};

// Restricted basis: bracketed legal configurations closed under forward and backward rules.
ChainHamiltonian build_chain_hamiltonian(int L, const RuleSet& rs, const ChainOptions& opt = {});

struct GroundSpace {
  double energy = 0.0;
  int degeneracy = 0;
  std::vector<double> low;
  std::vector<Eigen::VectorXcd> vectors;
};
GroundSpace ground_space(const ChainHamiltonian& h, int k = 6, double tol = 1e-9);

// Zero-energy superposition over the cyclic orbit of c0, expressed in h's basis.
Eigen::VectorXcd history_state(const ChainConfig& c0, const RuleSet& rs, const ChainHamiltonian& h);
double expectation(const SparseOperator& op, const Eigen::VectorXcd& v);
// Site-reversal permutation applied to a vector in h's basis.
Eigen::VectorXcd reflect_vector(const Eigen::VectorXcd& v, const ChainHamiltonian& h);

struct Lambda0Entry {
  int r = 0;  // chain length, markers included
  double lambda0 = 0.0;
  std::string provenance;  // "computed" or "history-bound"
  std::size_t period = 0;
  std::size_t halting_steps = 0;
  double history_energy = 0.0;
  std::size_t basis = 0;
};
struct Lambda0Table {
  std::vector<Lambda0Entry> entries;
  double scale = 1.0;  // multiplies every lambda0
  std::optional<double> lookup(int r) const;
  json to_json() const;
};
Lambda0Table lambda0_table(const RuleSet& rs, const std::vector<int>& r_list, double scale = 1.0,
                           std::uint64_t budget = 200'000);
Lambda0Table lambda0_from_json(const json& j);

// Chain length hosted by a red segment of side 4^n: 4^n interior sites plus two markers.
int chain_length_for_segment(int n);

}  // namespace gf
