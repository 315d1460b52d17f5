// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/chain.hpp"
#include "core/lattice.hpp"
#include "core/machines.hpp"
#include "core/tiling.hpp"

namespace gf {

// Exact rational arithmetic for the shift identities.
struct Rational {
  long long num = 0;
  long long den = 1;
  Rational() = default;
  Rational(long long n, long long d = 1);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a);
  friend bool operator==(const Rational& a, const Rational& b) { return a.num == b.num && a.den == b.den; }
};
Rational parse_rational(const std::string& text);  // "3/7", "2", "0.125"

// lambda0 of the chain hosted by a segment of side 4^m (table key 4^m + 2).
std::optional<double> segment_energy(const Lambda0Table& t, int m);

struct EnergyBounds {
  double lower = 0.0;
  double upper = 0.0;
};
EnergyBounds gs_energy_bounds(long long L, long long H, const Lambda0Table& t);

struct SeriesPair {
  double first = 0.0;   // alpha1 / delta1
  double second = 0.0;  // alpha2 / delta2
};
// |n|: length of the binary form of n.
int input_size(unsigned long long n);
// Sums over segment sides r = 4^m <= |n| + 6 present in the table.
SeriesPair alpha_series(unsigned long long n, const Lambda0Table& t);
// r1: smallest segment side long enough to halt; nullopt when no run halted.
SeriesPair delta_series(unsigned long long n, std::optional<long long> r1, const Lambda0Table& t);
// Smallest 4^m with 4^m >= |n| + 6 + steps.
long long halting_segment(unsigned long long n, long long steps);

struct ShiftedHu {
  TermPtr one_site;
  TermPtr plaquette;
  Rational beta, alpha2;
};
// h_u = beta h_f, site shift -beta/2, plaquette shift -beta (alpha2 - 1).
ShiftedHu shifted_hu(const TermPtr& hf, const Rational& beta, const Rational& alpha2);
// Shift summed over the sites and plaquettes of the L x L lattice.
Rational total_shift_lattice(int L, const Rational& beta, const Rational& alpha2);
// -beta L (L + 1) - L^2 beta (alpha2 - 1).
Rational total_shift_formula(int L, const Rational& beta, const Rational& alpha2);

TermPtr heisenberg_bond();       // -(XX + YY + ZZ) / 4 on two qubits
TermPtr heisenberg_plaquette();  // identity plus the four cyclic bonds
// Ground energy per site of the bond model on an Lx x Ly periodic square lattice.
double heisenberg_torus_energy_per_site(int Lx, int Ly);

// Site space |0> + H_u (x) H_d; index 0 is the guard state, 1 + u*dd + d otherwise.
struct PromiseHamiltonian {
  std::size_t du = 0, dd = 0, D = 0;
  TermPtr h0, hd, hu, plaquette;
  TermPtr one_site;
  TermPtr hu_plaquette, hd_plaquette;  // components on H_u and H_d alone
  double beta = 0.0, alpha2 = 0.0;
};
PromiseHamiltonian build_promise_hamiltonian(const TermPtr& hu_plaquette, const TermPtr& hd_plaquette, double beta,
                                             double alpha2, std::uint64_t budget = 1u << 20);

struct PromiseChecks {
  double commutator_0d = 0.0, commutator_0u = 0.0, commutator_ud = 0.0;
  double guard_residual = 0.0;  // |H |0000>|
  double h0_ground = 0.0;
  double h0_gap = 0.0;          // distance to the next distinct level
  int h0_multiplicity = 0;
  double containment_error = 0.0;  // worst distance of an ud-sector sum from spec(H)
  std::size_t sums_checked = 0;
  std::vector<double> spectrum;  // low part of spec(H)
};
// Dense checks on one plaquette (four sites).
PromiseChecks check_promise_plaquette(const PromiseHamiltonian& ph, double tol = 1e-9);

// Rotation-averaged random PSD plaquette term: a small rotation-invariant stand-in for h_u.
TermPtr random_invariant_plaquette(std::size_t d, unsigned seed);

struct GapCell {
  int L = 0;
  double bound = 0.0;  // beta (L^2 delta2 - L delta1), or the non-halting upper value
  bool above_threshold = false;
  std::vector<double> low;  // witness spectrum where computed
  double spacing = 0.0;     // mean level spacing of the witness
};

struct GapReport {
  unsigned long long n = 0;
  std::string machine;
  std::string verdict_source = "budgeted";
  bool halted = false;
  long long steps = 0;
  long long step_budget = 0;
  std::optional<long long> r1;
  double beta = 0.0;
  SeriesPair alpha, delta;
  std::optional<long long> L_threshold;
  std::vector<GapCell> cells;
  std::string classification = "undetermined-at-budget";
  std::vector<std::string> notes;
  json to_json() const;
};
GapReport classify_gap(const TuringMachine& m, unsigned long long n, const std::vector<int>& L_list,
                       long long step_budget, const Lambda0Table& t, double beta);

// Low spectrum of the Heisenberg plaquette model on Lambda(L) (up to 12 sites).
std::vector<double> heisenberg_lattice_spectrum(int L, int k);

struct EnergyDensity {
  std::vector<std::pair<int, double>> series;
  double estimate = 0.0;
};
EnergyDensity energy_density(const std::vector<std::pair<int, double>>& lambda0_by_L);

}  // namespace gf
