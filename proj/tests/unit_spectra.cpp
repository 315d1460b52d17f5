// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "core/spectra.hpp"
#include "doctest.h"

using namespace gf;

namespace {

Lambda0Table table_of(std::initializer_list<std::pair<int, double>> rows) {
  Lambda0Table t;
  for (auto [r, v] : rows) t.entries.push_back({r, v, "assumed"});
  return t;
}

}  // namespace

TEST_CASE("rational arithmetic") {
  const Rational a(1, 3), b(-2, 6);
  CHECK(a + b == Rational(0));
  CHECK((a * Rational(3)) == Rational(1));
  CHECK(Rational(4, -8) == Rational(-1, 2));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(parse_rational("3/7").str() == "3/7");
  CHECK_THROWS_AS(parse_rational("x"), Error);
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational(1LL << 62) * Rational(1LL << 62), Error);
}

TEST_CASE("ground energy bounds examples") {
  const auto zero = table_of({{6, 0.0}, {18, 0.0}});
  CHECK(gs_energy_bounds(16, 16, zero).lower == 0.0);
  CHECK(gs_energy_bounds(16, 16, zero).upper == 0.0);
  const double x = 0.03;
  const auto one = table_of({{6, x}, {18, 0.0}});
  CHECK(gs_energy_bounds(16, 16, one).lower == doctest::Approx(8 * x));
  CHECK(gs_energy_bounds(16, 16, one).upper == doctest::Approx(24 * x));
  const auto b4 = gs_energy_bounds(4, 4, one);
  CHECK(b4.lower == 0.0);
  CHECK(b4.upper == 0.0);
  CHECK_THROWS_AS(gs_energy_bounds(16, 16, Lambda0Table{}), Error);
}

TEST_CASE("alpha series") {
  CHECK(alpha_series(1, Lambda0Table{}).first == 0.0);
  const auto a = alpha_series(1, table_of({{6, 0.04}}));
  CHECK(a.second == doctest::Approx(0.0025));
  CHECK(a.first == doctest::Approx(0.02));
  // Sides beyond |n| + 6 are excluded.
  CHECK(alpha_series(1, table_of({{6, 0.04}, {18, 0.1}})).second == doctest::Approx(0.0025));
}

TEST_CASE("delta series") {
  const auto t = table_of({{6, 0.04}, {18, 0.05}});
  const auto none = delta_series(1, std::nullopt, t);
  CHECK(none.second == 0.0);
  CHECK(none.first >= 1.0);
  const auto d = delta_series(1, 16, table_of({{18, 0.05}}));
  CHECK(d.second == doctest::Approx(0.05 / 256));
  CHECK(d.first == doctest::Approx(1.0 + 2 * 0.05 / 16));
  CHECK(halting_segment(1, 1) == 16);
  CHECK(halting_segment(1, 0) == 16);
  CHECK(halting_segment(0, 100) == 256);
}

TEST_CASE("shift totals") {
  CHECK(total_shift_lattice(1, Rational(1), Rational(1)) == Rational(-2));
  CHECK(total_shift_lattice(2, Rational(1), Rational(1)) == Rational(-6));
  std::mt19937 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Rational beta(1 + rng() % 20, 1 + rng() % 9), alpha2(rng() % 5, 1 + rng() % 50);
    for (int L = 1; L <= 8; ++L) CHECK(total_shift_lattice(L, beta, alpha2) == total_shift_formula(L, beta, alpha2));
  }
}

TEST_CASE("shifted H_u is beta H_f plus the total shift (operator identity)") {
  const TermPtr hf = random_invariant_plaquette(2, 3);
  const Rational beta(3, 2), alpha2(1, 40);
  const ShiftedHu hu = shifted_hu(hf, beta, alpha2);
  const Lattice lat = build_lattice(1, 1);
  const Eigen::MatrixXcd lhs = assemble_hamiltonian(lat, hu.one_site, hu.plaquette).to_dense();
  const Eigen::MatrixXcd rhs = assemble_hamiltonian(lat, nullptr, hf).to_dense() * beta.value() +
                   Eigen::MatrixXcd::Identity(16, 16) * total_shift_formula(1, beta, alpha2).value();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(shifted_hu(hf, Rational(-1), alpha2), Error);
}

TEST_CASE("Heisenberg layer") {
  const auto bond = dense_spectrum(to_dense(*heisenberg_bond()), 4, false).values;
  CHECK(bond[0] == doctest::Approx(-0.25));
  CHECK(bond[2] == doctest::Approx(-0.25));
  CHECK(bond[3] == doctest::Approx(0.75));
  const auto p = heisenberg_plaquette();
  const auto spec = dense_spectrum(to_dense(*p), 16, false).values;
  CHECK(std::abs(spec[0]) < 1e-12);
  CHECK(ground_multiplicity(spec, 1e-9) == 5);
  CHECK(rotation_defect(*p) < 1e-12);
  CHECK(heisenberg_torus_energy_per_site(2, 2) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(heisenberg_torus_energy_per_site(3, 2) == doctest::Approx(-0.5).epsilon(1e-12));
  const auto low = heisenberg_lattice_spectrum(1, 6);
  CHECK(std::abs(low[0]) < 1e-12);
}

TEST_CASE("random invariant plaquettes are PSD and invariant") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto t = random_invariant_plaquette(2, seed);
    CHECK(rotation_defect(*t) < 1e-12);
    CHECK(dense_spectrum(to_dense(*t), 1, false).values[0] > -1e-12);
  }
}

TEST_CASE("promise Hamiltonian on one plaquette") {
  const auto ph = build_promise_hamiltonian(random_invariant_plaquette(2, 5), heisenberg_plaquette(), 0.5, 0.01);
  CHECK(ph.D == 5);
  const PromiseChecks c = check_promise_plaquette(ph);
  CHECK(c.commutator_0d < 1e-10);
  CHECK(c.commutator_0u < 1e-10);
  CHECK(c.commutator_ud < 1e-10);
  CHECK(c.guard_residual < 1e-12);
  CHECK(c.h0_gap == doctest::Approx(1.0));
  CHECK(c.containment_error < 1e-9);
  CHECK_THROWS_AS(build_promise_hamiltonian(random_invariant_plaquette(2, 5), heisenberg_plaquette(), 0.5, 0.01, 100), Error);
}

TEST_CASE("guard terms by pattern") {
  const auto ph = build_promise_hamiltonian(random_invariant_plaquette(2, 5), heisenberg_plaquette(), 0.5, 0.01);
  auto h0 = [&](std::array<int, 4> s) {
    std::uint64_t idx = 0;
    for (int x : s) idx = idx * ph.D + static_cast<std::uint64_t>(x);
    std::vector<Entry> col;
    ph.h0->column(idx, col);
    double v = 0.0;
    for (const auto& e : col) v += e.val.real();
    return v;
  };
  CHECK(h0({0, 0, 0, 0}) == 0.0);
  CHECK(h0({1, 2, 3, 4}) == 0.0);
  CHECK(h0({0, 1, 1, 1}) == 1.0);  // one guard
  CHECK(h0({1, 0, 0, 0}) == 1.0);  // three guards
  // Two guards are not penalized by the cyclic cross terms as written.
  CHECK(h0({0, 0, 1, 1}) == 0.0);
  CHECK(h0({0, 1, 0, 1}) == 0.0);
}

TEST_CASE("gap classification") {
  const Lambda0Table t = table_of({{6, 0.04}, {18, 0.05}});
  const TuringMachine loop = load_machine_file(data_path("machines/loop.json"));
  const GapReport g = classify_gap(loop, 1, {1, 2}, 500, t, 1.0);
  CHECK(g.classification == "gapless-consistent");
  CHECK(g.verdict_source == "budgeted");
  CHECK_FALSE(g.halted);
  REQUIRE(g.cells.size() == 2);
  CHECK(g.cells[1].spacing < g.cells[0].spacing);
  for (const auto& c : g.cells) CHECK(c.bound <= -0.75 * c.L);

  CHECK(classify_gap(loop, 1, {}, 500, t, 1.0).classification == "undetermined-at-budget");

  const TuringMachine halter = load_machine_file(data_path("machines/halter.json"));
  const GapReport small = classify_gap(halter, 1, {1, 2}, 500, t, 1.0);
  CHECK(small.halted);
  REQUIRE(small.L_threshold.has_value());
  CHECK(small.classification == "undetermined-at-budget");
  const int L0 = static_cast<int>(*small.L_threshold);
  const GapReport big = classify_gap(halter, 1, {L0, 2 * L0}, 500, t, 1.0);
  CHECK(big.classification == "gapped");
  for (const auto& c : big.cells) CHECK(c.bound >= 1.0 - 1e-9);
  // The threshold is the smallest L meeting the bound.
  const double d1 = big.delta.first, d2 = big.delta.second;
  CHECK(static_cast<double>(L0) * L0 * d2 - L0 * d1 >= 1.0);
  CHECK(static_cast<double>(L0 - 1) * (L0 - 1) * d2 - (L0 - 1) * d1 < 1.0);
  CHECK(big.to_json().at("schema") == "gapforge-gap-report/1");
}

TEST_CASE("energy density") {
  CHECK(energy_density({{1, 0.0}, {2, 0.0}}).estimate == 0.0);
  const double beta = 2.0;
  std::vector<std::pair<int, double>> nonhalt, halt;
  for (int L = 1; L <= 64; L *= 2) {
    nonhalt.emplace_back(L, -0.75 * beta * L);
    halt.emplace_back(L, beta * 0.01 * L * L);
  }
  const auto e = energy_density(nonhalt);
  for (const auto& [L, v] : e.series) CHECK(v == doctest::Approx(-3 * beta / (8 * (L + 1.0))));
  CHECK(energy_density(halt).estimate == doctest::Approx(beta * 0.01 / 2).epsilon(0.02));
}
