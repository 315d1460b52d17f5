// SPDX-License-Identifier: Apache-2.0
// One PASS/FAIL line per acceptance criterion, with timing against its budget.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "core/commands.hpp"
#include "core/fusion.hpp"
#include "core/spectra.hpp"

using namespace gf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// Floor arithmetic re-derived by counting multiples.
long long count_multiples(long long x, long long q) {
  long long k = 0;
  for (long long m = q; m <= x; m += q) ++k;
  return k;
}

Outcome c1_formulas() {
  long long checked = 0;
  for (int n = 1; n <= 2; ++n) {
    long long q = 2;
    for (int i = 0; i < n; ++i) q *= 4;
    for (long long L = 0; L <= 64; ++L)
      for (long long H = 0; H <= 64; ++H) {
        const long long fh = count_multiples(H, q), fl = count_multiples(L, q);
        const long long lo = 4 * fh * fl - 2 * (fh + fl), hi = 4 * fh * fl + 2 * (fh + fl);
        const SegmentBounds b = segment_bounds(L, H, n);
        if (b.lower != lo || b.upper != hi) return {false, "segment_bounds differs at " + std::to_string(L) + "x" + std::to_string(H)};
        for (long long d = 0; d <= 3; ++d) {
          const RigidityBound r = rigidity_bound(L, H, n, d);
          if (r.raw != lo - 8 * d || r.clamped != std::max(0LL, lo - 8 * d)) return {false, "rigidity_bound differs"};
          ++checked;
        }
      }
  }
  return {true, std::to_string(checked) + " cases"};
}

Outcome c2_tiling() {
  const TileSet ts = bundled_tileset();
  std::mt19937 rng(2024);
  int tilings = 0, inside = 0, rigid_ok = 0, rigid_total = 0;
  std::ostringstream why;
  for (int side : {8, 16}) {
    const SolveResult r = solve_tiling(side, side, ts, {}, 12);
    for (const Tiling& t : r.tilings) {
      ++tilings;
      const SegmentCount s = count_red_segments(t, ts, 1);
      const SegmentBounds b = segment_bounds(side, side, 1);
      if (s.total() >= b.lower && s.total() <= b.upper) ++inside;
      else if (why.str().size() < 80) why << " " << side << "x" << side << " count " << s.total() << " outside [" << b.lower << "," << b.upper << "];";
      for (int d = 1; d <= 3; ++d) {
        std::set<std::pair<int, int>> cells;
        std::uniform_int_distribution<int> pick(0, side - 1);
        while (static_cast<int>(cells.size()) < d) cells.insert({pick(rng), pick(rng)});
        const Tiling bad = inject_defects(t, {cells.begin(), cells.end()}, ts);
        ++rigid_total;
        if (count_red_segments(bad, ts, 1).total() >= rigidity_bound(side, side, 1, d).clamped) ++rigid_ok;
      }
    }
  }
  const bool pass = tilings >= 20 && inside == tilings && rigid_ok == rigid_total;
  return {pass, std::to_string(tilings) + " tilings, " + std::to_string(inside) + " inside the interval, " +
                    std::to_string(rigid_ok) + "/" + std::to_string(rigid_total) + " defect recounts respect the bound;" + why.str()};
}

Outcome c3_rotation() {
  const TileSet ts = bundled_tileset();
  const RuleSet rs = load_ruleset_file(data_path("track0.json"));
  const FusedSiteSpace sp(ts, rs);
  FusionOptions with, without;
  without.corner_terms = false;
  const double hc = rotation_defect(*tiling_penalty_term(ts));
  const double f1 = rotation_defect(*assemble_hf(sp, with));
  const double f0 = rotation_defect(*assemble_hf(sp, without));
  const double hb = rotation_defect(*heisenberg_plaquette());
  const double worst = std::max({hc, f1, f0, hb});
  return {worst <= 1e-12, "h_c " + fmt(hc) + ", h_f " + fmt(f1) + ", h_f without corners " + fmt(f0) + ", heisenberg " + fmt(hb)};
}

Outcome c4_chain() {
  const RuleSet rs = load_ruleset_file(data_path("toy7.json"));
  std::ostringstream o;
  bool pass = true;
  for (int L : {4, 6, 8}) {
    const ChainHamiltonian h = build_chain_hamiltonian(L, rs);
    const GroundSpace g = ground_space(h, 6, 1e-9);
    const Eigen::VectorXcd pc = history_state(initial_config(L, rs, Orientation::canonical), rs, h);
    const Eigen::VectorXcd pr = history_state(initial_config(L, rs, Orientation::reverse), rs, h);
    const double ec = expectation(h.op, pc), er = expectation(h.op, pr);
    const double overlap = std::abs(pr.dot(reflect_vector(pc, h)));
    // Both history states lie in the computed ground space.
    double in_span = 0.0;
    for (const auto* v : {&pc, &pr}) {
      Eigen::VectorXcd rest = *v;
      for (const auto& gv : g.vectors) rest -= gv.dot(*v) * gv;
      in_span = std::max(in_span, rest.norm());
    }
    const bool ok = std::abs(g.energy) <= 1e-9 && g.degeneracy == 2 && std::abs(overlap - 1.0) <= 1e-9 &&
                    std::abs(ec) <= 1e-9 && std::abs(er) <= 1e-9 && in_span <= 1e-6;
    pass = pass && ok;
    o << "L=" << L << " lambda0 " << fmt(g.energy) << " deg " << g.degeneracy << " |<r|R c>| " << fmt(overlap)
      << " history energy " << fmt(std::max(std::abs(ec), std::abs(er))) << "; ";
  }
  return {pass, o.str()};
}

Outcome c5_track0() {
  const RuleSet rs = load_ruleset_file(data_path("track0.json"));
  const Orbit ob = orbit(initial_config(6, rs, Orientation::canonical), rs);
  if (ob.configs.size() < 2) return {false, "orbit too short"};
  const bool first = config_str(ob.configs[0], rs) == "X >A A B A X" && config_str(ob.configs[1], rs) == "X A >B B A X";
  int turns = 0;
  bool single = true, alternate = true, b_turn = true;
  for (std::size_t t = 0; t < ob.configs.size(); ++t) {
    const auto& c = ob.configs[t];
    std::vector<std::string> labels;
    int controls = 0;
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
      const std::string s = rs.symbols[c[i]];
      if (s.size() == 2) {
        ++controls;
        // Control next to a boundary and pointing at it: must carry the B label, and turn next step.
        const bool at_right = i + 2 == c.size() && s[0] == '>', at_left = i == 1 && s[0] == '<';
        if (at_right || at_left) {
          ++turns;
          b_turn = b_turn && s[1] == 'B';
          const auto& nx = ob.configs[(t + 1) % ob.configs.size()];
          b_turn = b_turn && rs.symbols[nx[i]] == std::string(at_right ? "<A" : ">A");
        }
      } else {
        labels.push_back(s);
      }
    }
    single = single && controls == 1;
    for (std::size_t i = 0; i < labels.size(); ++i) alternate = alternate && labels[i] == (i % 2 == 0 ? "A" : "B");
  }
  const bool pass = first && single && alternate && b_turn && turns >= 2 && ob.period;
  return {pass, std::string("first two ") + (first ? "exact" : "differ") + ", single control " + (single ? "yes" : "no") +
                    ", alternation " + (alternate ? "yes" : "no") + ", " + std::to_string(turns) + " boundary turnarounds " +
                    (b_turn ? "all B" : "not all B")};
}

Outcome c6_halting() {
  const RuleSet rs = load_ruleset_file(data_path("toy7.json"));
  ChainOptions opt;
  opt.halting = true;
  const int L = 6;
  const ChainHamiltonian h = build_chain_hamiltonian(L, rs, opt);
  const ChainConfig c0 = initial_config(L, rs);
  const Orbit ob = orbit(c0, rs);
  const double T = static_cast<double>(ob.configs.size());
  const double e = expectation(h.op, history_state(c0, rs, h));
  const double want = static_cast<double>(ob.halting_steps) / T;
  const double lam = ground_space(h, 4, 1e-10).energy;
  const bool pass = ob.halting_steps > 0 && std::abs(e - want) <= 1e-12 && lam > 0.0 && lam <= 2.0 / T + 1e-12;
  return {pass, "T=" + std::to_string(ob.configs.size()) + " halting steps " + std::to_string(ob.halting_steps) + " energy " +
                    fmt(e) + " vs " + fmt(want) + ", lambda0 " + fmt(lam) + " <= " + fmt(2.0 / T)};
}

Outcome c7_orientation() {
  const RuleSet rs = load_ruleset_file(data_path("track0.json"));
  ChainOptions opt;
  const int d0 = ground_space(build_chain_hamiltonian(6, rs, opt)).degeneracy;
  opt.orientation = true;
  const GroundSpace g1 = ground_space(build_chain_hamiltonian(6, rs, opt));
  return {d0 == 2 && g1.degeneracy == 1 && std::abs(g1.energy) <= 1e-9,
          "degeneracy " + std::to_string(d0) + " -> " + std::to_string(g1.degeneracy) + ", lambda0 " + fmt(g1.energy)};
}

// All 2x2 tilings whose cells form one defect-free minimal square.
std::vector<Tiling> mini_squares(const TileSet& ts) {
  const FusionGeometry geo(ts);
  std::vector<Tile> by_role[5];
  for (int i = 0; i < kTupleSpace; ++i) {
    const Tile t = tuple_from_index(i);
    const unsigned k = geo.of_tuple(t, ts);
    if (!(k & FusionGeometry::kDefect) && FusionGeometry::role(k)) by_role[FusionGeometry::role(k)].push_back(t);
  }
  std::vector<Tiling> out;
  for (const auto& a : by_role[1])
    for (const auto& b : by_role[2])
      for (const auto& c : by_role[4])
        for (const auto& d : by_role[3]) {
          Tiling t;
          t.width = t.height = 2;
          t.cells = {a, b, c, d};
          if (t.edges_match(ts)) out.push_back(t);
        }
  return out;
}

Outcome c8_fusion() {
  const TileSet ts = bundled_tileset();
  const Lattice lat = build_lattice(2, 2);
  std::ostringstream o;
  bool pass = true;
  for (const std::string name : {"reduced_halting.json", "track0.json"}) {
    const RuleSet rs = load_ruleset_file(data_path(name));
    FusionOptions opt;
    opt.orientation_terms = !rs.horizontal_orientation.empty();
    const auto hf = assemble_hf(FusedSiteSpace(ts, rs), opt);
    Lambda0Table table;
    table.entries.push_back({3, segment_lambda0(rs, 3), "computed"});
    const EnergySearch best = min_energy_over_tilings(2, 2, ts, table);
    const double e_best = restricted_ground_energy(lat, hf, tiling_pair_states(lat, best.witness, ts)).energy;
    const double c_best = classical_branch_energy(best.witness, ts, table);
    bool ok = best.complete && std::abs(e_best - c_best) <= 1e-9;
    // Sampled family: solver tilings and minimal squares.
    std::vector<Tiling> sample = solve_tiling(2, 2, ts, {}, 30).tilings;
    const auto minis = mini_squares(ts);
    sample.insert(sample.end(), minis.begin(), minis.begin() + static_cast<long>(std::min<std::size_t>(minis.size(), 6)));
    double qmin = e_best, cmin = c_best, worst_mini = 0.0;
    int unequal = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      const double e = restricted_ground_energy(lat, hf, tiling_pair_states(lat, sample[i], ts)).energy;
      const double c = classical_branch_energy(sample[i], ts, table);
      qmin = std::min(qmin, e);
      cmin = std::min(cmin, c);
      if (std::abs(e - c) > 1e-9) ++unequal;
      if (i + 6 >= sample.size()) worst_mini = std::max(worst_mini, std::abs(e - c));
    }
    ok = ok && std::abs(qmin - cmin) <= 1e-9 && worst_mini <= 1e-9;
    pass = pass && ok;
    o << name << ": optimum " << fmt(e_best) << " vs classical " << fmt(c_best) << ", sampled min " << fmt(qmin) << " vs "
      << fmt(cmin) << ", minimal squares max diff " << fmt(worst_mini) << ", " << unequal << "/" << sample.size()
      << " tilings differ per tiling; ";
  }
  return {pass, o.str()};
}

Outcome c9_shift() {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> num(1, 50), den(1, 40);
  for (int trial = 0; trial < 40; ++trial) {
    const Rational beta(num(rng), den(rng)), alpha2(num(rng), den(rng) * 8);
    for (int L = 1; L <= 8; ++L)
      if (!(total_shift_lattice(L, beta, alpha2) == total_shift_formula(L, beta, alpha2)))
        return {false, "shift mismatch at L=" + std::to_string(L)};
  }
  // Synthetic non-halting table: lambda0 = 0.02 on every segment side up to 4^4.
  Lambda0Table table;
  for (int m = 1; m <= 4; ++m) table.entries.push_back({chain_length_for_segment(m), 0.02, "assumed"});
  for (int len = 3; len <= 17; ++len)
    if (!table.lookup(len)) table.entries.push_back({len, 0.02, "assumed"});
  double sum = 0.0;
  for (int m = 1; m <= 4; ++m) sum += *segment_energy(table, m);
  const TileSet ts = bundled_tileset();
  const double beta = 1.0;
  const SeriesPair a = alpha_series(1, table);
  std::ostringstream o;
  bool pass = sum < 0.125;
  for (int L : {8, 16}) {
    const EnergySearch s = min_energy_over_tilings(L, L, ts, table);
    const double shift = -beta * L * (L + 1.0) - L * L * beta * (a.second - 1.0);
    const double lam = beta * s.energy + shift;
    const bool ok = lam <= -0.75 * beta * L;
    pass = pass && ok;
    o << "L=" << L << " E_f " << fmt(s.energy) << (s.complete ? "" : " (incomplete)") << " lambda0 <= " << fmt(lam)
      << " vs " << fmt(-0.75 * beta * L) << "; ";
  }
  return {pass, "exact shift identity for L<=8; sum " + fmt(sum) + "; " + o.str()};
}

Outcome c10_promise() {
  const auto ph = build_promise_hamiltonian(random_invariant_plaquette(2, 11), heisenberg_plaquette(), 1.0, 0.01);
  const PromiseChecks c = check_promise_plaquette(ph);
  const double comm = std::max({c.commutator_0d, c.commutator_0u, c.commutator_ud});
  const bool pass = comm <= 1e-10 && c.guard_residual <= 1e-12 && std::abs(c.h0_ground) <= 1e-12 &&
                    std::abs(c.h0_gap - 1.0) <= 1e-12 && c.containment_error <= 1e-9;
  return {pass, "commutators " + fmt(comm) + ", |H|0000>| " + fmt(c.guard_residual) + ", H0 gap " + fmt(c.h0_gap) +
                    " (ground multiplicity " + std::to_string(c.h0_multiplicity) + "), containment " +
                    fmt(c.containment_error) + " over " + std::to_string(c.sums_checked) + " sums"};
}

Outcome c11_heisenberg() {
  const auto bond = dense_spectrum(to_dense(*heisenberg_bond()), 4, false).values;
  const bool bond_ok = std::abs(bond[0] + 0.25) <= 1e-12 && std::abs(bond[2] + 0.25) <= 1e-12 && std::abs(bond[3] - 0.75) <= 1e-12;
  const auto plaq = heisenberg_plaquette();
  const double lam = dense_spectrum(to_dense(*plaq), 1, false).values[0];
  std::vector<Entry> col;
  plaq->column(0, col);
  double up = 0.0;
  for (const auto& e : col) up += std::abs(e.val);
  const double per = heisenberg_torus_energy_per_site(2, 2);
  const bool pass = bond_ok && std::abs(lam) <= 1e-12 && up <= 1e-12 && std::abs(per + 0.5) <= 1e-12;
  return {pass, "bond {" + fmt(bond[0]) + ", " + fmt(bond[3]) + "}, plaquette lambda0 " + fmt(lam) + ", |H up^4| " + fmt(up) +
                    ", per-site " + fmt(per)};
}

Outcome c12_determinism() {
  const std::vector<std::pair<std::string, json>> runs{
      {"tile.solve", {{"L", 8}, {"limit", 2}}},
      {"tile.segments", {{"L", 16}, {"n", 1}}},
      {"tile.bounds", {{"L", 16}, {"H", 16}, {"n", 1}, {"d", 2}}},
      {"machine.check", {{"machine", "hadamard_qtm.json"}}},
      {"machine.run", {{"machine", "counter.json"}, {"n", 5}}},
      {"chain.enumerate", {{"L", 6}}},
      {"chain.evolve", {{"L", 6}}},
      {"chain.spectrum", {{"L", 6}, {"orientation", true}}},
      {"chain.lambda0", {{"r", {6, 18}}}},
      {"fuse.energy", {{"L", 2}}},
      {"gap.report", {{"n", 1}, {"machine", "loop.json"}}},
  };
  int same = 0;
  std::string bad;
  for (const auto& [cmd, params] : runs) {
    const json a = run_command(cmd, params);
    const json b = run_command(a["manifest"]["command"].get<std::string>(), a["manifest"]["params"]);
    if (stable_dump(a["manifest"]) == stable_dump(b["manifest"]) && a["artifacts"] == b["artifacts"] && !a["artifacts"].empty())
      ++same;
    else
      bad += " " + cmd;
  }
  return {same == static_cast<int>(runs.size()),
          std::to_string(same) + "/" + std::to_string(runs.size()) + " commands replay byte-identical" + bad};
}

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "formula suite", 1, c1_formulas},
      {2, "tiling suite", 120, c2_tiling},
      {3, "rotation invariance", 10, c3_rotation},
      {4, "chain ground space", 300, c4_chain},
      {5, "track-0 conformance", 1, c5_track0},
      {6, "halting penalty", 60, c6_halting},
      {7, "orientation uniqueness", 60, c7_orientation},
      {8, "fusion decomposition", 600, c8_fusion},
      {9, "shift arithmetic", 300, c9_shift},
      {10, "promise hamiltonian", 300, c10_promise},
      {11, "heisenberg layer", 10, c11_heisenberg},
      {12, "determinism", 900, c12_determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt <= c.budget_s;
    const bool pass = r.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s [%d] %s (%.2fs / %.0fs%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), dt, c.budget_s,
                in_time ? "" : " over budget", r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
