// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <set>

#include "core/chain.hpp"
#include "doctest.h"

using namespace gf;

namespace {

RuleSet bundled(const std::string& name) { return load_ruleset_file(data_path(name + ".json")); }

// Brute-force oracle: every interior string, filtered by bracketing and legality.
std::vector<ChainConfig> brute_force(int L, const RuleSet& rs) {
  std::vector<ChainConfig> out;
  const int M = rs.marker();
  ChainConfig c(static_cast<std::size_t>(L), 0);
  c.front() = c.back() = static_cast<std::uint16_t>(M);
  std::uint64_t total = 1;
  for (int i = 0; i < L - 2; ++i) total *= static_cast<std::uint64_t>(M);
  for (std::uint64_t x = 0; x < total; ++x) {
    std::uint64_t y = x;
    for (int i = L - 2; i >= 1; --i) {
      c[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(y % static_cast<std::uint64_t>(M));
      y /= static_cast<std::uint64_t>(M);
    }
    if (is_bracketed(c, rs) && config_legal(c, rs)) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("bracketed legal enumeration matches brute force") {
  for (const char* name : {"track0", "clock"})
    for (int L : {4, 6}) {
      const RuleSet rs = bundled(name);
      const auto a = enumerate_bracketed_legal(L, rs);
      const auto b = brute_force(L, rs);
      CHECK(std::set<ChainConfig>(a.begin(), a.end()) == std::set<ChainConfig>(b.begin(), b.end()));
      CHECK(a.size() == b.size());
    }
}

TEST_CASE("chain lengths are validated") {
  const RuleSet rs = bundled("track0");
  CHECK_THROWS_AS(enumerate_bracketed_legal(5, rs), Error);
  CHECK_THROWS_AS(build_chain_hamiltonian(2, rs), Error);
  CHECK_THROWS_AS(enumerate_bracketed_legal(8, rs, 3), Error);
}

TEST_CASE("configuration text round trip") {
  const RuleSet rs = bundled("track0");
  const ChainConfig c = initial_config(6, rs);
  CHECK(config_str(c, rs) == "X >A A B A X");
  CHECK(parse_config(config_str(c, rs), rs) == c);
  CHECK(reflect_config(reflect_config(c)) == c);
  CHECK(config_str(initial_config(6, rs, Orientation::reverse), rs) == "X A B A >A X");
}

TEST_CASE("track-0 orbit period is two sweeps") {
  const RuleSet rs = bundled("track0");
  for (int L = 4; L <= 12; L += 2) {
    const Orbit o = orbit(initial_config(L, rs), rs);
    REQUIRE(o.period.has_value());
    CHECK(*o.period == static_cast<std::size_t>(2 * (L - 2)));
  }
}

TEST_CASE("forward and backward rule tables are inverse") {
  for (const char* name : {"track0", "clock", "toy7"}) {
    const RuleSet rs = bundled(name);
    for (int a = 0; a < rs.dim(); ++a)
      for (int b = 0; b < rs.dim(); ++b) {
        const int r = rs.rule_at(a, b);
        if (r < 0) continue;
        const auto& t = rs.rules[static_cast<std::size_t>(r)];
        CHECK(rs.backward[static_cast<std::size_t>(t.c * rs.dim() + t.d)] == r);
      }
  }
}

TEST_CASE("every orbit configuration stays inside the restricted basis") {
  const RuleSet rs = bundled("toy7");
  const ChainHamiltonian h = build_chain_hamiltonian(6, rs);
  for (auto o : {Orientation::canonical, Orientation::reverse})
    for (const auto& c : orbit(initial_config(6, rs, o), rs).configs) {
      CHECK(is_bracketed(c, rs));
      CHECK(config_legal(c, rs));
      CHECK_NOTHROW(h.index_of(c));
    }
}

TEST_CASE("chain Hamiltonians are Hermitian and positive semidefinite") {
  for (const char* name : {"track0", "clock", "toy7"}) {
    const RuleSet rs = bundled(name);
    ChainOptions opt;
    opt.halting = rs.has_halt_marker;
    opt.orientation = true;
    const ChainHamiltonian h = build_chain_hamiltonian(6, rs, opt);
    CHECK(h.op.is_hermitian());
    CHECK(ground_space(h, 3).energy > -1e-9);
  }
}

TEST_CASE("ground space degeneracy with and without orientation penalties") {
  const RuleSet rs = bundled("track0");
  const GroundSpace g = ground_space(build_chain_hamiltonian(6, rs));
  CHECK(std::abs(g.energy) < 1e-9);
  CHECK(g.degeneracy == 2);
  ChainOptions opt;
  opt.orientation = true;
  CHECK(ground_space(build_chain_hamiltonian(6, rs, opt)).degeneracy == 1);
}

TEST_CASE("history states are zero-energy and related by reflection") {
  const RuleSet rs = bundled("clock");
  const ChainHamiltonian h = build_chain_hamiltonian(8, rs);
  const auto pc = history_state(initial_config(8, rs), rs, h);
  const auto pr = history_state(initial_config(8, rs, Orientation::reverse), rs, h);
  CHECK(std::abs(expectation(h.op, pc)) < 1e-12);
  CHECK(std::abs(expectation(h.op, pr)) < 1e-12);
  CHECK(pc.norm() == doctest::Approx(1.0));
  CHECK(std::abs(pr.dot(reflect_vector(pc, h))) == doctest::Approx(1.0));
  CHECK(std::abs(pr.dot(pc)) < 1e-12);
}

TEST_CASE("halting projector energy on the history state") {
  const RuleSet rs = bundled("toy7");
  ChainOptions opt;
  opt.halting = true;
  const ChainHamiltonian h = build_chain_hamiltonian(6, rs, opt);
  const Orbit o = orbit(initial_config(6, rs), rs);
  const double e = expectation(h.op, history_state(initial_config(6, rs), rs, h));
  CHECK(e == doctest::Approx(static_cast<double>(o.halting_steps) / static_cast<double>(o.configs.size())).epsilon(1e-12));
  CHECK(ground_space(h).energy > 1e-6);
}

TEST_CASE("lambda0 tables") {
  CHECK(chain_length_for_segment(1) == 6);
  CHECK(chain_length_for_segment(2) == 18);
  const Lambda0Table t0 = lambda0_table(bundled("track0"), {6});
  CHECK(t0.entries.front().lambda0 == doctest::Approx(0.0).epsilon(1e-9));
  const Lambda0Table t = lambda0_table(bundled("toy7"), {6, 18}, 0.5);
  CHECK(t.entries[0].provenance == "computed");
  CHECK(t.entries[1].provenance == "history-bound");
  for (const auto& e : t.entries) CHECK(e.lambda0 >= 0.0);
  CHECK(*t.lookup(6) == doctest::Approx(0.5 * t.entries[0].lambda0));
  CHECK_FALSE(t.lookup(10).has_value());
  const Lambda0Table back = lambda0_from_json(t.to_json());
  CHECK(*back.lookup(18) == doctest::Approx(*t.lookup(18)));
}

TEST_CASE("reflected rule sets mirror every canonical rule") {
  const RuleSet rs = bundled("track0");
  RuleSet canon = rs;
  canon.rules.erase(std::remove_if(canon.rules.begin(), canon.rules.end(),
                                   [](const TransitionRule& r) { return r.orientation != Orientation::canonical; }),
                    canon.rules.end());
  const RuleSet full = reflect_ruleset(canon);
  for (const auto& r : canon.rules) {
    const int m = full.rule_at(r.b, r.a);
    REQUIRE(m >= 0);
    CHECK(full.rules[static_cast<std::size_t>(m)].c == r.d);
    CHECK(full.rules[static_cast<std::size_t>(m)].d == r.c);
  }
}
