// SPDX-License-Identifier: Apache-2.0
#include "core/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace gf {

namespace {

std::vector<std::string> split_parts(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == '|') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string key_of(const ChainConfig& c) {
  return std::string(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(std::uint16_t));
}

// All site symbols matched by a pattern string (marker name, exact symbol, or '*'-wildcarded tracks).
std::vector<int> expand_pattern(const RuleSet& rs, const std::string& pat) {
  if (pat == rs.marker_name) return {rs.marker()};
  SitePattern p{split_parts(pat)};
  if (p.parts.size() != rs.tracks.size()) fail_invalid("pattern '" + pat + "' does not match the track layout");
  std::vector<int> out;
  for (int s = 0; s < rs.marker(); ++s)
    if (p.matches(rs.parts[static_cast<std::size_t>(s)])) out.push_back(s);
  if (out.empty()) fail_invalid("pattern '" + pat + "' matches no site state");
  return out;
}

void index_rules(RuleSet& rs) {
  const auto n = static_cast<std::size_t>(rs.dim());
  rs.forward.assign(n * n, -1);
  rs.backward.assign(n * n, -1);
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    const auto& r = rs.rules[i];
    auto& f = rs.forward[static_cast<std::size_t>(r.a) * n + static_cast<std::size_t>(r.b)];
    if (f >= 0)
      fail_invalid("nondeterministic pair (" + rs.symbols[static_cast<std::size_t>(r.a)] + ", " +
                   rs.symbols[static_cast<std::size_t>(r.b)] + "): two rules apply");
    f = static_cast<int>(i);
    auto& b = rs.backward[static_cast<std::size_t>(r.c) * n + static_cast<std::size_t>(r.d)];
    if (b >= 0)
      fail_invalid("pair (" + rs.symbols[static_cast<std::size_t>(r.c)] + ", " + rs.symbols[static_cast<std::size_t>(r.d)] +
                   ") has two predecessor rules");
    b = static_cast<int>(i);
  }
}

std::string pair_name(const RuleSet& rs, int a, int b) {
  return "(" + rs.symbols[static_cast<std::size_t>(a)] + ", " + rs.symbols[static_cast<std::size_t>(b)] + ")";
}

// Orientation leak and reflection symmetry of the two rule halves.
void validate_halves(const RuleSet& rs) {
  std::set<std::pair<int, int>> in[2], out[2];
  std::set<std::tuple<int, int, int, int>> half[2];
  for (const auto& r : rs.rules) {
    const int o = r.orientation == Orientation::canonical ? 0 : 1;
    in[o].insert({r.a, r.b});
    out[o].insert({r.c, r.d});
    half[o].insert({r.a, r.b, r.c, r.d});
  }
  for (int o = 0; o < 2; ++o)
    for (const auto& p : out[o])
      if (in[1 - o].count(p))
        fail_invalid("orientation leak: " + std::string(o == 0 ? "canonical" : "reverse") + " rule produces " +
                     pair_name(rs, p.first, p.second) + ", which starts a rule of the other orientation");
  if (half[1].empty()) return;  // canonical-only set; reflect_ruleset completes it
  std::set<std::tuple<int, int, int, int>> mirrored;
  for (const auto& [a, b, c, d] : half[0]) mirrored.insert({b, a, d, c});
  if (mirrored != half[1]) {
    for (const auto& t : mirrored)
      if (!half[1].count(t))
        fail_invalid("reverse rules are not the reflection of the canonical rules: missing " +
                     pair_name(rs, std::get<0>(t), std::get<1>(t)) + " -> " + pair_name(rs, std::get<2>(t), std::get<3>(t)));
    fail_invalid("reverse rules are not the reflection of the canonical rules: extra reverse rules");
  }
}

}  // namespace

bool SitePattern::matches(const std::vector<std::string>& site_parts) const {
  if (site_parts.size() != parts.size()) return false;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i] != "*" && parts[i] != site_parts[i]) return false;
  return true;
}

int RuleSet::symbol(const std::string& n) const {
  auto it = std::find(symbols.begin(), symbols.end(), n);
  if (it == symbols.end()) fail_invalid("unknown site state '" + n + "'");
  return static_cast<int>(it - symbols.begin());
}

json RuleSet::to_json() const {
  json tr = json::array();
  for (const auto& t : tracks) tr.push_back({{"name", t.name}, {"symbols", t.symbols}});
  std::size_t illegal_pairs = 0;
  for (auto v : illegal) illegal_pairs += v ? 1 : 0;
  return {{"name", name},
          {"version", version},
          {"site_dim", dim()},
          {"tracks", tr},
          {"transitions", rules.size()},
          {"illegal_pairs", illegal_pairs},
          {"transition_scale", transition_scale},
          {"halt_marker", has_halt_marker}};
}

RuleSet load_ruleset(const json& doc) {
  if (!doc.is_object()) fail_invalid("ruleset document must be an object");
  RuleSet rs;
  rs.name = doc.value("name", std::string("ruleset"));
  rs.version = doc.value("version", std::string("0"));
  rs.marker_name = doc.value("marker", std::string("X"));
  rs.blank_name = doc.value("blank", std::string("-"));
  rs.transition_scale = doc.value("transition_scale", 1.0);
  if (!(rs.transition_scale > 0.0)) fail_invalid("transition_scale must be positive");
  if (!doc.contains("tracks") || !doc.at("tracks").is_array() || doc.at("tracks").empty())
    fail_invalid("ruleset lacks a non-empty 'tracks' array");
  for (const auto& t : doc.at("tracks")) {
    Track tk{t.at("name").get<std::string>(), t.at("symbols").get<std::vector<std::string>>()};
    if (tk.symbols.empty()) fail_invalid("track '" + tk.name + "' has no symbols");
    rs.tracks.push_back(std::move(tk));
  }
  // Product basis, first track most significant.
  std::vector<std::size_t> digit(rs.tracks.size(), 0);
  while (true) {
    std::vector<std::string> p;
    std::string joined;
    for (std::size_t k = 0; k < rs.tracks.size(); ++k) {
      p.push_back(rs.tracks[k].symbols[digit[k]]);
      joined += (k ? "|" : "") + p.back();
    }
    rs.symbols.push_back(joined);
    rs.parts.push_back(std::move(p));
    std::size_t k = rs.tracks.size();
    while (k > 0 && ++digit[k - 1] == rs.tracks[k - 1].symbols.size()) digit[--k] = 0;
    if (k == 0) break;
  }
  if (rs.symbols.size() + 1 > 60000) fail_budget("site dimension too large");
  if (std::find(rs.symbols.begin(), rs.symbols.end(), rs.marker_name) != rs.symbols.end())
    fail_invalid("marker name collides with a site state");
  rs.symbols.push_back(rs.marker_name);
  rs.parts.push_back({rs.marker_name});

  for (const auto& t : doc.value("transitions", json::array())) {
    TransitionRule r{rs.symbol(t.at("a").get<std::string>()), rs.symbol(t.at("b").get<std::string>()),
                     rs.symbol(t.at("c").get<std::string>()), rs.symbol(t.at("d").get<std::string>()),
                     Orientation::canonical};
    const std::string o = t.value("orientation", std::string("canonical"));
    if (o == "reverse")
      r.orientation = Orientation::reverse;
    else if (o != "canonical")
      fail_invalid("unknown orientation '" + o + "'");
    if (t.contains("unitary")) {
      const auto& u = t.at("unitary");
      if (!u.is_array() || u.size() != 1 || !u[0].is_array() || u[0].size() != 1 || !u[0][0].is_array() || u[0][0].size() != 2)
        fail_invalid("unitary attachment must be a 1x1 matrix [[[re, im]]]");
      r.phase = cplx(u[0][0][0].get<double>(), u[0][0][1].get<double>());
      if (std::abs(std::abs(r.phase) - 1.0) > 1e-12)
        fail_invalid("non-unitary attachment on rule " + pair_name(rs, r.a, r.b) + " -> " + pair_name(rs, r.c, r.d));
    }
    if (r.a == r.c && r.b == r.d) fail_invalid("rule " + pair_name(rs, r.a, r.b) + " does not change its pair");
    rs.rules.push_back(r);
  }
  index_rules(rs);
  validate_halves(rs);

  const auto n = static_cast<std::size_t>(rs.dim());
  rs.illegal.assign(n * n, 0);
  rs.orient_pen.assign(n * n, 0);
  const json pen = doc.value("penalties", json::object());
  auto pair_list = [&](const json& list, auto&& fn) {
    for (const auto& p : list) {
      if (!p.is_array() || p.size() != 2) fail_invalid("pair entries must be [a, b]");
      for (int a : expand_pattern(rs, p[0].get<std::string>()))
        for (int b : expand_pattern(rs, p[1].get<std::string>())) fn(a, b);
    }
  };
  if (pen.contains("legal_pairs")) {
    std::fill(rs.illegal.begin(), rs.illegal.end(), 1);
    pair_list(pen.at("legal_pairs"), [&](int a, int b) { rs.illegal[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = 0; });
  }
  if (pen.contains("illegal_pairs"))
    pair_list(pen.at("illegal_pairs"), [&](int a, int b) { rs.illegal[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = 1; });
  // A forbidden single site becomes the pair penalties |ax> and |xa> for every x.
  for (const auto& s : pen.value("illegal_states", json::array()))
    for (int a : expand_pattern(rs, s.get<std::string>()))
      for (std::size_t x = 0; x < n; ++x) {
        rs.illegal[static_cast<std::size_t>(a) * n + x] = 1;
        rs.illegal[x * n + static_cast<std::size_t>(a)] = 1;
      }
  pair_list(doc.value("orientation_penalties", json::array()), [&](int a, int b) {
    rs.orient_pen[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] = 1;
    rs.horizontal_orientation.emplace_back(a, b);
  });
  // Vertical signatures sit at the far end of a horizontal side, read right to left.
  pair_list(doc.value("vertical_orientation_penalties", json::array()), [&](int a, int b) {
    rs.orient_pen[static_cast<std::size_t>(b) * n + static_cast<std::size_t>(a)] = 1;
    rs.vertical_orientation.emplace_back(a, b);
  });

  rs.halting.assign(n, 0);
  if (doc.contains("halt_marker") && !doc.at("halt_marker").is_null()) {
    for (int s : expand_pattern(rs, doc.at("halt_marker").get<std::string>())) rs.halting[static_cast<std::size_t>(s)] = 1;
    rs.has_halt_marker = true;
  }
  if (doc.contains("initial")) {
    const auto& in = doc.at("initial");
    const auto cyc = in.at("cycle").get<std::vector<std::string>>();
    if (cyc.size() != 2) fail_invalid("initial.cycle must list two site states");
    rs.initial_first_cycle_last = std::vector<std::string>{in.at("first").get<std::string>(), cyc[0], cyc[1],
                                                           in.at("last").get<std::string>()};
    for (const auto& s : *rs.initial_first_cycle_last) rs.symbol(s);
  }
  return rs;
}

RuleSet load_ruleset_file(const std::string& path) { return load_ruleset(parse_json(read_file(path), path)); }

RuleSet reflect_ruleset(const RuleSet& canonical) {
  RuleSet out = canonical;
  for (const auto& r : canonical.rules)
    if (r.orientation != Orientation::canonical) fail_invalid("reflect_ruleset expects canonical rules only");
  for (const auto& r : canonical.rules) out.rules.push_back({r.b, r.a, r.d, r.c, Orientation::reverse, r.phase});
  index_rules(out);
  validate_halves(out);
  const auto n = static_cast<std::size_t>(out.dim());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (canonical.illegal[a * n + b]) out.illegal[b * n + a] = 1;
  return out;
}

std::string config_str(const ChainConfig& c, const RuleSet& rs) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " " : "") + rs.symbols[c[i]];
  return s;
}

ChainConfig parse_config(const std::string& text, const RuleSet& rs) {
  std::istringstream in(text);
  ChainConfig c;
  for (std::string tok; in >> tok;) c.push_back(static_cast<std::uint16_t>(rs.symbol(tok)));
  return c;
}

ChainConfig reflect_config(const ChainConfig& c) { return ChainConfig(c.rbegin(), c.rend()); }

bool config_legal(const ChainConfig& c, const RuleSet& rs) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (rs.pair_illegal(c[i], c[i + 1])) return false;
  return true;
}

bool is_bracketed(const ChainConfig& c, const RuleSet& rs) {
  if (c.size() < 2 || c.front() != rs.marker() || c.back() != rs.marker()) return false;
  return std::none_of(c.begin() + 1, c.end() - 1, [&](auto s) { return s == rs.marker(); });
}

namespace {
void check_length(int L, bool short_ok = false) {
  if (short_ok) {
    if (L < 3) fail_invalid("chain length must be at least 3");
    return;
  }
  if (L < 4) fail_invalid("chain length must be at least 4");
  if (L % 2 != 0) fail_invalid("chain length must be even, got " + std::to_string(L));
}
}  // namespace

ChainConfig initial_config(int L, const RuleSet& rs, Orientation o) {
  check_length(L);
  if (!rs.initial_first_cycle_last) fail_invalid("ruleset has no 'initial' template");
  const auto& t = *rs.initial_first_cycle_last;
  const int n = L - 2;
  ChainConfig c{static_cast<std::uint16_t>(rs.marker())};
  for (int s = 1; s <= n; ++s) {
    const std::string& name = s == 1 ? t[0] : (s == n ? t[3] : t[static_cast<std::size_t>(1 + (s - 2) % 2)]);
    c.push_back(static_cast<std::uint16_t>(rs.symbol(name)));
  }
  c.push_back(static_cast<std::uint16_t>(rs.marker()));
  return o == Orientation::canonical ? c : reflect_config(c);
}

namespace {
std::vector<ChainConfig> enumerate_unchecked(int L, const RuleSet& rs, std::uint64_t budget);
}

std::vector<ChainConfig> enumerate_bracketed_legal(int L, const RuleSet& rs, std::uint64_t budget) {
  check_length(L);
  return enumerate_unchecked(L, rs, budget);
}

namespace {
std::vector<ChainConfig> enumerate_unchecked(int L, const RuleSet& rs, std::uint64_t budget) {
  std::vector<ChainConfig> out;
  ChainConfig c(static_cast<std::size_t>(L), 0);
  c[0] = static_cast<std::uint16_t>(rs.marker());
  const int M = rs.marker();
  // Depth-first in symbol order; prefixes are extended only through legal pairs.
  std::function<void(int)> rec = [&](int pos) {
    if (pos == L - 1) {
      if (!rs.pair_illegal(c[static_cast<std::size_t>(pos - 1)], M)) {
        c[static_cast<std::size_t>(pos)] = static_cast<std::uint16_t>(M);
        if (out.size() >= budget)
          fail_budget("bracketed legal enumeration exceeded budget " + std::to_string(budget) + " (partial count " +
                      std::to_string(out.size()) + ")");
        out.push_back(c);
      }
      return;
    }
    for (int s = 0; s < M; ++s) {
      if (rs.pair_illegal(c[static_cast<std::size_t>(pos - 1)], s)) continue;
      c[static_cast<std::size_t>(pos)] = static_cast<std::uint16_t>(s);
      rec(pos + 1);
    }
  };
  rec(1);
  return out;
}
}  // namespace

std::optional<ChainConfig> evolve_step(const ChainConfig& c, const RuleSet& rs) {
  int hit = -1, pos = -1;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const int r = rs.rule_at(c[i], c[i + 1]);
    if (r < 0) continue;
    if (hit >= 0) fail_invariant("two rules apply to " + config_str(c, rs));
    hit = r;
    pos = static_cast<int>(i);
  }
  if (hit < 0) return std::nullopt;
  ChainConfig n = c;
  n[static_cast<std::size_t>(pos)] = static_cast<std::uint16_t>(rs.rules[static_cast<std::size_t>(hit)].c);
  n[static_cast<std::size_t>(pos) + 1] = static_cast<std::uint16_t>(rs.rules[static_cast<std::size_t>(hit)].d);
  return n;
}

namespace {
std::size_t halting_sites(const ChainConfig& c, const RuleSet& rs) {
  std::size_t k = 0;
  for (auto s : c) k += rs.halting[s];
  return k;
}

// Rule applied between consecutive orbit members.
const TransitionRule& applied_rule(const ChainConfig& from, const RuleSet& rs) {
  for (std::size_t i = 0; i + 1 < from.size(); ++i) {
    const int r = rs.rule_at(from[i], from[i + 1]);
    if (r >= 0) return rs.rules[static_cast<std::size_t>(r)];
  }
  fail_invariant("no rule applies");
}
}  // namespace

Orbit orbit(const ChainConfig& c0, const RuleSet& rs, std::size_t max_steps) {
  Orbit o;
  std::set<std::string> seen;
  ChainConfig c = c0;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    seen.insert(key_of(c));
    o.configs.push_back(c);
    const std::size_t h = halting_sites(c, rs);
    o.halting_steps += h ? 1 : 0;
    o.halted_flag = o.halted_flag || h > 0;
    auto n = evolve_step(c, rs);
    if (!n) break;
    o.rule_orientations.push_back(applied_rule(c, rs).orientation);
    if (*n == c0) {
      o.period = o.configs.size();
      break;
    }
    if (seen.count(key_of(*n))) break;  // entered a cycle not through c0
    c = std::move(*n);
  }
  return o;
}

std::string orbit_trace(const Orbit& o, const RuleSet& rs) {
  std::size_t w = 0;
  for (const auto& s : rs.symbols) w = std::max(w, s.size());
  std::string out;
  for (const auto& c : o.configs) {
    std::string line;
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::string s = rs.symbols[c[i]];
      s.resize(w, ' ');
      line += (i ? " " : "") + s;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::size_t ChainHamiltonian::index_of(const ChainConfig& c) const {
  auto it = index.find(key_of(c));
  if (it == index.end()) fail_invalid("configuration outside the Hamiltonian basis");
  return it->second;
}

ChainHamiltonian build_chain_hamiltonian(int L, const RuleSet& rs, const ChainOptions& opt) {
  check_length(L, opt.any_length);
  ChainHamiltonian h;
  h.transition_scale = rs.transition_scale;
  auto add_basis = [&](const ChainConfig& c) {
    auto [it, fresh] = h.index.emplace(key_of(c), h.basis.size());
    if (fresh) h.basis.push_back(c);
    return fresh;
  };
  if (opt.restrict_subspace) {
    for (auto& c : enumerate_unchecked(L, rs, opt.budget)) add_basis(c);
    h.legal_count = h.basis.size();
    // Close under forward and backward rules so every transition term stays inside the block.
    for (std::size_t q = 0; q < h.basis.size(); ++q) {
      const ChainConfig c = h.basis[q];
      for (std::size_t i = 0; i + 1 < c.size(); ++i)
        for (const auto* table : {&rs.forward, &rs.backward}) {
          const int r = (*table)[static_cast<std::size_t>(c[i]) * static_cast<std::size_t>(rs.dim()) + c[i + 1]];
          if (r < 0) continue;
          const auto& rule = rs.rules[static_cast<std::size_t>(r)];
          ChainConfig n = c;
          const bool fwd = table == &rs.forward;
          n[i] = static_cast<std::uint16_t>(fwd ? rule.c : rule.a);
          n[i + 1] = static_cast<std::uint16_t>(fwd ? rule.d : rule.b);
          if (!is_bracketed(n, rs)) continue;
          add_basis(n);
          if (h.basis.size() > opt.budget)
            fail_budget("rule closure exceeded budget " + std::to_string(opt.budget) + " (partial count " +
                        std::to_string(h.basis.size()) + ")");
        }
    }
  } else {
    if (rs.dim() > 12 || L > 5) fail_budget("full-space assembly needs site dimension <= 12 and L <= 5");
    const int M = rs.marker();
    const std::uint64_t count = ipow(static_cast<std::uint64_t>(M), static_cast<unsigned>(L - 2));
    for (std::uint64_t k = 0; k < count; ++k) {
      ChainConfig c(static_cast<std::size_t>(L), static_cast<std::uint16_t>(M));
      std::uint64_t r = k;
      for (int i = L - 2; i >= 1; --i) {
        c[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(r % static_cast<std::uint64_t>(M));
        r /= static_cast<std::uint64_t>(M);
      }
      add_basis(c);
    }
    for (const auto& c : h.basis) h.legal_count += config_legal(c, rs) ? 1 : 0;
  }

  if (h.basis.empty()) fail_invalid("no bracketed legal configuration of length " + std::to_string(L));
  const double s = rs.transition_scale;
  h.op = SparseOperator(h.basis.size());
  const auto n = static_cast<std::size_t>(rs.dim());
  for (std::size_t q = 0; q < h.basis.size(); ++q) {
    const auto& c = h.basis[q];
    double diag = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      diag += rs.illegal[c[i] * n + c[i + 1]];
      if (opt.orientation) diag += rs.orient_pen[c[i] * n + c[i + 1]];
    }
    if (opt.halting) diag += static_cast<double>(halting_sites(c, rs));
    if (diag != 0.0) h.op.add(q, q, diag);
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
      const int r = rs.rule_at(c[i], c[i + 1]);
      if (r < 0) continue;
      const auto& rule = rs.rules[static_cast<std::size_t>(r)];
      ChainConfig m = c;
      m[i] = static_cast<std::uint16_t>(rule.c);
      m[i + 1] = static_cast<std::uint16_t>(rule.d);
      auto it = h.index.find(key_of(m));
      if (it == h.index.end()) fail_invariant("subspace not rule-closed at " + config_str(c, rs));
      const std::size_t p = it->second;
      // (|ab> - u|cd>)(<ab| - u*<cd|) on the pair, scaled.
      h.op.add(q, q, s);
      h.op.add(p, p, s);
      h.op.add(p, q, -s * rule.phase);
      h.op.add(q, p, -s * std::conj(rule.phase));
    }
  }
  h.op.canonicalize();
  return h;
}

GroundSpace ground_space(const ChainHamiltonian& h, int k, double tol) {
  auto sp = low_spectrum(h.op, k, tol, true);
  GroundSpace g;
  g.low = sp.values;
  if (g.low.empty()) fail_invariant("empty spectrum");
  g.energy = g.low.front();
  g.degeneracy = ground_multiplicity(g.low, tol);
  for (int i = 0; i < g.degeneracy && i < static_cast<int>(sp.vectors.size()); ++i) g.vectors.push_back(sp.vectors[static_cast<std::size_t>(i)]);
  return g;
}

Eigen::VectorXcd history_state(const ChainConfig& c0, const RuleSet& rs, const ChainHamiltonian& h) {
  const Orbit o = orbit(c0, rs);
  if (!o.period && o.configs.size() > 1) fail_invalid("orbit of the start configuration is not a cycle");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.basis.size()));
  cplx amp(1.0, 0.0);
  for (std::size_t t = 0; t < o.configs.size(); ++t) {
    v[static_cast<Eigen::Index>(h.index_of(o.configs[t]))] = amp;
    if (t + 1 < o.configs.size() || o.period) amp *= applied_rule(o.configs[t], rs).phase;
  }
  if (o.period && std::abs(amp - cplx(1.0, 0.0)) > 1e-12) fail_invalid("phases around the orbit do not multiply to 1");
  return v / std::sqrt(static_cast<double>(o.configs.size()));
}

double expectation(const SparseOperator& op, const Eigen::VectorXcd& v) {
  cplx acc = 0.0;
  for (const auto& t : op.triplets)
    acc += std::conj(v[static_cast<Eigen::Index>(t.row)]) * t.val * v[static_cast<Eigen::Index>(t.col)];
  return acc.real();
}

Eigen::VectorXcd reflect_vector(const Eigen::VectorXcd& v, const ChainHamiltonian& h) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t q = 0; q < h.basis.size(); ++q) {
    if (v[static_cast<Eigen::Index>(q)] == cplx(0.0, 0.0)) continue;
    out[static_cast<Eigen::Index>(h.index_of(reflect_config(h.basis[q])))] = v[static_cast<Eigen::Index>(q)];
  }
  return out;
}

std::optional<double> Lambda0Table::lookup(int r) const {
  for (const auto& e : entries)
    if (e.r == r) return e.lambda0 * scale;
  return std::nullopt;
}

json Lambda0Table::to_json() const {
  json rows = json::array();
  for (const auto& e : entries)
    rows.push_back({{"r", e.r},
                    {"lambda0", e.lambda0},
                    {"provenance", e.provenance},
                    {"period", e.period},
                    {"halting_steps", e.halting_steps},
                    {"history_energy", e.history_energy},
                    {"basis", e.basis}});
  return {{"scale", scale}, {"entries", rows}};
}

Lambda0Table lambda0_from_json(const json& j) {
  Lambda0Table t;
  t.scale = j.value("scale", 1.0);
  for (const auto& e : j.at("entries")) {
    Lambda0Entry x;
    x.r = e.at("r").get<int>();
    x.lambda0 = e.at("lambda0").get<double>();
    if (x.lambda0 < 0.0) fail_invalid("lambda0 entries must be non-negative");
    x.provenance = e.value("provenance", std::string("assumed"));
    t.entries.push_back(x);
  }
  return t;
}

Lambda0Table lambda0_table(const RuleSet& rs, const std::vector<int>& r_list, double scale, std::uint64_t budget) {
  Lambda0Table t;
  t.scale = scale;
  for (int r : r_list) {
    check_length(r);
    Lambda0Entry e;
    e.r = r;
    const Orbit o = orbit(initial_config(r, rs), rs);
    e.period = o.period.value_or(0);
    e.halting_steps = o.halting_steps;
    if (o.period) {
      double k = 0.0;
      for (const auto& c : o.configs) k += static_cast<double>(halting_sites(c, rs));
      e.history_energy = k / static_cast<double>(o.configs.size());
    }
    ChainOptions opt;
    opt.halting = true;
    opt.budget = budget;
    try {
      const auto h = build_chain_hamiltonian(r, rs, opt);
      e.basis = h.basis.size();
      e.lambda0 = std::max(0.0, low_spectrum(h.op, 1, 1e-10).values.front());
      e.provenance = "computed";
    } catch (const Error& err) {
      if (err.status() != Status::budget) throw;
      e.lambda0 = e.history_energy;  // variational upper bound from the history state
      e.provenance = "history-bound";
    }
    t.entries.push_back(e);
  }
  return t;
}

int chain_length_for_segment(int n) { return static_cast<int>(ipow(4, static_cast<unsigned>(n))) + 2; }

}  // namespace gf
