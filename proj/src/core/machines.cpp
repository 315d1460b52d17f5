// SPDX-License-Identifier: Apache-2.0
#include "core/machines.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace gf {

namespace {

Move parse_move(const std::string& s) {
  if (s == "L") return Move::L;
  if (s == "R") return Move::R;
  if (s == "N") return Move::N;
  fail_invalid("unknown head move '" + s + "'");
}

const char* move_name(Move m) {
  switch (m) {
    case Move::L: return "L";
    case Move::R: return "R";
    default: return "N";
  }
}

int index_of(const std::vector<std::string>& names, const std::string& n, const char* what) {
  auto it = std::find(names.begin(), names.end(), n);
  if (it == names.end()) fail_invalid(std::string("unknown ") + what + " '" + n + "'");
  return static_cast<int>(it - names.begin());
}

// Shared header fields: alphabet (blank first), states, initial, final.
void read_header(const json& doc, std::string& name, std::vector<std::string>& alphabet, std::vector<std::string>& states,
                 int& q0, int& qf) {
  if (!doc.is_object()) fail_invalid("machine document must be an object");
  name = doc.value("name", std::string("machine"));
  for (const char* key : {"alphabet", "states", "initial", "final"})
    if (!doc.contains(key)) fail_invalid(std::string("machine document lacks '") + key + "'");
  alphabet = doc.at("alphabet").get<std::vector<std::string>>();
  states = doc.at("states").get<std::vector<std::string>>();
  const std::string blank = doc.value("blank", std::string("#"));
  auto b = std::find(alphabet.begin(), alphabet.end(), blank);
  if (b == alphabet.end()) fail_invalid("alphabet lacks the blank '" + blank + "'");
  std::rotate(alphabet.begin(), b, b + 1);
  if (std::set<std::string>(alphabet.begin(), alphabet.end()).size() != alphabet.size())
    fail_invalid("alphabet has repeated symbols");
  if (std::set<std::string>(states.begin(), states.end()).size() != states.size())
    fail_invalid("state list has repeated names");
  q0 = index_of(states, doc.at("initial").get<std::string>(), "state");
  qf = index_of(states, doc.at("final").get<std::string>(), "state");
  if (q0 == qf) fail_invalid("initial and final state coincide");
}

std::uint64_t window_configs(int states, int symbols, int window) {
  std::uint64_t n = ipow(static_cast<std::uint64_t>(symbols), static_cast<unsigned>(window));
  n *= static_cast<std::uint64_t>(window) * static_cast<std::uint64_t>(states);
  if (n > (1ull << 28)) fail_budget("window configuration space too large: " + std::to_string(n));
  return n;
}

// Packed window configuration: ((state * W + head) * S^W + tape).
struct WindowCodec {
  int W, S;
  std::uint64_t SW;
  std::vector<std::uint64_t> pw;
  WindowCodec(int w, int s) : W(w), S(s), SW(ipow(static_cast<std::uint64_t>(s), static_cast<unsigned>(w))) {
    pw.resize(static_cast<std::size_t>(w));
    std::uint64_t p = 1;
    for (int i = 0; i < w; ++i) pw[static_cast<std::size_t>(i)] = p, p *= static_cast<std::uint64_t>(s);
  }
  int cell(std::uint64_t tape, int i) const { return static_cast<int>((tape / pw[static_cast<std::size_t>(i)]) % static_cast<std::uint64_t>(S)); }
  std::uint64_t put(std::uint64_t tape, int i, int sym) const {
    const auto p = pw[static_cast<std::size_t>(i)];
    return tape - static_cast<std::uint64_t>(cell(tape, i)) * p + static_cast<std::uint64_t>(sym) * p;
  }
  std::uint64_t pack(int q, int h, std::uint64_t tape) const {
    return (static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(W) + static_cast<std::uint64_t>(h)) * SW + tape;
  }
};

}  // namespace

int TuringMachine::symbol(const std::string& n) const { return index_of(alphabet, n, "symbol"); }
int TuringMachine::state(const std::string& n) const { return index_of(states, n, "state"); }

json TuringMachine::to_json() const {
  json rows = json::array();
  for (int q = 0; q < num_states(); ++q)
    for (int s = 0; s < num_symbols(); ++s)
      if (const auto& r = rule(q, s))
        rows.push_back({states[static_cast<std::size_t>(q)], alphabet[static_cast<std::size_t>(s)],
                        alphabet[static_cast<std::size_t>(r->write)], states[static_cast<std::size_t>(r->next)],
                        move_name(r->move)});
  return json{{"format", "gapforge-machine"}, {"name", name},       {"alphabet", alphabet},
              {"blank", alphabet[0]},         {"states", states},   {"initial", states[static_cast<std::size_t>(initial)]},
              {"final", states[static_cast<std::size_t>(final_state)]}, {"generalised", generalised}, {"delta", rows}};
}

bool machine_doc_is_quantum(const json& doc) { return doc.is_object() && doc.contains("amplitudes"); }

TuringMachine load_machine(const json& doc) {
  if (machine_doc_is_quantum(doc)) fail_invalid("document describes a quantum machine (amplitude rows)");
  TuringMachine m;
  read_header(doc, m.name, m.alphabet, m.states, m.initial, m.final_state);
  m.generalised = doc.value("generalised", false);
  m.delta.assign(static_cast<std::size_t>(m.num_states() * m.num_symbols()), std::nullopt);
  if (!doc.contains("delta") || !doc.at("delta").is_array()) fail_invalid("machine document lacks a 'delta' array");
  for (const auto& row : doc.at("delta")) {
    if (!row.is_array() || row.size() != 5) fail_invalid("delta row must be [q, read, write, next, move]: " + row.dump());
    const int q = m.state(row[0].get<std::string>());
    const int s = m.symbol(row[1].get<std::string>());
    Transition t{m.symbol(row[2].get<std::string>()), m.state(row[3].get<std::string>()), parse_move(row[4].get<std::string>())};
    if (q == m.final_state) fail_invalid("final state has an outgoing rule: " + row.dump());
    if (t.move == Move::N && !m.generalised) fail_invalid("N move requires the generalised flag: " + row.dump());
    auto& slot = m.delta[static_cast<std::size_t>(q * m.num_symbols() + s)];
    if (slot) fail_invalid("two rules for (" + row[0].get<std::string>() + ", " + row[1].get<std::string>() + ")");
    slot = t;
  }
  for (int q = 0; q < m.num_states(); ++q) {
    if (q == m.final_state) continue;
    for (int s = 0; s < m.num_symbols(); ++s)
      if (!m.rule(q, s))
        fail_invalid("transition function undefined on (" + m.states[static_cast<std::size_t>(q)] + ", " +
                     m.alphabet[static_cast<std::size_t>(s)] + ")");
  }
  return m;
}

TuringMachine load_machine_file(const std::string& path) { return load_machine(parse_json(read_file(path), path)); }

QuantumTuringMachine load_qtm(const json& doc) {
  QuantumTuringMachine m;
  read_header(doc, m.name, m.alphabet, m.states, m.initial, m.final_state);
  if (!doc.contains("amplitudes") || !doc.at("amplitudes").is_array()) fail_invalid("quantum machine lacks 'amplitudes'");
  for (const auto& row : doc.at("amplitudes")) {
    if (!row.is_array() || row.size() != 7)
      fail_invalid("amplitude row must be [q, read, write, next, move, re, im]: " + row.dump());
    Amplitude a{index_of(m.states, row[0].get<std::string>(), "state"), index_of(m.alphabet, row[1].get<std::string>(), "symbol"),
                index_of(m.alphabet, row[2].get<std::string>(), "symbol"), index_of(m.states, row[3].get<std::string>(), "state"),
                parse_move(row[4].get<std::string>()), cplx(row[5].get<double>(), row[6].get<double>())};
    if (!std::isfinite(a.amp.real()) || !std::isfinite(a.amp.imag())) fail_invalid("non-finite amplitude: " + row.dump());
    if (a.amp != cplx(0.0, 0.0)) m.rows.push_back(a);
  }
  return m;
}

int TapeConfig::read(long long cell) const {
  auto it = tape.find(cell);
  return it == tape.end() ? 0 : it->second;
}

void TapeConfig::write(long long cell, int sym) {
  if (sym == 0)
    tape.erase(cell);
  else
    tape[cell] = sym;
}

TapeConfig initial_config(const TuringMachine& m, const std::string& input) {
  // Longest-match tokenisation so multi-character symbol names work.
  std::vector<int> order(static_cast<std::size_t>(m.num_symbols()));
  for (int i = 0; i < m.num_symbols(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return m.alphabet[static_cast<std::size_t>(a)].size() > m.alphabet[static_cast<std::size_t>(b)].size();
  });
  TapeConfig c;
  c.head = 1;
  c.state = m.initial;
  std::size_t pos = 0;
  long long cell = 1;
  while (pos < input.size()) {
    int found = -1;
    for (int s : order) {
      const auto& name = m.alphabet[static_cast<std::size_t>(s)];
      if (!name.empty() && input.compare(pos, name.size(), name) == 0) {
        found = s;
        break;
      }
    }
    if (found < 0) fail_invalid("input character '" + input.substr(pos, 1) + "' is not in the alphabet");
    if (found == 0) fail_invalid("input may not contain the blank symbol");
    c.write(cell++, found);
    pos += m.alphabet[static_cast<std::size_t>(found)].size();
  }
  return c;
}

TapeConfig step_tm(const TuringMachine& m, const TapeConfig& c) {
  if (c.state == m.final_state) fail_invalid("cannot step a halted configuration");
  const auto& r = m.rule(c.state, c.read(c.head));
  if (!r) fail_invariant("missing transition");
  TapeConfig n = c;
  n.write(c.head, r->write);
  n.state = r->next;
  n.head = c.head + static_cast<int>(r->move);
  return n;
}

std::string tape_output(const TuringMachine& m, const TapeConfig& c) {
  if (c.tape.empty()) return {};
  std::string out;
  const long long lo = c.tape.begin()->first, hi = c.tape.rbegin()->first;
  for (long long i = lo; i <= hi; ++i) out += m.alphabet[static_cast<std::size_t>(c.read(i))];
  return out;
}

RunResult run_tm(const TuringMachine& m, const std::string& input, long long max_steps, long long max_cells) {
  if (max_steps < 0 || max_cells < 2) fail_invalid("run needs max_steps >= 0 and max_cells >= 2");
  RunResult res;
  TapeConfig c = initial_config(m, input);
  if (!c.tape.empty() && c.tape.rbegin()->first >= max_cells) fail_invalid("input does not fit in max_cells");
  while (c.state != m.final_state && res.steps < max_steps) {
    const auto& r = m.rule(c.state, c.read(c.head));
    const long long nh = c.head + static_cast<int>(r->move);
    if (nh < 0 || nh >= max_cells) {
      res.out_of_tape = true;
      break;
    }
    c = step_tm(m, c);
    ++res.steps;
  }
  res.halted = c.state == m.final_state;
  if (res.halted) res.output = tape_output(m, c);
  res.final_config = std::move(c);
  return res;
}

QuantumTuringMachine lift_to_qtm(const TuringMachine& m, bool normal_form) {
  QuantumTuringMachine q;
  q.name = m.name + "-lifted";
  q.alphabet = m.alphabet;
  q.states = m.states;
  q.initial = m.initial;
  q.final_state = m.final_state;
  for (int s = 0; s < m.num_states(); ++s)
    for (int a = 0; a < m.num_symbols(); ++a)
      if (const auto& r = m.rule(s, a)) q.rows.push_back({s, a, r->write, r->next, r->move, cplx(1.0, 0.0)});
  if (normal_form)
    for (int a = 0; a < m.num_symbols(); ++a) q.rows.push_back({m.final_state, a, a, m.initial, Move::N, cplx(1.0, 0.0)});
  return q;
}

QtmCheck check_qtm(const QuantumTuringMachine& m, int window) {
  if (window < 3) fail_invalid("window must be at least 3 cells");
  const int S = static_cast<int>(m.alphabet.size()), Q = static_cast<int>(m.states.size());
  QtmCheck out;

  // Normal form: the final state loops back to the initial state without moving.
  {
    bool ok = true;
    std::vector<int> seen(static_cast<std::size_t>(S), 0);
    for (const auto& a : m.rows) {
      if (a.state != m.final_state) continue;
      const bool rule = a.write == a.read && a.next == m.initial && a.move == Move::N && std::abs(a.amp - cplx(1.0, 0.0)) < 1e-12;
      if (!rule) ok = false;
      ++seen[static_cast<std::size_t>(a.read)];
    }
    for (int c : seen) ok = ok && c == 1;
    out.normal_form = ok;
  }
  // Unidirectional: every state is entered with a single head direction.
  {
    std::vector<std::set<int>> dirs(static_cast<std::size_t>(Q));
    for (const auto& a : m.rows) dirs[static_cast<std::size_t>(a.next)].insert(static_cast<int>(a.move));
    out.unidirectional = std::all_of(dirs.begin(), dirs.end(), [](const auto& d) { return d.size() <= 1; });
  }

  // Isometry of the time evolution on configurations whose head stays inside the window.
  std::vector<std::vector<const Amplitude*>> by_key(static_cast<std::size_t>(Q * S));
  bool any = false;
  for (const auto& a : m.rows) {
    by_key[static_cast<std::size_t>(a.state * S + a.read)].push_back(&a);
    any = true;
  }
  if (!any) fail_invalid("machine has no transitions");
  std::vector<char> active(static_cast<std::size_t>(Q), 0);
  for (const auto& a : m.rows) active[static_cast<std::size_t>(a.state)] = 1;

  window_configs(Q, S, window);
  const WindowCodec codec(window, S);
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint64_t, cplx>>> image;
  std::unordered_map<std::uint64_t, double> norms;
  long long columns = 0;
  for (int q = 0; q < Q; ++q) {
    if (!active[static_cast<std::size_t>(q)]) continue;
    for (int h = 1; h + 1 < window; ++h)
      for (std::uint64_t tape = 0; tape < codec.SW; ++tape) {
        const std::uint64_t col = codec.pack(q, h, tape);
        ++columns;
        std::unordered_map<std::uint64_t, cplx> entries;
        for (const Amplitude* a : by_key[static_cast<std::size_t>(q * S + codec.cell(tape, h))])
          entries[codec.pack(a->next, h + static_cast<int>(a->move), codec.put(tape, h, a->write))] += a->amp;
        double nrm = 0.0;
        for (const auto& [row, v] : entries) {
          if (std::abs(v) == 0.0) continue;
          image[row].push_back({col, v});
          nrm += std::norm(v);
        }
        norms[col] = nrm;
      }
  }
  double defect = 0.0;
  for (const auto& [col, nrm] : norms) defect = std::max(defect, std::abs(nrm - 1.0));
  std::unordered_map<std::uint64_t, cplx> overlaps;  // off-diagonal Gram entries keyed by column pair
  for (const auto& [row, cols] : image)
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (std::size_t j = i + 1; j < cols.size(); ++j) {
        auto a = cols[i], b = cols[j];
        if (a.first > b.first) std::swap(a, b);
        overlaps[a.first * codec.SW * static_cast<std::uint64_t>(Q * window) + b.first] += std::conj(a.second) * b.second;
      }
  for (const auto& [key, v] : overlaps) defect = std::max(defect, std::abs(v));
  out.isometry_defect = defect;
  out.well_formed = defect <= 1e-9;
  out.configurations = columns;
  return out;
}

bool is_reversible(const TuringMachine& m, int window) {
  if (window < 3) fail_invalid("window must be at least 3 cells");
  const int S = m.num_symbols(), Q = m.num_states();
  const std::uint64_t total = window_configs(Q, S, window);
  const WindowCodec codec(window, S);
  std::vector<unsigned char> hits(total, 0);
  for (int q = 0; q < Q; ++q) {
    if (q == m.final_state) continue;
    for (int h = 0; h < window; ++h)
      for (std::uint64_t tape = 0; tape < codec.SW; ++tape) {
        const auto& r = m.rule(q, codec.cell(tape, h));
        const int nh = h + static_cast<int>(r->move);
        if (nh < 0 || nh >= window) continue;
        auto& c = hits[codec.pack(r->next, nh, codec.put(tape, h, r->write))];
        if (++c > 1) return false;
      }
  }
  return true;
}

std::optional<TapeConfig> predecessor(const TuringMachine& m, const TapeConfig& c) {
  std::optional<TapeConfig> found;
  for (int q = 0; q < m.num_states(); ++q)
    for (int s = 0; s < m.num_symbols(); ++s) {
      const auto& r = m.rule(q, s);
      if (!r || r->next != c.state) continue;
      const long long prev = c.head - static_cast<int>(r->move);
      if (c.read(prev) != r->write) continue;
      if (found) fail_invariant("configuration has several predecessors; machine is not reversible");
      TapeConfig p = c;
      p.write(prev, s);
      p.head = prev;
      p.state = q;
      found = std::move(p);
    }
  return found;
}

TuringMachine dovetail(const TuringMachine& m1, const TuringMachine& m2) {
  if (m1.alphabet != m2.alphabet) fail_invalid("dovetail needs identical alphabets");
  TuringMachine d;
  d.name = m1.name + "+" + m2.name;
  d.alphabet = m1.alphabet;
  d.generalised = m1.generalised || m2.generalised;
  const int S = d.num_symbols();
  const int n1 = m1.num_states();
  // m1 states keep their index (its final state becomes the first rewind state),
  // then the second rewind state, then m2 states.
  for (const auto& s : m1.states) d.states.push_back("a." + s);
  d.states[static_cast<std::size_t>(m1.final_state)] = "rewind.step";
  d.states.push_back("rewind.scan");
  const int scan = n1;
  const int off = n1 + 1;
  for (const auto& s : m2.states) d.states.push_back("b." + s);
  d.initial = m1.initial;
  d.final_state = off + m2.final_state;
  d.delta.assign(static_cast<std::size_t>(d.num_states() * S), std::nullopt);
  auto set = [&](int q, int s, Transition t) { d.delta[static_cast<std::size_t>(q * S + s)] = t; };
  for (int q = 0; q < n1; ++q)
    for (int s = 0; s < S; ++s)
      if (const auto& r = m1.rule(q, s)) set(q, s, *r);
  // Step left once, then walk left over the output to the margin and re-enter at its first cell.
  for (int s = 0; s < S; ++s) {
    set(m1.final_state, s, {s, scan, Move::L});
    set(scan, s, s == 0 ? Transition{0, off + m2.initial, Move::R} : Transition{s, scan, Move::L});
  }
  for (int q = 0; q < m2.num_states(); ++q)
    for (int s = 0; s < S; ++s)
      if (const auto& r = m2.rule(q, s)) set(off + q, s, {r->write, off + r->next, r->move});
  return d;
}

std::string binary_string(unsigned long long n) {
  if (n == 0) return "0";
  std::string s;
  for (; n; n >>= 1) s.insert(s.begin(), static_cast<char>('0' + (n & 1)));
  return s;
}

TuringMachine binary_writer(unsigned long long n, const std::vector<std::string>& alphabet) {
  TuringMachine m;
  m.name = "binary-writer-" + std::to_string(n);
  m.alphabet = alphabet;
  const int zero = m.symbol("0"), one = m.symbol("1");
  if (m.alphabet.empty() || m.alphabet[0] != "#") fail_invalid("writer alphabet must start with the blank");
  const std::string bits = binary_string(n);
  const int k = static_cast<int>(bits.size());
  for (int i = 0; i <= k; ++i) m.states.push_back(i == k ? "halt" : "w" + std::to_string(i));
  m.initial = 0;
  m.final_state = k;
  const int S = m.num_symbols();
  m.delta.assign(static_cast<std::size_t>((k + 1) * S), std::nullopt);
  // State i swaps blank with bit i (a permutation of the alphabet, so every step is invertible).
  for (int i = 0; i < k; ++i) {
    const int b = bits[static_cast<std::size_t>(i)] == '1' ? one : zero;
    for (int s = 0; s < S; ++s) {
      const int w = s == 0 ? b : (s == b ? 0 : s);
      m.delta[static_cast<std::size_t>(i * S + s)] = Transition{w, i + 1, Move::R};
    }
  }
  return m;
}

}  // namespace gf
