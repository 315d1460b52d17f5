// SPDX-License-Identifier: Apache-2.0
#include "core/commands.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "core/fusion.hpp"
#include "core/spectra.hpp"

namespace gf {

namespace {

namespace fs = std::filesystem;

// Collects validated parameters, input hashes and outputs of one command.
class Ctx {
 public:
  Ctx(std::string name, const json& params) : name_(std::move(name)), in_(params) {
    if (!in_.is_object()) fail_invalid("parameters must be a JSON object");
  }

  long long integer(const std::string& key, long long def, long long lo, long long hi) {
    long long v = def;
    if (in_.contains(key)) {
      const json& j = in_.at(key);
      if (!j.is_number_integer()) fail_invalid(key + " must be an integer");
      v = j.get<long long>();
    }
    if (v < lo || v > hi)
      fail_invalid(key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(v));
    used_[key] = v;
    return v;
  }

  double real(const std::string& key, double def, double lo, double hi) {
    double v = def;
    if (in_.contains(key)) {
      const json& j = in_.at(key);
      if (!j.is_number()) fail_invalid(key + " must be a number");
      v = j.get<double>();
    }
    if (!(v >= lo && v <= hi)) fail_invalid(key + " out of range");
    used_[key] = v;
    return v;
  }

  bool flag(const std::string& key, bool def) {
    bool v = def;
    if (in_.contains(key)) {
      if (!in_.at(key).is_boolean()) fail_invalid(key + " must be a boolean");
      v = in_.at(key).get<bool>();
    }
    used_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& def, const std::vector<std::string>& allowed = {}) {
    std::string v = def;
    if (in_.contains(key)) {
      if (!in_.at(key).is_string()) fail_invalid(key + " must be a string");
      v = in_.at(key).get<std::string>();
    }
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end())
      fail_invalid("unknown " + key + ": " + v);
    used_[key] = v;
    return v;
  }

  std::vector<long long> integers(const std::string& key, const std::vector<long long>& def, long long lo, long long hi) {
    std::vector<long long> v = def;
    if (in_.contains(key)) {
      const json& j = in_.at(key);
      if (!j.is_array()) fail_invalid(key + " must be an array of integers");
      v.clear();
      for (const auto& x : j) {
        if (!x.is_number_integer()) fail_invalid(key + " must be an array of integers");
        v.push_back(x.get<long long>());
      }
    }
    for (long long x : v)
      if (x < lo || x > hi) fail_invalid(key + " entries must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    used_[key] = v;
    return v;
  }

  std::vector<std::string> strings(const std::string& key) {
    std::vector<std::string> v;
    if (in_.contains(key)) {
      if (!in_.at(key).is_array()) fail_invalid(key + " must be an array of strings");
      for (const auto& x : in_.at(key)) {
        if (!x.is_string()) fail_invalid(key + " must be an array of strings");
        v.push_back(x.get<std::string>());
      }
    }
    used_[key] = v;
    return v;
  }

  // Resolves a data file: as given, then under the bundled data directory (and `sub`).
  std::optional<std::string> path(const std::string& key, const std::string& def, const std::string& sub = "") {
    std::string p = def;
    if (in_.contains(key) && !in_.at(key).is_null()) {
      if (!in_.at(key).is_string()) fail_invalid(key + " must be a path");
      p = in_.at(key).get<std::string>();
    }
    if (p.empty()) {
      used_[key] = nullptr;
      return std::nullopt;
    }
    std::string found;
    for (const std::string& c : {p, data_path(p), sub.empty() ? std::string() : data_path(sub + "/" + p)})
      if (!c.empty() && fs::is_regular_file(c)) {
        found = fs::weakly_canonical(c).string();
        break;
      }
    if (found.empty()) fail_invalid(key + ": no such file " + p);
    used_[key] = found;
    inputs_[found] = sha256_hex(read_file(found));
    return found;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : in_.items())
      if (!used_.contains(k) && k != "format") fail_invalid("unknown parameter for " + name_ + ": " + k);
  }

  void artifact(const std::string& file, std::string content) { artifacts_[file] = std::move(content); }
  void say(const std::string& line) { text_ += line + "\n"; }
  json& result() { return result_; }
  void budget_hit() { status_ = "budget"; }

  json finish(const std::string& format) {
    json arts = json::object();
    for (const auto& [file, content] : artifacts_) {
      const std::string ext = fs::path(file).extension().string();
      if (format.empty() || ext == "." + format) arts[file] = content;
    }
    if (!format.empty() && arts.empty()) fail_invalid("format " + format + " is not available for " + name_);
    json outputs = json::object();
    for (const auto& [file, content] : arts.items()) outputs[file] = sha256_hex(content.get<std::string>());
    json params = used_;
    if (!format.empty()) params["format"] = format;
    json manifest{{"tool", "gapforge"},
                  {"versions", {{"gapforge", kVersion}, {"manifest", 1}}},
                  {"command", name_},
                  {"params", params},
                  {"inputs", inputs_},
                  {"seeds", seeds_},
                  {"outputs", outputs},
                  {"status", status_}};
    return {{"status", status_}, {"text", text_}, {"result", result_}, {"artifacts", arts}, {"manifest", manifest}};
  }

  json& seeds() { return seeds_; }

 private:
  std::string name_;
  const json& in_;
  json used_ = json::object();
  json inputs_ = json::object();
  json seeds_ = json::object();
  json result_ = json::object();
  std::map<std::string, std::string> artifacts_;
  std::string text_;
  std::string status_ = "ok";
};

TileSet tiles(Ctx& c) {
  const auto p = c.path("tileset", "");
  return p ? load_tileset_file(*p) : bundled_tileset();
}

RuleSet rules(Ctx& c, const std::string& def) { return load_ruleset_file(*c.path("ruleset", def)); }

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

Tiling tiling_from_json(const json& j) {
  Tiling t;
  t.width = j.at("width").get<int>();
  t.height = j.at("height").get<int>();
  for (const auto& row : j.at("cells"))
    for (const auto& cell : row) t.cells.push_back(cell.get<Tile>());
  if (t.cells.size() != static_cast<std::size_t>(t.width * t.height)) fail_invalid("tiling cell count does not match its size");
  return t;
}

// tile solve: L, H, limit, pins, node_budget, tileset
void tile_solve(Ctx& c) {
  const int L = static_cast<int>(c.integer("L", 8, 1, 64)), H = static_cast<int>(c.integer("H", L, 1, 64));
  const auto limit = static_cast<std::size_t>(c.integer("limit", 1, 1, 100));
  const auto budget = static_cast<std::uint64_t>(c.integer("node_budget", 50'000'000, 1, 1'000'000'000));
  std::vector<Pin> pins;
  for (const auto& s : c.strings("pins")) pins.push_back(parse_pin(s));
  const TileSet ts = tiles(c);
  c.reject_unknown();
  const SolveResult r = solve_tiling(L, H, ts, pins, limit, budget);
  if (r.tilings.empty() && r.budget_hit) fail_budget("tiling search exhausted its node budget before finding a tiling");
  if (r.tilings.empty()) fail_invalid("no valid tiling exists for the given size and pins");
  if (r.budget_hit) c.budget_hit();
  for (std::size_t i = 0; i < r.tilings.size(); ++i) {
    const std::string stem = "tiling_" + std::to_string(i);
    c.artifact(stem + ".json", stable_dump(r.tilings[i].to_json(ts)));
    c.artifact(stem + ".svg", r.tilings[i].to_svg(ts));
  }
  c.result() = {{"tilings", r.tilings.size()}, {"nodes", r.nodes}, {"exhausted", r.exhausted}};
  c.say("tilings " + std::to_string(r.tilings.size()) + " nodes " + std::to_string(r.nodes));
}

// tile segments: tiling file or a solved L x H witness; n
void tile_segments(Ctx& c) {
  const int n = static_cast<int>(c.integer("n", 1, 1, 4));
  const TileSet ts = tiles(c);
  const auto file = c.path("tiling", "");
  Tiling t;
  if (file) {
    t = tiling_from_json(parse_json(read_file(*file), *file));
  } else {
    const int L = static_cast<int>(c.integer("L", 16, 1, 64)), H = static_cast<int>(c.integer("H", L, 1, 64));
    c.reject_unknown();
    const SolveResult r = solve_tiling(L, H, ts, {}, 1);
    if (r.tilings.empty()) (r.budget_hit ? fail_budget : fail_invalid)("no tiling available to count");
    t = r.tilings.front();
  }
  c.reject_unknown();
  const SegmentCount s = count_red_segments(t, ts, n);
  const SegmentBounds b = segment_bounds(t.width, t.height, n);
  c.result() = {{"top", s.top}, {"bottom", s.bottom}, {"left", s.left}, {"right", s.right}, {"total", s.total()},
                {"lower", b.lower}, {"upper", b.upper}, {"defects", t.defects(ts).size()}};
  c.artifact("segments.json", stable_dump(c.result()));
  c.say(std::to_string(s.top) + " " + std::to_string(s.bottom) + " " + std::to_string(s.left) + " " +
        std::to_string(s.right) + " total " + std::to_string(s.total()));
}

// tile bounds: L, H, n, optional d
void tile_bounds(Ctx& c) {
  const long long L = c.integer("L", 16, 0, 1LL << 30), H = c.integer("H", L, 0, 1LL << 30);
  const int n = static_cast<int>(c.integer("n", 1, 1, 14));
  const long long d = c.integer("d", -1, -1, 1LL << 30);
  c.reject_unknown();
  const SegmentBounds b = segment_bounds(L, H, n);
  c.result() = {{"lower", b.lower}, {"upper", b.upper}};
  std::string csv = csv_line({"L", "H", "n", "lower", "upper"}) +
                    csv_line({std::to_string(L), std::to_string(H), std::to_string(n), std::to_string(b.lower), std::to_string(b.upper)});
  c.say(std::to_string(b.lower) + " " + std::to_string(b.upper));
  if (d >= 0) {
    const RigidityBound r = rigidity_bound(L, H, n, d);
    c.result()["rigidity_raw"] = r.raw;
    c.result()["rigidity"] = r.clamped;
    c.say("rigidity " + std::to_string(r.clamped) + " (raw " + std::to_string(r.raw) + ")");
  }
  c.artifact("bounds.json", stable_dump(c.result()));
  c.artifact("bounds.csv", csv);
}

void machine_check(Ctx& c) {
  const std::string file = *c.path("machine", "", "machines");
  const int window = static_cast<int>(c.integer("window", 8, 1, 64));
  c.reject_unknown();
  const json doc = parse_json(read_file(file), file);
  QtmCheck q;
  json r;
  if (machine_doc_is_quantum(doc)) {
    q = check_qtm(load_qtm(doc), window);
    r["kind"] = "quantum";
  } else {
    const TuringMachine m = load_machine(doc);
    r["kind"] = "classical";
    r["reversible"] = is_reversible(m, window);
    q = check_qtm(lift_to_qtm(m), window);
  }
  r["well_formed"] = q.well_formed;
  r["normal_form"] = q.normal_form;
  r["unidirectional"] = q.unidirectional;
  r["isometry_defect"] = q.isometry_defect;
  r["configurations"] = q.configurations;
  c.result() = r;
  c.artifact("machine_check.json", stable_dump(r));
  c.say(std::string("well_formed ") + (q.well_formed ? "yes" : "no") + " normal_form " + (q.normal_form ? "yes" : "no") +
        " unidirectional " + (q.unidirectional ? "yes" : "no"));
}

void machine_run(Ctx& c) {
  const TuringMachine m = load_machine_file(*c.path("machine", "", "machines"));
  const long long n = c.integer("n", -1, -1, (1LL << 62));
  const std::string input = n >= 0 ? binary_string(static_cast<unsigned long long>(n)) : c.text("input", "");
  const long long steps = c.integer("max_steps", 100000, 0, 1'000'000'000);
  const long long cells = c.integer("max_cells", 1 << 20, 1, 1 << 26);
  c.reject_unknown();
  const RunResult r = run_tm(m, input, steps, cells);
  c.result() = {{"halted", r.halted}, {"steps", r.steps}, {"output", r.output}, {"out_of_tape", r.out_of_tape},
                {"verdict_source", "budgeted"}};
  c.artifact("run.json", stable_dump(c.result()));
  c.say(std::string(r.halted ? "halted" : "running") + " after " + std::to_string(r.steps) + " steps" +
        (r.halted ? " output " + r.output : ""));
}

void chain_enumerate(Ctx& c) {
  const int L = static_cast<int>(c.integer("L", 6, 3, 64));
  const RuleSet rs = rules(c, "track0.json");
  const auto budget = static_cast<std::uint64_t>(c.integer("budget", 2'000'000, 1, 100'000'000));
  c.reject_unknown();
  const auto configs = enumerate_bracketed_legal(L, rs, budget);
  std::string text;
  json arr = json::array();
  for (const auto& x : configs) {
    arr.push_back(config_str(x, rs));
    text += config_str(x, rs) + "\n";
  }
  c.result() = {{"count", configs.size()}};
  c.artifact("configs.json", stable_dump(arr));
  c.artifact("configs.txt", text);
  c.say("configurations " + std::to_string(configs.size()));
}

void chain_evolve(Ctx& c) {
  const int L = static_cast<int>(c.integer("L", 6, 3, 64));
  const RuleSet rs = rules(c, "track0.json");
  const std::string o = c.text("orientation", "canonical", {"canonical", "reverse"});
  const auto steps = static_cast<std::size_t>(c.integer("max_steps", 100000, 1, 10'000'000));
  c.reject_unknown();
  const Orbit ob = orbit(initial_config(L, rs, o == "canonical" ? Orientation::canonical : Orientation::reverse), rs, steps);
  json arr = json::array();
  for (const auto& x : ob.configs) arr.push_back(config_str(x, rs));
  c.result() = {{"length", ob.configs.size()},
                {"period", ob.period ? json(*ob.period) : json(nullptr)},
                {"halting_steps", ob.halting_steps}};
  c.artifact("orbit.json", stable_dump({{"configs", arr}, {"period", c.result()["period"]}}));
  c.artifact("orbit.txt", orbit_trace(ob, rs));
  c.say(orbit_trace(ob, rs));
}

void chain_spectrum(Ctx& c) {
  const int L = static_cast<int>(c.integer("L", 6, 3, 64));
  const RuleSet rs = rules(c, "track0.json");
  const int k = static_cast<int>(c.integer("k", 6, 1, 64));
  ChainOptions opt;
  opt.halting = c.flag("halting", false);
  opt.orientation = c.flag("orientation", false);
  opt.any_length = c.flag("any_length", false);
  opt.budget = static_cast<std::uint64_t>(c.integer("budget", 2'000'000, 1, 100'000'000));
  const double tol = c.real("tol", 1e-9, 1e-15, 1e-3);
  c.reject_unknown();
  const ChainHamiltonian h = build_chain_hamiltonian(L, rs, opt);
  const GroundSpace g = ground_space(h, k, tol);
  std::string csv = csv_line({"index", "value"});
  for (std::size_t i = 0; i < g.low.size(); ++i) csv += csv_line({std::to_string(i), format_double(g.low[i])});
  c.result() = {{"lambda0", g.energy}, {"degeneracy", g.degeneracy}, {"low", g.low}, {"basis", h.basis.size()}};
  c.artifact("spectrum.json", stable_dump(c.result()));
  c.artifact("spectrum.csv", csv);
  c.say("lambda0=" + format_double(std::abs(g.energy) < tol ? 0.0 : g.energy) + " degeneracy " + std::to_string(g.degeneracy));
}

void chain_lambda0(Ctx& c) {
  const RuleSet rs = rules(c, "toy7.json");
  std::vector<int> r;
  for (long long x : c.integers("r", {6}, 3, 1 << 20)) r.push_back(static_cast<int>(x));
  const double scale = c.real("scale", 1.0, 0.0, 1e6);
  const auto budget = static_cast<std::uint64_t>(c.integer("budget", 200'000, 1, 100'000'000));
  c.reject_unknown();
  const Lambda0Table t = lambda0_table(rs, r, scale, budget);
  std::string csv = csv_line({"r", "lambda0", "provenance"});
  for (const auto& e : t.entries) csv += csv_line({std::to_string(e.r), format_double(e.lambda0 * scale), e.provenance});
  c.result() = t.to_json();
  c.artifact("lambda0.json", stable_dump(t.to_json()));
  c.artifact("lambda0.csv", csv);
  for (const auto& e : t.entries) c.say("r " + std::to_string(e.r) + " lambda0 " + format_double(e.lambda0 * scale) + " " + e.provenance);
}

void fuse_energy(Ctx& c) {
  const int L = static_cast<int>(c.integer("L", 2, 1, 8)), H = static_cast<int>(c.integer("H", L, 1, 8));
  const RuleSet rs = rules(c, "reduced_halting.json");
  const TileSet ts = tiles(c);
  const auto budget = static_cast<std::uint64_t>(c.integer("node_budget", 50'000'000, 1, 1'000'000'000));
  const bool quantum = c.flag("quantum", L * H <= 4);
  c.reject_unknown();
  Lambda0Table table;
  json skipped = json::array();
  for (int len = 3; len <= std::max(L, H) + 1; ++len) {
    try {
      Lambda0Entry e;
      e.r = len;
      e.lambda0 = segment_lambda0(rs, len);
      e.provenance = "computed";
      table.entries.push_back(e);
    } catch (const Error& e) {
      if (e.status() != Status::invalid) throw;
      skipped.push_back(len);
    }
  }
  const EnergySearch s = min_energy_over_tilings(L, H, ts, table, budget);
  if (!s.complete) c.budget_hit();
  json r{{"energy", s.energy}, {"complete", s.complete}, {"tilings_examined", s.tilings_examined}, {"nodes", s.nodes},
         {"lambda0", table.to_json()}, {"lengths_without_legal_chain", skipped}};
  if (!s.witness.cells.empty()) {
    c.artifact("witness.json", stable_dump(s.witness.to_json(ts)));
    c.artifact("witness.svg", s.witness.to_svg(ts));
    if (quantum) {
      const Lattice lat = build_lattice(L, H);
      if (L != H) fail_invalid("quantum check needs a square lattice");
      FusionOptions opt;
      opt.orientation_terms = !rs.horizontal_orientation.empty();
      const auto hf = assemble_hf(FusedSiteSpace(ts, rs), opt);
      const BlockSearch b = restricted_ground_energy(lat, hf, tiling_pair_states(lat, s.witness, ts));
      r["restricted_energy"] = b.energy;
      r["sectors"] = b.sectors;
      r["largest_block"] = b.largest_block;
    }
  }
  c.result() = r;
  c.artifact("fuse_energy.json", stable_dump(r));
  c.say("energy " + format_double(s.energy) + (s.complete ? "" : " (incomplete)") +
        (r.contains("restricted_energy") ? " restricted " + format_double(r["restricted_energy"].get<double>()) : ""));
}

void gap_report(Ctx& c) {
  const auto n = static_cast<unsigned long long>(c.integer("n", 1, 0, 1LL << 62));
  const TuringMachine m = load_machine_file(*c.path("machine", "halter.json", "machines"));
  std::vector<int> Ls;
  for (long long x : c.integers("L", {1, 2}, 1, 1 << 20)) Ls.push_back(static_cast<int>(x));
  const long long steps = c.integer("max_steps", 10000, 0, 1'000'000'000);
  const double beta = c.real("beta", 1.0, 1e-9, 1e9);
  Lambda0Table table;
  if (const auto file = c.path("lambda0", "")) {
    table = lambda0_from_json(parse_json(read_file(*file), *file));
  } else {
    const RuleSet rs = rules(c, "toy7.json");
    std::vector<int> r;
    for (long long x : c.integers("r", {6, 18, 66}, 3, 1 << 20)) r.push_back(static_cast<int>(x));
    table = lambda0_table(rs, r, c.real("scale", 1.0, 0.0, 1e6));
  }
  c.reject_unknown();
  double total = 0.0;
  for (int k = 1; k <= 15; ++k)
    if (auto v = segment_energy(table, k)) total += *v;
  if (total >= 0.125) fail_invalid("lambda0 table violates the 1/8 sum bound: " + format_double(total));
  const GapReport g = classify_gap(m, n, Ls, steps, table, beta);
  std::string csv = csv_line({"L", "lambda0", "E_rho"});
  std::vector<std::pair<int, double>> series;
  for (const auto& cell : g.cells) series.emplace_back(cell.L, cell.bound);
  const EnergyDensity ed = energy_density(series);
  for (const auto& [L, e] : ed.series)
    csv += csv_line({std::to_string(L), format_double(e * 2.0 * L * (L + 1.0)), format_double(e)});
  json r = g.to_json();
  r["lambda0_table"] = table.to_json();
  r["energy_density_estimate"] = ed.estimate;
  c.result() = r;
  c.artifact("gap_report.json", stable_dump(r));
  c.artifact("energy_density.csv", csv);
  c.say("classification " + g.classification + " (" + (g.halted ? "halted" : "not halted") + " after " +
        std::to_string(g.steps) + " budgeted steps)");
}

const std::map<std::string, std::function<void(Ctx&)>>& registry() {
  static const std::map<std::string, std::function<void(Ctx&)>> r{
      {"tile.solve", tile_solve},         {"tile.segments", tile_segments},   {"tile.bounds", tile_bounds},
      {"machine.check", machine_check},   {"machine.run", machine_run},       {"chain.enumerate", chain_enumerate},
      {"chain.evolve", chain_evolve},     {"chain.spectrum", chain_spectrum}, {"chain.lambda0", chain_lambda0},
      {"fuse.energy", fuse_energy},       {"gap.report", gap_report},
  };
  return r;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> v;
  for (const auto& [k, f] : registry()) v.push_back(k);
  return v;
}

json run_command(const std::string& command, const json& params) {
  const auto it = registry().find(command);
  if (it == registry().end()) fail_invalid("unknown command: " + command);
  Ctx c(command, params);
  std::string format;
  if (params.contains("format")) {
    if (!params.at("format").is_string()) fail_invalid("format must be a string");
    format = params.at("format").get<std::string>();
    if (format != "json" && format != "csv" && format != "svg" && format != "txt") fail_invalid("unknown format: " + format);
  }
  it->second(c);
  return c.finish(format);
}

}  // namespace gf
