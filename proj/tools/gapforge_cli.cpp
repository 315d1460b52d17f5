// SPDX-License-Identifier: Apache-2.0
// Batch front-end over the C API. Every command writes its artifacts and manifest.json to --out.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gapforge.h"
#include "json.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class Kind { integer, real, flag, text, integers, texts };

struct Opt {
  std::string name;
  Kind kind;
  std::string help;
};

struct Command {
  std::string group, verb, api, help;
  std::vector<Opt> opts;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> c{
      {"tile", "solve", "tile.solve", "find edge-matched tilings",
       {{"L", Kind::integer, "width"}, {"H", Kind::integer, "height (default L)"}, {"limit", Kind::integer, "tilings to keep"},
        {"pins", Kind::texts, "pinned tiles r,c=a,b,c,d"}, {"node_budget", Kind::integer, "search node cap"},
        {"tileset", Kind::text, "tile set file"}}},
      {"tile", "segments", "tile.segments", "count complete red segments of side 4^n",
       {{"tiling", Kind::text, "tiling JSON (else a solved L x H witness)"}, {"L", Kind::integer, "width"},
        {"H", Kind::integer, "height"}, {"n", Kind::integer, "segment level"}, {"tileset", Kind::text, "tile set file"}}},
      {"tile", "bounds", "tile.bounds", "segment count bounds (and rigidity bound with --d)",
       {{"L", Kind::integer, "width"}, {"H", Kind::integer, "height"}, {"n", Kind::integer, "segment level"},
        {"d", Kind::integer, "defect count"}}},
      {"machine", "check", "machine.check", "reversibility and QTM well-formedness",
       {{"machine", Kind::text, "machine file"}, {"window", Kind::integer, "tape window"}}},
      {"machine", "run", "machine.run", "budgeted run",
       {{"machine", Kind::text, "machine file"}, {"input", Kind::text, "input word"}, {"n", Kind::integer, "binary input n"},
        {"max_steps", Kind::integer, "step budget"}, {"max_cells", Kind::integer, "tape budget"}}},
      {"chain", "enumerate", "chain.enumerate", "bracketed legal configurations",
       {{"L", Kind::integer, "chain length"}, {"ruleset", Kind::text, "ruleset file"}, {"budget", Kind::integer, "basis cap"}}},
      {"chain", "evolve", "chain.evolve", "orbit of the initial configuration",
       {{"L", Kind::integer, "chain length"}, {"ruleset", Kind::text, "ruleset file"},
        {"orientation", Kind::text, "canonical or reverse"}, {"max_steps", Kind::integer, "step cap"}}},
      {"chain", "spectrum", "chain.spectrum", "low spectrum of the restricted chain Hamiltonian",
       {{"L", Kind::integer, "chain length"}, {"ruleset", Kind::text, "ruleset file"}, {"k", Kind::integer, "eigenvalues"},
        {"halting", Kind::flag, "add the halting projector"}, {"orientation", Kind::flag, "add orientation penalties"},
        {"any_length", Kind::flag, "admit odd lengths"}, {"budget", Kind::integer, "basis cap"}, {"tol", Kind::real, "tolerance"}}},
      {"chain", "lambda0", "chain.lambda0", "lambda0 table",
       {{"ruleset", Kind::text, "ruleset file"}, {"r", Kind::integers, "chain lengths"}, {"scale", Kind::real, "energy scale"},
        {"budget", Kind::integer, "basis cap"}}},
      {"fuse", "energy", "fuse.energy", "minimum fused energy over tilings",
       {{"L", Kind::integer, "width"}, {"H", Kind::integer, "height"}, {"ruleset", Kind::text, "ruleset file"},
        {"tileset", Kind::text, "tile set file"}, {"node_budget", Kind::integer, "search node cap"},
        {"quantum", Kind::flag, "restricted diagonalization of the witness"}}},
      {"gap", "report", "gap.report", "gapped / gapless report for input n",
       {{"n", Kind::integer, "input"}, {"machine", Kind::text, "machine file"}, {"L", Kind::integers, "lattice sizes"},
        {"max_steps", Kind::integer, "step budget"}, {"beta", Kind::real, "beta"}, {"lambda0", Kind::text, "lambda0 table JSON"},
        {"ruleset", Kind::text, "ruleset for a computed table"}, {"r", Kind::integers, "table chain lengths"},
        {"scale", Kind::real, "table scale"}}},
  };
  return c;
}

struct Bound {
  const Command* cmd;
  CLI::App* app;
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;
  std::map<std::string, bool> flags;
};

json convert(const Bound& b) {
  json p = json::object();
  for (const auto& o : b.cmd->opts) {
    const std::string flag = "--" + o.name;
    if (o.kind == Kind::flag) {
      if (b.app->count(flag)) p[o.name] = true;
      continue;
    }
    if (!b.app->count(flag)) continue;
    auto num = [&](const std::string& s, bool integer) -> json {
      std::size_t used = 0;
      json v = integer ? json(std::stoll(s, &used)) : json(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    try {
      switch (o.kind) {
        case Kind::integer: p[o.name] = num(b.scalars.at(o.name), true); break;
        case Kind::real: p[o.name] = num(b.scalars.at(o.name), false); break;
        case Kind::text: p[o.name] = b.scalars.at(o.name); break;
        case Kind::integers:
          p[o.name] = json::array();
          for (const auto& s : b.lists.at(o.name)) p[o.name].push_back(num(s, true));
          break;
        case Kind::texts: p[o.name] = b.lists.at(o.name); break;
        case Kind::flag: break;
      }
    } catch (const std::logic_error&) {
      throw CLI::ValidationError(flag, "not a valid number");
    }
  }
  return p;
}

int write_outputs(const json& r, const std::string& out) {
  fs::create_directories(out);
  for (const auto& [file, content] : r.at("artifacts").items()) {
    std::ofstream f(fs::path(out) / file, std::ios::binary);
    f << content.get<std::string>();
    if (!f) {
      std::cerr << "error: cannot write " << (fs::path(out) / file).string() << "\n";
      return 2;
    }
  }
  char* dumped = nullptr;
  gf_session* s = nullptr;
  gf_session_create(&s);
  const gf_status st = gf_stable_dump(s, r.at("manifest").dump().c_str(), &dumped);
  gf_session_destroy(s);
  if (st != GF_OK) return st;
  std::ofstream(fs::path(out) / "manifest.json", std::ios::binary) << dumped;
  gf_string_free(dumped);
  return 0;
}

int execute(const std::string& api, const json& params, const std::string& out, bool quiet,
            const json* expected_inputs = nullptr) {
  gf_session* s = nullptr;
  if (gf_session_create(&s) != GF_OK) return 1;
  char* raw = nullptr;
  const gf_status st = gf_run(s, api.c_str(), params.dump().c_str(), &raw);
  if (!raw) {
    std::cerr << "error: " << gf_session_last_error(s) << "\n";
    gf_session_destroy(s);
    return static_cast<int>(st);
  }
  gf_session_destroy(s);
  const json r = json::parse(raw);
  gf_string_free(raw);
  if (expected_inputs && r.at("manifest").at("inputs") != *expected_inputs) {
    std::cerr << "error: input files changed since the manifest was written\n";
    return 2;
  }
  if (!quiet) std::cout << r.at("text").get<std::string>();
  if (const int w = write_outputs(r, out); w != 0) return w;
  if (st == GF_ERR_BUDGET) std::cerr << "budget exhausted; partial artifacts written to " << out << "\n";
  return static_cast<int>(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapforge: tilings, chains, fused Hamiltonians and gap reports"};
  app.require_subcommand(1);
  std::string out = "gapforge-out", format;
  bool quiet = false;
  app.add_option("--out", out, "artifact directory")->capture_default_str();
  app.add_option("--format", format, "keep only artifacts of this format")->check(CLI::IsMember({"json", "csv", "svg", "txt"}));
  app.add_flag("--quiet", quiet, "suppress the console summary");
  app.set_version_flag("--version", std::string(gf_version()));

  std::vector<Bound> bound;
  bound.reserve(commands().size());
  std::map<std::string, CLI::App*> groups;
  for (const auto& cmd : commands()) {
    auto& g = groups[cmd.group];
    if (!g) {
      g = app.add_subcommand(cmd.group, cmd.group + " commands");
      g->require_subcommand(1);
    }
    Bound b{&cmd, g->add_subcommand(cmd.verb, cmd.help), {}, {}, {}};
    bound.push_back(std::move(b));
  }
  for (auto& b : bound)
    for (const auto& o : b.cmd->opts) {
      const std::string flag = "--" + o.name;
      switch (o.kind) {
        case Kind::flag: b.app->add_flag(flag, b.flags[o.name], o.help); break;
        case Kind::integers:
        case Kind::texts: b.app->add_option(flag, b.lists[o.name], o.help); break;
        default: b.app->add_option(flag, b.scalars[o.name], o.help);
      }
    }

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) {
      std::ifstream f(manifest_path);
      if (!f) {
        std::cerr << "error: cannot read " << manifest_path << "\n";
        return 2;
      }
      const json m = json::parse(f);
      json params = m.at("params");
      if (!format.empty()) params["format"] = format;
      return execute(m.at("command").get<std::string>(), params, out, quiet, &m.at("inputs"));
    }
    for (const auto& b : bound)
      if (b.app->parsed()) {
        json params = convert(b);
        if (!format.empty()) params["format"] = format;
        return execute(b.cmd->api, params, out, quiet);
      }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
