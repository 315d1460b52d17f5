// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/report.hpp"

namespace gf {

enum class Move : int { L = -1, N = 0, R = 1 };

struct Transition {
  int write;
  int next;
  Move move;
};

// Deterministic machine; symbols and states are indices into the name tables.
// Symbol 0 is the blank "#".
struct TuringMachine {
  std::string name;
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  int initial = 0;
  int final_state = 1;
  bool generalised = false;
  // delta[q * |alphabet| + s]; absent entries only for the final state.
  std::vector<std::optional<Transition>> delta;

  int num_symbols() const { return static_cast<int>(alphabet.size()); }
  int num_states() const { return static_cast<int>(states.size()); }
  const std::optional<Transition>& rule(int q, int s) const { return delta[static_cast<std::size_t>(q * num_symbols() + s)]; }
  int symbol(const std::string& name) const;
  int state(const std::string& name) const;
  json to_json() const;
};

struct Amplitude {
  int state, read, write, next;
  Move move;
  cplx amp;
};

struct QuantumTuringMachine {
  std::string name;
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  int initial = 0;
  int final_state = 1;
  std::vector<Amplitude> rows;
};

struct TapeConfig {
  std::map<long long, int> tape;  // non-blank cells only
  long long head = 0;
  int state = 0;
  int read(long long cell) const;
  void write(long long cell, int sym);
};

struct RunResult {
  bool halted = false;
  long long steps = 0;
  std::string output;
  bool out_of_tape = false;
  TapeConfig final_config;
};

struct QtmCheck {
  bool well_formed = false;
  bool normal_form = false;
  bool unidirectional = false;
  double isometry_defect = 0.0;   // max |U^dagger U - 1| over interior columns
  long long configurations = 0;  // interior columns examined
};

TuringMachine load_machine(const json& doc);
TuringMachine load_machine_file(const std::string& path);
QuantumTuringMachine load_qtm(const json& doc);
bool machine_doc_is_quantum(const json& doc);

TapeConfig initial_config(const TuringMachine& m, const std::string& input);
TapeConfig step_tm(const TuringMachine& m, const TapeConfig& c);
// Input occupies cells 1..|x|; cell 0 is a blank margin; the head starts at cell 1.
RunResult run_tm(const TuringMachine& m, const std::string& input, long long max_steps, long long max_cells);
std::string tape_output(const TuringMachine& m, const TapeConfig& c);

// Amplitude-1 rows; with normal_form the final state also gets |s>|q0>|N> rows.
QuantumTuringMachine lift_to_qtm(const TuringMachine& m, bool normal_form = false);
QtmCheck check_qtm(const QuantumTuringMachine& m, int window = 8);

bool is_reversible(const TuringMachine& m, int window = 8);
// Unique predecessor of c, if any (reversible machines only).
std::optional<TapeConfig> predecessor(const TuringMachine& m, const TapeConfig& c);

TuringMachine dovetail(const TuringMachine& m1, const TuringMachine& m2);

// Reversible stand-in for the input writer: prints the binary form of n and halts.
TuringMachine binary_writer(unsigned long long n, const std::vector<std::string>& alphabet = {"#", "0", "1"});
std::string binary_string(unsigned long long n);

}  // namespace gf
