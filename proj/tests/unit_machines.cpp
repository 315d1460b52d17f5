// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "core/machines.hpp"
#include "doctest.h"

using namespace gf;

namespace {

TuringMachine bundled(const std::string& name) { return load_machine_file(data_path("machines/" + name + ".json")); }

bool same(const TapeConfig& a, const TapeConfig& b) { return a.tape == b.tape && a.head == b.head && a.state == b.state; }

}  // namespace

TEST_CASE("binary strings") {
  CHECK(binary_string(0) == "0");
  CHECK(binary_string(1) == "1");
  CHECK(binary_string(5) == "101");
  CHECK(binary_string(1024) == "10000000000");
}

TEST_CASE("budgeted runs of the bundled machines") {
  const RunResult h = run_tm(bundled("halter"), "101", 100, 1000);
  CHECK(h.halted);
  CHECK(h.steps == 1);
  CHECK(h.output == "101");
  const RunResult l = run_tm(bundled("loop"), "101", 500, 1 << 20);
  CHECK_FALSE(l.halted);
  CHECK(l.steps == 500);
  const RunResult c = run_tm(bundled("copier"), "101", 1000, 1000);
  CHECK(c.halted);
  CHECK(c.output == "101#101");
}

TEST_CASE("tape budget stops a runaway head") {
  const RunResult l = run_tm(bundled("loop"), "1", 100000, 50);
  CHECK_FALSE(l.halted);
  CHECK(l.out_of_tape);
}

TEST_CASE("binary writer prints n for random n") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const unsigned long long n = rng() % 100000;
    const TuringMachine w = binary_writer(n);
    const RunResult r = run_tm(w, "", 10000, 10000);
    REQUIRE(r.halted);
    CHECK(r.output == binary_string(n));
    CHECK(is_reversible(w));
  }
}

TEST_CASE("predecessor inverts a step of a reversible machine (random tapes)") {
  const TuringMachine m = bundled("loop");
  REQUIRE(is_reversible(m));
  std::mt19937 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::string input;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 8); ++i) input += static_cast<char>('0' + rng() % 2);
    TapeConfig c = initial_config(m, input);
    for (int k = 0; k < static_cast<int>(rng() % 5); ++k) c = step_tm(m, c);
    const TapeConfig next = step_tm(m, c);
    const auto back = predecessor(m, next);
    REQUIRE(back.has_value());
    CHECK(same(*back, c));
  }
}

TEST_CASE("irreversible machines are detected") { CHECK_FALSE(is_reversible(bundled("copier"))); }

TEST_CASE("lifting to a QTM keeps well-formedness for reversible machines") {
  for (const char* name : {"halter", "loop"}) {
    const QtmCheck q = check_qtm(lift_to_qtm(bundled(name)));
    CHECK(q.well_formed);
    CHECK(q.isometry_defect < 1e-12);
  }
  CHECK_FALSE(check_qtm(lift_to_qtm(bundled("copier"))).well_formed);
}

TEST_CASE("the bundled Hadamard QTM is well formed and in normal form") {
  const json doc = parse_json(read_file(data_path("machines/hadamard_qtm.json")), "qtm");
  REQUIRE(machine_doc_is_quantum(doc));
  const QtmCheck q = check_qtm(load_qtm(doc));
  CHECK(q.well_formed);
  CHECK(q.normal_form);
  CHECK(q.unidirectional);
}

TEST_CASE("dovetailing runs the second machine on the first one's output") {
  const TuringMachine d = dovetail(binary_writer(5, bundled("copier").alphabet), bundled("copier"));
  const RunResult r = run_tm(d, "", 10000, 10000);
  REQUIRE(r.halted);
  CHECK(r.output == "101#101");
}

TEST_CASE("malformed machine documents are rejected") {
  CHECK_THROWS_AS(load_machine(json::object()), std::exception);
  json doc = parse_json(read_file(data_path("machines/loop.json")), "loop");
  doc["initial"] = "nowhere";
  CHECK_THROWS_AS(load_machine(doc), Error);
}
