// SPDX-License-Identifier: Apache-2.0
#include <string>

#include "doctest.h"
#include "gapforge.h"
#include "json.hpp"

namespace {

struct Session {
  gf_session* s = nullptr;
  Session() { REQUIRE(gf_session_create(&s) == GF_OK); }
  ~Session() { gf_session_destroy(s); }
};

nlohmann::json run(Session& ss, const char* cmd, const char* params, gf_status expect) {
  char* out = nullptr;
  const gf_status st = gf_run(ss.s, cmd, params, &out);
  CHECK(st == expect);
  nlohmann::json j;
  if (out) {
    j = nlohmann::json::parse(out);
    gf_string_free(out);
  }
  return j;
}

}  // namespace

TEST_CASE("C API: successful command") {
  Session ss;
  const auto j = run(ss, "tile.bounds", R"({"L":16,"H":16,"n":1})", GF_OK);
  CHECK(j.at("text") == "8 24\n");
  CHECK(j.at("result").at("lower") == 8);
  CHECK(j.at("manifest").at("command") == "tile.bounds");
  CHECK(std::string(gf_session_last_error(ss.s)).empty());
}

TEST_CASE("C API: validation errors") {
  Session ss;
  char* out = reinterpret_cast<char*>(1);
  CHECK(gf_run(ss.s, "no.such", "{}", &out) == GF_ERR_INVALID);
  CHECK(out == nullptr);
  CHECK(std::string(gf_session_last_error(ss.s)).find("unknown command") != std::string::npos);
  run(ss, "tile.bounds", R"({"L":-1})", GF_ERR_INVALID);
  run(ss, "tile.bounds", R"({"L":"x"})", GF_ERR_INVALID);
  run(ss, "tile.bounds", R"({"bogus":1})", GF_ERR_INVALID);
  run(ss, "tile.bounds", "{not json", GF_ERR_INVALID);
  run(ss, "chain.spectrum", R"({"L":7})", GF_ERR_INVALID);
  run(ss, "machine.run", R"({"machine":"missing.json"})", GF_ERR_INVALID);
  CHECK(gf_run(nullptr, "tile.bounds", "{}", &out) == GF_ERR_INVALID);
}

TEST_CASE("C API: budget exhaustion") {
  Session ss;
  run(ss, "tile.solve", R"({"L":16,"node_budget":5})", GF_ERR_BUDGET);
  CHECK(std::string(gf_session_last_error(ss.s)).find("budget") != std::string::npos);
}

TEST_CASE("C API: chain spectrum example") {
  Session ss;
  const auto j = run(ss, "chain.spectrum", R"({"L":6,"ruleset":"track0.json"})", GF_OK);
  CHECK(j.at("result").at("degeneracy") == 2);
  CHECK(std::abs(j.at("result").at("lambda0").get<double>()) < 1e-9);
  CHECK(j.at("artifacts").contains("spectrum.csv"));
}

TEST_CASE("C API: format filter and deterministic manifests") {
  Session ss;
  const auto a = run(ss, "tile.solve", R"({"L":8,"format":"svg"})", GF_OK);
  for (const auto& [k, v] : a.at("artifacts").items()) CHECK(k.substr(k.size() - 4) == ".svg");
  const auto b = run(ss, "tile.solve", R"({"L":8,"format":"svg"})", GF_OK);
  CHECK(a.at("manifest") == b.at("manifest"));
  run(ss, "tile.bounds", R"({"format":"svg"})", GF_ERR_INVALID);
  run(ss, "tile.bounds", R"({"format":"pdf"})", GF_ERR_INVALID);
}

TEST_CASE("C API: energy density CSV header") {
  Session ss;
  const auto j = run(ss, "gap.report", R"({"n":1,"machine":"loop.json"})", GF_OK);
  const std::string csv = j.at("artifacts").at("energy_density.csv");
  CHECK(csv.rfind("L,lambda0,E_rho\n", 0) == 0);
  CHECK(j.at("result").at("classification") == "gapless-consistent");
}

TEST_CASE("C API: helpers") {
  Session ss;
  CHECK(std::string(gf_version()) == "0.1.0");
  char* list = gf_command_list();
  const auto names = nlohmann::json::parse(list);
  gf_string_free(list);
  CHECK(names.size() == 11);
  char* out = nullptr;
  REQUIRE(gf_stable_dump(ss.s, R"({"b":1.0,"a":[1,2]})", &out) == GF_OK);
  const std::string s = out;
  gf_string_free(out);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("1.000000000000e+00") != std::string::npos);
}
