// SPDX-License-Identifier: Apache-2.0
#include "gapforge.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/commands.hpp"
#include "core/common.hpp"

struct gf_session {
  std::string last_error;
};

namespace {

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

gf_status code(gf::Status s) { return static_cast<gf_status>(static_cast<int>(s)); }

template <class F>
gf_status guarded(gf_session* s, F&& f) {
  if (!s) return GF_ERR_INVALID;
  s->last_error.clear();
  try {
    return f();
  } catch (const gf::Error& e) {
    s->last_error = e.what();
    return code(e.status());
  } catch (const nlohmann::json::exception& e) {
    s->last_error = e.what();
    return GF_ERR_INVALID;
  } catch (const std::bad_alloc&) {
    s->last_error = "out of memory";
    return GF_ERR_BUDGET;
  } catch (const std::exception& e) {
    s->last_error = e.what();
    return GF_ERR_INVARIANT;
  }
}

}  // namespace

extern "C" {

const char* gf_version(void) { return gf::kVersion; }

gf_status gf_session_create(gf_session** out) {
  if (!out) return GF_ERR_INVALID;
  *out = new (std::nothrow) gf_session();
  return *out ? GF_OK : GF_ERR_BUDGET;
}

void gf_session_destroy(gf_session* s) { delete s; }

const char* gf_session_last_error(const gf_session* s) { return s ? s->last_error.c_str() : "null session"; }

gf_status gf_run(gf_session* s, const char* command, const char* params_json, char** result_json) {
  if (result_json) *result_json = nullptr;
  return guarded(s, [&]() {
    if (!command || !result_json) gf::fail_invalid("command and result pointer are required");
    const gf::json params =
        params_json && *params_json ? gf::parse_json(params_json, "parameters") : gf::json::object();
    const gf::json r = gf::run_command(command, params);
    *result_json = dup(r.dump());
    if (!*result_json) throw std::bad_alloc();
    return r.at("status") == "budget" ? GF_ERR_BUDGET : GF_OK;
  });
}

char* gf_command_list(void) { return dup(gf::json(gf::command_names()).dump()); }

gf_status gf_stable_dump(gf_session* s, const char* json_text, char** out) {
  if (out) *out = nullptr;
  return guarded(s, [&]() {
    if (!json_text || !out) gf::fail_invalid("input and output pointers are required");
    *out = dup(gf::stable_dump(gf::parse_json(json_text, "document")));
    return GF_OK;
  });
}

void gf_string_free(char* p) { std::free(p); }

}  // extern "C"
