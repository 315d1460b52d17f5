// SPDX-License-Identifier: Apache-2.0
#include "core/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>

#include "core/common.hpp"

namespace gf {

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

namespace {

void dump_rec(const json& j, std::string& out, int depth) {
  auto indent = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted
        if (!first) out += ",\n";
        first = false;
        indent(depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        dump_rec(it.value(), out, depth + 1);
      }
      out += "\n";
      indent(depth);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j)
        if (e.is_structured()) scalar = false;
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_rec(j[i], out, depth);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        indent(depth + 1);
        dump_rec(j[i], out, depth + 1);
      }
      out += "\n";
      indent(depth);
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string stable_dump(const json& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail_invalid(what + ": malformed JSON: " + e.what());
  }
}

}  // namespace gf
