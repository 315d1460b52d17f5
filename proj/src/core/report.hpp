// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "json.hpp"

namespace gf {

using json = nlohmann::json;

// Byte-stable serialization: sorted keys, floats as %.12e, two-space indent.
std::string stable_dump(const json& j);

std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);

json parse_json(const std::string& text, const std::string& what);

}  // namespace gf
