// SPDX-License-Identifier: Apache-2.0
#include "core/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

namespace gf {

void fail_invalid(const std::string& msg) { throw Error(Status::invalid, msg); }
void fail_budget(const std::string& msg) { throw Error(Status::budget, msg); }
void fail_invariant(const std::string& msg) { throw Error(Status::invariant, msg); }

unsigned thread_count() {
  if (const char* env = std::getenv("GAPFORGE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_blocks(std::uint64_t n, const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn) {
  unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(thread_count(), std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t b = std::min<std::uint64_t>(n, w * chunk);
    std::uint64_t e = std::min<std::uint64_t>(n, b + chunk);
    pool.emplace_back([&, b, e, w] {
      try {
        fn(b, e, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_invalid("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_invalid("cannot write file: " + path);
  out << content;
}

std::string data_path(const std::string& name) {
  if (const char* env = std::getenv("GAPFORGE_DATA")) return std::string(env) + "/" + name;
  return std::string(GAPFORGE_DATA_DIR) + "/" + name;
}

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > UINT64_MAX / base) fail_budget("dimension overflow");
    r *= base;
  }
  return r;
}

}  // namespace gf
