// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace gf {

using cplx = std::complex<double>;

// Numeric values match the public status codes in gapforge.h.
enum class Status : int { ok = 0, invariant = 1, invalid = 2, budget = 3 };

class Error : public std::runtime_error {
 public:
  Error(Status s, const std::string& msg) : std::runtime_error(msg), status_(s) {}
  Status status() const { return status_; }

 private:
  Status status_;
};

[[noreturn]] void fail_invalid(const std::string& msg);
[[noreturn]] void fail_budget(const std::string& msg);
[[noreturn]] void fail_invariant(const std::string& msg);

// Worker count: GAPFORGE_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Static block partition of [0, n) across worker threads. fn(begin, end, worker).
void parallel_blocks(std::uint64_t n, const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Path of a bundled data file.
std::string data_path(const std::string& name);

// Integer power with overflow check.
std::uint64_t ipow(std::uint64_t base, unsigned exp);

}  // namespace gf
