/* Copyright 2026 The emoforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace emoforge {

// Row-major so that one sample is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorKind {
  kFormat,
  kUnsupported,
  kEmptyAudio,
  kUnknownLabel,
  kDegenerateClass,
  kDegenerateLabel,
  kSplit,
  kParameter,
  kShape,
  kDomain,
  kIo,
  kConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kEmptyAudio: return "empty audio";
    case ErrorKind::kUnknownLabel: return "unknown label";
    case ErrorKind::kDegenerateClass: return "degenerate class";
    case ErrorKind::kDegenerateLabel: return "degenerate labels";
    case ErrorKind::kSplit: return "split error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kIo: return "io error";
    case ErrorKind::kConfig: return "config error";
  }
  return "error";
}

/// Every failure raised by the library carries a kind so that callers (the
/// CLI in particular) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Configuration mistakes as opposed to bad input data.
  bool is_config() const noexcept {
    return kind_ == ErrorKind::kConfig || kind_ == ErrorKind::kParameter;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

using Rng = std::mt19937_64;

// Standard distributions are implementation-defined; these are not, so
// seeded runs reproduce across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

inline double normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

inline std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

/// Worker count: EMOFORGE_THREADS when set, hardware concurrency otherwise.
inline std::size_t thread_budget() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EMOFORGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) return std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
  }
  return hw;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own slot, so the
/// result never depends on the schedule.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(thread_budget(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Population standard deviation.
inline double stddev(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

/// Index of the largest entry; the lowest index wins ties.
template <typename Row>
std::size_t argmax(const Row& row) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < static_cast<Eigen::Index>(row.size()); ++i) {
    if (row[i] > row[best]) best = static_cast<std::size_t>(i);
  }
  return best;
}

inline std::vector<std::size_t> argmax_rows(const Matrix& proba) {
  std::vector<std::size_t> out(static_cast<std::size_t>(proba.rows()));
  for (Eigen::Index r = 0; r < proba.rows(); ++r) out[r] = argmax(proba.row(r));
  return out;
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace emoforge
