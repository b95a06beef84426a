#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <compare>
#include <exception>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace lk {

using Vec3 = Eigen::Vector3d;

/// Dense 0-based identifier. The tag keeps vertex, face and slot ids apart.
template <class Tag>
struct Id {
  std::int32_t value = -1;

  constexpr Id() = default;
  constexpr explicit Id(std::int32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::int32_t>(v)) {}
  constexpr explicit Id(int64_t v) : value(static_cast<std::int32_t>(v)) {}

  [[nodiscard]] constexpr std::size_t index() const { return static_cast<std::size_t>(value); }
  [[nodiscard]] constexpr bool valid() const { return value >= 0; }

  friend constexpr auto operator<=>(Id, Id) = default;
};

struct VertexTag {};
struct FaceTag {};
struct SlotTag {};
struct EdgeTag {};

using VertexId = Id<VertexTag>;
using FaceId = Id<FaceTag>;
using SlotId = Id<SlotTag>;
using EdgeIndex = Id<EdgeTag>;

// Error hierarchy. ParseError and ValidationError describe bad input;
// everything else is a failed precondition or an internal fault.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Floor modulo: result in [0, m) for m > 0.
[[nodiscard]] constexpr std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

/// Floor division for m > 0.
[[nodiscard]] constexpr std::int64_t floor_div(std::int64_t a, std::int64_t m) {
  return (a - mod(a, m)) / m;
}

namespace log {

enum class Level { Error = 0, Warn = 1, Info = 2 };

inline Level level() {
  static const Level lvl = [] {
    const char* env = std::getenv("LK_LOG");
    if (env == nullptr) return Level::Warn;
    const std::string_view v{env};
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    return Level::Warn;
  }();
  return lvl;
}

inline void warn(std::string_view msg) {
  if (level() >= Level::Warn) std::cerr << "warning: " << msg << '\n';
}

inline void info(std::string_view msg) {
  if (level() >= Level::Info) std::cerr << "info: " << msg << '\n';
}

}  // namespace log

/// Worker count from LK_THREADS, defaulting to the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("LK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) over a static partition. body must only write
/// to slots owned by i, which keeps results independent of the thread count.
/// The first exception thrown by any worker is rethrown on the caller.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace lk
