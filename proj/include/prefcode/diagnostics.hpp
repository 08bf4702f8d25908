#pragma once
// Self-check counters. Every designer verifies its own guarantees while it
// runs (monotone descent, fixed-point residuals, rounding safety); any
// violation increments a counter here instead of aborting, so a test suite
// can run a whole workload and then assert it stayed clean.

#include <atomic>
#include <cstdint>

namespace prefcode {

struct Diagnostics {
  std::atomic<std::uint64_t> kmeans_runs{0};
  std::atomic<std::uint64_t> dca_runs{0};
  std::atomic<std::uint64_t> descent_violations{0};
  std::atomic<std::uint64_t> fixed_point_violations{0};
  std::atomic<std::uint64_t> rounding_violations{0};

  void reset() {
    kmeans_runs = 0;
    dca_runs = 0;
    descent_violations = 0;
    fixed_point_violations = 0;
    rounding_violations = 0;
  }
};

inline Diagnostics& diagnostics() {
  static Diagnostics d;
  return d;
}

}  // namespace prefcode
