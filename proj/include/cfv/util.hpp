#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace cfv {

// Invalid scenario or solver configuration (bad grid spacing, CFL violation,
// malformed config file, ...). The message lists every problem found.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Compensated (Kahan) accumulator. Used where plain summation noise would
// drown the quantity being measured, e.g. per-step conservation residuals.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Uniform doubles built directly from mt19937_64 words so sequences do not
// depend on the standard library's distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Flushes subnormal floats to zero on this thread for the lifetime of the
// object (x86 FTZ/DAZ; no-op elsewhere). Advancing density fronts trail an
// exponentially decaying tail whose subnormal cells cost a microcode assist
// per operation, an order-of-magnitude slowdown; the flushed tail carries
// less than 1e-300 in mass, far below every audited tolerance.
class ScopedFlushDenormals {
 public:
  ScopedFlushDenormals();
  ~ScopedFlushDenormals();
  ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
  ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

 private:
  std::uint32_t saved_csr_ = 0;
  bool active_ = false;
};

// Runs fn(0..n-1) on up to `workers` threads. Callers must write results by
// index so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Shortest fixed formatting that keeps >= 15 significant digits (%.17g).
std::string format_double(double x);

}  // namespace cfv
