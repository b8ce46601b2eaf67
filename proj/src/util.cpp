#include "cfv/util.hpp"

#include <atomic>
#include <cstdio>
#include <thread>
#include <vector>

#if defined(__SSE2__) || defined(__x86_64__)
#include <xmmintrin.h>
#define CFV_HAVE_MXCSR 1
#endif

namespace cfv {

namespace {
// MXCSR bits: FTZ (flush results) and DAZ (treat operands as zero).
constexpr std::uint32_t kFlushBits = 0x8040;
}  // namespace

ScopedFlushDenormals::ScopedFlushDenormals() {
#ifdef CFV_HAVE_MXCSR
  saved_csr_ = _mm_getcsr();
  _mm_setcsr(saved_csr_ | kFlushBits);
  active_ = true;
#endif
}

ScopedFlushDenormals::~ScopedFlushDenormals() {
#ifdef CFV_HAVE_MXCSR
  if (active_) _mm_setcsr(saved_csr_);
#endif
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (workers < 1) workers = 1;
  std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace cfv
