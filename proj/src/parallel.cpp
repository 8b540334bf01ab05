#include "taylorlaw/parallel.hpp"

namespace taylorlaw {
namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned threads) noexcept { g_threads.store(threads); }

unsigned thread_count() noexcept {
  const unsigned requested = g_threads.load();
  if (requested != 0) return requested;
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware == 0 ? 1 : hardware;
}

}  // namespace taylorlaw
