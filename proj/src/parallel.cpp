#include "blobot/parallel.hpp"

#include <atomic>
#include <stdexcept>

namespace blobot {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) {
  if (threads < 1) throw std::invalid_argument("set_thread_count: need at least one thread");
  g_threads.store(threads, std::memory_order_relaxed);
}

int thread_count() { return g_threads.load(std::memory_order_relaxed); }

}  // namespace blobot
