#include "rfdfar/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rfdfar {
namespace {

thread_local bool inside_worker = false;

}  // namespace

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("RFDFAR_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  try {
    long v = std::stol(env);
    if (v <= 0) return hw;
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    return hw;
  }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  // Nested calls run inline so the thread count stays bounded.
  if (workers <= 1 || inside_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    inside_worker = true;
    while (!failed.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rfdfar
