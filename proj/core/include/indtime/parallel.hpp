#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace indtime {

/// Worker count used when a caller passes 0.
inline unsigned default_jobs() noexcept {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs body(chunk, begin, end) over [0, n) split into `jobs` contiguous
/// chunks. Chunk boundaries depend only on (n, jobs); results that are merged
/// in chunk order are therefore independent of scheduling. The first
/// exception thrown by any worker is rethrown on the caller's thread.
template <class Body>
void parallel_chunks(std::size_t n, unsigned jobs, Body&& body) {
  if (jobs == 0) jobs = default_jobs();
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  if (jobs <= 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (unsigned c = 0; c < jobs; ++c) {
    const std::size_t begin = n * c / jobs;
    const std::size_t end = n * (c + 1) / jobs;
    workers.emplace_back([&, c, begin, end] {
      try {
        body(static_cast<std::size_t>(c), begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

/// Number of chunks parallel_chunks will use for (n, jobs).
inline unsigned chunk_count(std::size_t n, unsigned jobs) noexcept {
  if (jobs == 0) jobs = default_jobs();
  return static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
}

}  // namespace indtime
