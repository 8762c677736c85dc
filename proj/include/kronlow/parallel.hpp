#pragma once

#include <cstddef>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace kronlow {

// 0 means: KRONLOW_THREADS if set, otherwise the machine's parallelism.
std::size_t resolve_threads(std::size_t requested);

// Runs body(i) for i in [0, count) on at most `threads` workers. Callers write
// results into pre-sized slots indexed by i, so output never depends on the
// schedule.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  const std::size_t workers = resolve_threads(threads);
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  // allow more workers than cores when asked for explicitly
  tbb::global_control limit(tbb::global_control::max_allowed_parallelism, workers);
  tbb::task_arena arena(static_cast<int>(workers));
  arena.execute([&] {
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count, 1), [&](const tbb::blocked_range<std::size_t>& r) {
      for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
    });
  });
}

}  // namespace kronlow
