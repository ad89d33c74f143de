#pragma once

#include <cstddef>
#include <functional>

namespace affint {

// Worker count: hardware concurrency, capped by AFFINE_INTERIOR_THREADS.
unsigned worker_count();

// Runs task(i) for i in [0, n_tasks) on up to worker_count() threads.
// Tasks must write to disjoint outputs; callers reduce in index order so
// results do not depend on scheduling.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task);

}  // namespace affint
