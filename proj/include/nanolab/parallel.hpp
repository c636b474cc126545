#pragma once

#include <functional>

namespace nanolab {

// Worker count used by parallel_for; defaults to the hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(0..n-1) over the worker pool. Each index is handled exactly once; callers write results
// into slots indexed by i, so the outcome does not depend on scheduling.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace nanolab
