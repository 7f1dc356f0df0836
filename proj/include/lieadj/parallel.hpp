#pragma once

#include <functional>

namespace lieadj {

/// Worker cap: LIEADJ_THREADS if set to a positive integer, else hardware concurrency.
int max_threads();

/// Runs body(i) for i in [0, n) on up to max_threads() threads. Each index is
/// visited exactly once; callers write results by index, so output is deterministic.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace lieadj
