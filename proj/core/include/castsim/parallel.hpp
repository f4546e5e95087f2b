#pragma once

#include <cstddef>
#include <functional>

namespace castsim {

// Worker count: min(hardware_concurrency, CASTSIM_THREADS if set). At least 1.
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on a transient worker pool. Work assignment is
// nondeterministic; callers must write results into independent slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace castsim
