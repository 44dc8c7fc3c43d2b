#pragma once

namespace blobot {

// Worker count for the pairwise terminal-penalty sums. 1 (the default) gives
// bitwise-reproducible row-major summation; larger counts chunk the particle
// range and combine partial sums in chunk order, reproducible per count and
// within 1e-12 relative of the serial result.
void set_thread_count(int threads);
int thread_count();

}  // namespace blobot
