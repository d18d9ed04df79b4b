#pragma once

namespace pdfrac {

/// Number of worker threads used by node-parallel kernels (default 1).
/// Results do not depend on this value: every kernel writes disjoint
/// per-node slots and accumulates in neighbor-list order.
void set_thread_count(int threads);
int thread_count();

} // namespace pdfrac
