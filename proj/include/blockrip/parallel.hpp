#pragma once

#include <cstddef>
#include <functional>

namespace blockrip {

// Worker count: BLOCKRIP_THREADS if set and > 0, otherwise the hardware
// concurrency (BLOCKRIP_THREADS=0 also means auto).
std::size_t thread_budget();

// Splits [0, n) into fixed-size chunks and runs fn(chunk_index, begin, end)
// for each, possibly on several threads. Each invocation must only touch
// state owned by its chunk index; callers combine per-chunk results in
// chunk order afterwards, so results do not depend on the worker count.
void parallel_chunks(std::size_t n, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace blockrip
