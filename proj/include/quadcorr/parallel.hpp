#pragma once

#include <cstddef>
#include <cstdlib>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace quadcorr {

// Worker count: QUADCORR_THREADS caps it when set; otherwise the OpenMP
// default (or 1 in a serial build).
inline int max_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("QUADCORR_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && cap < n) n = static_cast<int>(cap);
    }
    return n < 1 ? 1 : n;
}

// Splits [0, n) into at most `pieces` contiguous half-open index ranges.
// The decomposition depends only on (n, pieces), never on the thread count,
// so chunk-wise results merge identically no matter how they were scheduled.
inline std::vector<std::pair<std::size_t, std::size_t>> chunk_ranges(std::size_t n,
                                                                     std::size_t pieces) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (n == 0) return out;
    if (pieces < 1) pieces = 1;
    if (pieces > n) pieces = n;
    const std::size_t base = n / pieces;
    const std::size_t extra = n % pieces;
    std::size_t begin = 0;
    for (std::size_t c = 0; c < pieces; ++c) {
        const std::size_t len = base + (c < extra ? 1 : 0);
        out.emplace_back(begin, begin + len);
        begin += len;
    }
    return out;
}

}  // namespace quadcorr
