// Benchmark: parallel pair finder vs the serial reference vs the O(N^2)
// brute scan, on synthetic two-channel streams of increasing size.  Also
// times the streaming window counter against its in-memory equivalent.
//
// Usage: bench_coincidence [max_tags_per_channel]
// Output: one line per (size, algorithm) with wall time and pair count.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "quadcorr/coincidence.hpp"
#include "quadcorr/parallel.hpp"
#include "quadcorr/random.hpp"
#include "quadcorr/reference.hpp"
#include "quadcorr/tagstream.hpp"

namespace {

using namespace quadcorr;

// Uniform random tags on channels 1 and 3 at ~1e6 counts/s per channel.
TagStream random_stream(std::size_t tags_per_channel, std::uint64_t seed) {
    const uint64_t t_m = tags_per_channel * 500;  // ticks; 2 ns each
    TagStream stream(TagStream::kDefaultTickPs, t_m);
    Rng rng(seed);
    for (int ch : {1, 3}) {
        std::vector<uint64_t> ticks(tags_per_channel);
        for (auto& t : ticks) t = rng.next_u64() % t_m;
        std::sort(ticks.begin(), ticks.end());
        ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
        stream.mutable_channel(ch) = std::move(ticks);
    }
    stream.validate();
    return stream;
}

template <typename F>
double time_seconds(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t max_tags = 4'000'000;
    if (argc > 1) max_tags = std::strtoull(argv[1], nullptr, 10);

    const int64_t max_delay = 30;  // ticks = 60 ns
    std::printf("threads = %d\n", max_threads());
    std::printf("%12s %-22s %12s %14s\n", "tags/chan", "algorithm", "seconds",
                "pairs");

    for (std::size_t n = 62'500; n <= max_tags; n *= 4) {
        const TagStream stream = random_stream(n, /*seed=*/12345 + n);

        std::vector<PairEvent> par, ser;
        const double t_par =
            time_seconds([&] { par = find_pairs(stream, 1, 3, max_delay); });
        const double t_ser =
            time_seconds([&] { ser = find_pairs_serial(stream, 1, 3, max_delay); });
        if (par != ser) {
            std::fprintf(stderr, "MISMATCH at n=%zu\n", n);
            return 1;
        }
        std::printf("%12zu %-22s %12.4f %14zu\n", n, "find_pairs (parallel)", t_par,
                    par.size());
        std::printf("%12zu %-22s %12.4f %14zu\n", n, "find_pairs_serial", t_ser,
                    ser.size());

        if (n <= 250'000) {
            std::vector<PairEvent> brute;
            const double t_brute =
                time_seconds([&] { brute = brute_pairs(stream, 1, 3, max_delay); });
            if (brute != ser) {
                std::fprintf(stderr, "BRUTE MISMATCH at n=%zu\n", n);
                return 1;
            }
            std::printf("%12zu %-22s %12.4f %14zu\n", n, "brute_pairs", t_brute,
                        brute.size());
        }

        WindowCounts wmem{}, wbrute{};
        const double t_wmem =
            time_seconds([&] { wmem = window_counts(stream, /*t_c_ticks=*/10); });
        std::printf("%12zu %-22s %12.4f %14llu\n", n, "window_counts", t_wmem,
                    static_cast<unsigned long long>(wmem.pair_counts[1]));
        if (n <= 250'000) {
            const double t_wb = time_seconds(
                [&] { wbrute = brute_window_counts(stream, /*t_c_ticks=*/10); });
            if (wbrute.pair_counts != wmem.pair_counts) {
                std::fprintf(stderr, "WINDOW MISMATCH at n=%zu\n", n);
                return 1;
            }
            std::printf("%12zu %-22s %12.4f %14llu\n", n, "brute_window_counts",
                        t_wb, static_cast<unsigned long long>(wbrute.pair_counts[1]));
        }
    }
    return 0;
}
