#include "rationale/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace rationale {

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t width = std::min<std::size_t>(std::max(1u, threads), count);
    if (width == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(width);
    const std::size_t chunk = (count + width - 1) / width;
    for (std::size_t w = 0; w < width; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&fn, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace rationale
