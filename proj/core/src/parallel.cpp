#include "bicm/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace bicm {

unsigned effective_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for_chunks(std::size_t begin, std::size_t end, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t n = end > begin ? end - begin : 0;
    if (n == 0) return;
    unsigned workers = std::min<std::size_t>(effective_threads(threads), n);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::size_t lo = begin;
    std::vector<std::pair<std::size_t, std::size_t>> chunks(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        chunks[w] = {lo, lo + len};
        lo += len;
    }
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back([&fn, c = chunks[w]] { fn(c.first, c.second); });
    fn(chunks[0].first, chunks[0].second);
    for (auto& t : pool) t.join();
}

} // namespace bicm
