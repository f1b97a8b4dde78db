#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lrmsim {

unsigned resolve_threads(unsigned requested);

// Calls fn(i) for i in [0, count) on up to `threads` workers. fn must only write slot i of its
// own output, so results do not depend on the thread count.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned threads, F&& fn) {
    std::vector<T> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace lrmsim
