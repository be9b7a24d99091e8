#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace laudit {

/// Worker count used by parallel_map when the caller passes 0.
std::size_t default_workers();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. If any call
/// throws, the exception of the lowest failing index is rethrown after all
/// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t workers = 0);

/// Ordered results of fn(i), independent of completion order.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, std::size_t workers = 0) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); }, workers);
    return out;
}

}  // namespace laudit
