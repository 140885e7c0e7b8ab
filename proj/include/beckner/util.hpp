#ifndef BECKNER_UTIL_HPP
#define BECKNER_UTIL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>

namespace beckner {

using Rng = std::mt19937_64;

/// Seed for an independent sub-stream: splitmix64(master ^ fnv1a(label)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

inline Rng make_rng(std::uint64_t master, std::string_view label) {
    return Rng(derive_seed(master, label));
}

/// Uniform on (lo, hi) in log scale.
double log_uniform(Rng &rng, double lo, double hi);

/// Worker count: hardware concurrency capped by BECKNER_LAB_THREADS.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is handled exactly once, so
/// callers writing to slot i get results independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

/// 17-significant-digit rendering used for every CSV/JSON float.
std::string format_double(double x);

} // namespace beckner

#endif
