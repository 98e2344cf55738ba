#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace chaining {

// Global worker count for the parallel evaluation paths. 1 = sequential.
// Results are independent of the setting: work is partitioned by index and
// written to per-index slots, so no reduction order changes.
int thread_count();
void set_thread_count(int k);

// Runs fn(i) for i in [0, n). Uses thread_count() workers when n is large
// enough to be worth it.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Shortest printf-style text for a double at 9 significant digits.
std::string format_sig9(double v);

// FNV-1a over raw bytes, used to tag certificate reports with an instance id.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ULL);
std::string hex64(std::uint64_t v);

}  // namespace chaining
