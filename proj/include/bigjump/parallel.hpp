// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace bigjump {

// Per-slot accumulator for replication averages.
struct Acc {
  double sum = 0.0;
  double sumsq = 0.0;
  std::uint64_t hits = 0;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    if (v != 0.0) ++hits;
  }
  void merge(const Acc& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    hits += o.hits;
  }
};

// Runs fn(rep, values) for rep in [0, reps) over fixed-size chunks that are
// merged in index order, so totals are byte-identical for any worker count.
template <typename PerRep>
std::vector<Acc> run_replications(std::uint64_t reps, std::size_t slots, int threads,
                                  PerRep&& fn) {
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (reps + kChunk - 1) / kChunk;
  std::vector<std::vector<Acc>> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(chunks)));

  auto work = [&]() {
    std::vector<double> values(slots);
    for (;;) {
      const std::uint64_t chunk = next.fetch_add(1);
      if (chunk >= chunks) return;
      std::vector<Acc> acc(slots);
      const std::uint64_t lo = chunk * kChunk;
      const std::uint64_t hi = std::min(reps, lo + kChunk);
      for (std::uint64_t rep = lo; rep < hi; ++rep) {
        std::fill(values.begin(), values.end(), 0.0);
        fn(rep, values);
        for (std::size_t s = 0; s < slots; ++s) acc[s].add(values[s]);
      }
      partial[chunk] = std::move(acc);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<Acc> total(slots);
  for (std::uint64_t c = 0; c < chunks; ++c)
    for (std::size_t s = 0; s < slots; ++s) total[s].merge(partial[c][s]);
  return total;
}

}  // namespace bigjump
