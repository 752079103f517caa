#pragma once

#include <cstdint>
#include <vector>

#include "memsched/rng.hpp"
#include "memsched/workload.hpp"

namespace memsched {

struct HillClimbConfig {
    int iterations = 20000; // proposals per restart
    int max_swaps = 4;      // swaps per proposal drawn from {1..max_swaps}
    int restarts = 10;
    int machines = 2;
    std::uint64_t seed = 0;
    double eta = 1.0;
};

struct HillClimbResult {
    std::vector<int> order; // 0-based table positions
    double peak = 0.0;
    double makespan = 0.0;
};

// Applies `swaps` position swaps to `order` in place; each endpoint pair is
// drawn uniformly from {0..n-1}^2, so i == j (a no-op) can occur.
void propose_swaps(std::vector<int>& order, int swaps, rng_t& rng);

// Stochastic first-improvement hill climbing from `initial`, minimizing peak
// memory. A candidate replaces the incumbent only when strictly better, so
// the per-restart objective is non-increasing. Restarts use independent RNG
// streams derived from (seed, restart index); the best restart wins, ties
// going to the lowest restart index.
HillClimbResult hill_climb(const std::vector<Task>& table,
                           const std::vector<int>& initial,
                           const HillClimbConfig& cfg);

// Window means of task ids along the order: mean of order[u..u+window-1]
// (as 1-based ids) for each u. A flat profile near (n+1)/2 indicates big
// and small tasks are interleaved.
std::vector<double> moving_average(const std::vector<int>& order, int window);

} // namespace memsched
