#include "memsched/static_opt.hpp"

#include <algorithm>
#include <utility>

#include "memsched/errors.hpp"
#include "memsched/simulator.hpp"

namespace memsched {

void propose_swaps(std::vector<int>& order, int swaps, rng_t& rng) {
    const int n = static_cast<int>(order.size());
    for (int k = 0; k < swaps; ++k) {
        int i = uniform_int(rng, 0, n - 1);
        int j = uniform_int(rng, 0, n - 1);
        std::swap(order[i], order[j]);
    }
}

HillClimbResult hill_climb(const std::vector<Task>& table,
                           const std::vector<int>& initial,
                           const HillClimbConfig& cfg) {
    if (cfg.iterations < 0) throw input_error("hill_climb: iterations < 0");
    if (cfg.max_swaps < 1) throw input_error("hill_climb: max_swaps < 1");
    if (cfg.restarts < 1) throw input_error("hill_climb: restarts < 1");
    if (initial.size() != table.size())
        throw input_error("hill_climb: order size mismatch");
    {
        std::vector<char> seen(table.size(), 0);
        for (int p : initial) {
            if (p < 0 || static_cast<std::size_t>(p) >= table.size() || seen[p])
                throw input_error("hill_climb: initial order is not a permutation");
            seen[p] = 1;
        }
    }

    std::vector<double> mems, durs;
    mems.reserve(table.size());
    durs.reserve(table.size());
    for (const Task& t : table) {
        mems.push_back(t.length);
        durs.push_back(cfg.eta * t.length);
    }
    PeakEvaluator eval(mems, durs, cfg.machines);

    HillClimbResult best;
    bool have_best = false;
    std::vector<int> incumbent, candidate;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        rng_t rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
        incumbent = initial;
        double inc_peak = eval.peak(incumbent);
        double inc_makespan = eval.last_makespan();

        for (int it = 0; it < cfg.iterations; ++it) {
            int swaps = uniform_int(rng, 1, cfg.max_swaps);
            candidate = incumbent;
            propose_swaps(candidate, swaps, rng);
            double cand_peak = eval.peak(candidate);
            if (cand_peak < inc_peak) {
                incumbent.swap(candidate);
                inc_peak = cand_peak;
                inc_makespan = eval.last_makespan();
            }
        }
        if (!have_best || inc_peak < best.peak) {
            best.order = incumbent;
            best.peak = inc_peak;
            best.makespan = inc_makespan;
            have_best = true;
        }
    }
    return best;
}

std::vector<double> moving_average(const std::vector<int>& order, int window) {
    const int n = static_cast<int>(order.size());
    if (window < 1 || window > n)
        throw input_error("moving_average: window out of range");
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(n - window + 1));
    double sum = 0.0;
    for (int i = 0; i < window; ++i) sum += order[i] + 1;
    means.push_back(sum / window);
    for (int u = 1; u + window <= n; ++u) {
        sum += (order[u + window - 1] + 1) - (order[u - 1] + 1);
        means.push_back(sum / window);
    }
    return means;
}

} // namespace memsched
