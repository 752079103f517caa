#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "memsched/online_predictor.hpp"
#include "memsched/workload.hpp"

namespace memsched {

// Synthetic environment: true RAM/duration are linear in the task index with
// multiplicative uniform noise. size_pct anchors the noise-free RAM of task 1
// (the largest) as a percentage of total RAM.
struct SimEnvConfig {
    int n = 22;
    double total_ram = 1000.0;
    double m = -1.0; // index coefficient; negative makes task 1 the largest
    double c = 23.0;
    double beta_ram = 0.15;
    double beta_dur = 0.15;
    double size_pct = 10.0;
    std::uint64_t seed = 0;
};

// Hidden per-task truth; the scheduler sees ram only after a completed run.
struct TaskTruth {
    double ram_mb = 0.0;
    double duration = 0.0;
};

std::vector<TaskTruth> gen_truth(const SimEnvConfig& cfg);

enum class PackerKind { Greedy, Knapsack };

PackerKind parse_packer(const std::string& name);
std::string to_string(PackerKind kind);

struct SchedulerPolicy {
    PackerKind packer = PackerKind::Knapsack;
    bool use_bias = true;
    InitOrder init = InitOrder::SmallestFirst;
    int init_count = 2; // tasks run sequentially before the model first fits
    std::optional<std::map<int, double>> priors; // task id -> MB, all tasks
    double pack_quantum_mb = 1.0;
};

struct AttemptLog {
    int task = 0; // 1-based id
    double launch = 0.0;
    double finish = 0.0;
    double allocated_mb = 0.0;
    double true_ram_mb = 0.0;
    bool failed = false;
};

struct RunMetrics {
    double makespan = 0.0;
    int overcommits = 0;
    std::vector<std::pair<double, double>> utilization_trace; // (t, alloc MB)
    std::vector<AttemptLog> attempts;
    bool exact = true; // theoretical baseline: false when reported as a bound
};

// Event-driven scheduling loop. Without priors the init sequence runs
// sequentially at full-RAM allocation until the predictor can fit; with
// priors (pseudo-observations for every task) packing starts at t = 0.
// Batches launch only at t = 0 and at completion events. A task whose true
// RAM exceeds its allocation fails at its completion time, counts one
// overcommit, synthesizes a temporary observation, and is requeued.
RunMetrics run_dynamic(const SimEnvConfig& cfg, const SchedulerPolicy& policy,
                       const PredictorParams& predictor_params);

// One task at a time in id order, each allocated the full RAM.
RunMetrics run_naive(const SimEnvConfig& cfg);

// Minimum-makespan schedule under the RAM capacity with full knowledge of
// the truths. Exact branch-and-bound over placement orders for
// n <= exact_limit; otherwise the best of two constructive heuristics,
// flagged with exact = false.
RunMetrics run_theoretical(const SimEnvConfig& cfg, int exact_limit = 12);

// Earliest-feasible-start placement of tasks in the given order (positions
// into truths) under the RAM capacity; used by run_theoretical and by
// randomized cross-checks. Returns the resulting makespan.
double place_in_order(const std::vector<TaskTruth>& truths, double total_ram,
                      const std::vector<int>& order);

} // namespace memsched
