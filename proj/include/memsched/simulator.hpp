#pragma once

#include <utility>
#include <vector>

#include "memsched/workload.hpp"

namespace memsched {

// Result of list-scheduling one permutation on K identical machines.
// start/completion are indexed by table position (not by schedule rank).
// memory_trace is the breakpoint list of the active-memory step function;
// times are strictly increasing, the last point is (makespan, 0).
struct ScheduleTrace {
    std::vector<double> start;
    std::vector<double> completion;
    std::vector<std::pair<double, double>> memory_trace;
    double peak = 0.0;
    double makespan = 0.0;
};

// order[r] = table position (0-based) of the r-th task to launch. Tasks are
// assigned in order; each starts at the earliest machine-free time. Memory
// accounting uses half-open activity [s, c): a task completing at t releases
// its memory before a task starting at t is charged.
ScheduleTrace list_schedule(const std::vector<double>& mems,
                            const std::vector<double>& durs,
                            const std::vector<int>& order, int machines);

// Table convenience: memory = length, duration = eta * length.
ScheduleTrace list_schedule(const std::vector<Task>& table,
                            const std::vector<int>& order, int machines,
                            double eta = 1.0);

double peak_memory(const std::vector<Task>& table, const std::vector<int>& order,
                   int machines, double eta = 1.0);

std::vector<int> identity_order(int n);

// Reusable peak evaluator for optimizer inner loops: no allocation per call.
// Exploits that list-scheduling start times are non-decreasing in assignment
// order, so only completions need sorting per evaluation.
class PeakEvaluator {
public:
    PeakEvaluator(std::vector<double> mems, std::vector<double> durs,
                  int machines);

    double peak(const std::vector<int>& order);
    double last_makespan() const { return last_makespan_; }
    int size() const { return static_cast<int>(mems_.size()); }

private:
    std::vector<double> mems_;
    std::vector<double> durs_;
    int machines_;
    std::vector<double> free_;
    std::vector<double> start_time_;
    std::vector<double> start_mem_;
    std::vector<std::pair<double, double>> comp_;
    double last_makespan_ = 0.0;
};

} // namespace memsched
