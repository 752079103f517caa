#pragma once

#include <functional>
#include <string>
#include <vector>

#include "memsched/dyn_scheduler.hpp"
#include "memsched/simulator.hpp"
#include "memsched/static_opt.hpp"

namespace memsched {

// Runs fn(i) for i in [0, count) on up to `jobs` worker threads. Workers
// write results by index, so output order never depends on scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

struct Table1Row {
    int machines = 0;
    double sequential_peak = 0.0;
    double optimized_peak = 0.0;
    double decrease_pct = 0.0;
};

// Sequential-vs-optimized peak for each K. The sequential peak is the
// identity order's; the optimized one comes from hill climbing with cfg's
// budgets (cfg.machines is overridden per row).
std::vector<Table1Row> run_table1(const std::vector<Task>& table,
                                  const HillClimbConfig& cfg, int k_lo = 2,
                                  int k_hi = 10, int jobs = 1);

struct MetricsRow {
    std::uint64_t seed = 0;
    std::string policy;
    double size_pct = 0.0;
    double makespan = 0.0;
    int overcommits = 0;
};

struct AblationRow {
    std::string panel;
    std::string policy;
    double size_pct = 0.0;
    int seeds = 0;
    double mean_makespan = 0.0;
    double mean_overcommits = 0.0;
};

std::string policy_name(const SchedulerPolicy& policy);

// Per-seed dynamic-scheduler metrics for one policy across a seed range.
std::vector<MetricsRow> run_dynamic_sweep(const SimEnvConfig& base,
                                          const SchedulerPolicy& policy,
                                          const PredictorParams& params,
                                          std::uint64_t seed0, int seeds,
                                          int jobs);

// The four ablation panels: packer choice, bias on/off, init strategies,
// priors vs none. Exact truths serve as the priors in the last panel.
std::vector<AblationRow> run_ablation(const SimEnvConfig& base,
                                      const PredictorParams& params,
                                      const std::vector<double>& sizes,
                                      std::uint64_t seed0, int seeds, int jobs);

// CSV/JSON writers. Every file starts with "# <config>" so outputs are
// self-describing; JSON gets a "config" field instead.
void write_trace_csv(const std::string& path, const ScheduleTrace& trace,
                     const std::string& config);
void write_summary_json(const std::string& path, const ScheduleTrace& trace,
                        const std::string& config);
void write_orders_json(const std::string& path,
                       const std::vector<Table1Row>& rows,
                       const std::vector<std::vector<int>>& orders,
                       const std::string& config);
void write_table1_csv(const std::string& path,
                      const std::vector<Table1Row>& rows,
                      const std::string& config);
void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows,
                       const std::string& config);
void write_ablation_csv(const std::string& path,
                        const std::vector<AblationRow>& rows,
                        const std::string& config);

// Converts a CSV produced by the writers above (table1, metrics, or
// ablation schema, detected from the header) into {"series": [...]} JSON.
std::string plotdata_json(const std::string& csv_text);

} // namespace memsched
