#include "memsched/cli_report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "memsched/errors.hpp"

namespace memsched {

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (std::thread& t : workers) t.join();
}

std::vector<Table1Row> run_table1(const std::vector<Task>& table,
                                  const HillClimbConfig& cfg, int k_lo,
                                  int k_hi, int jobs) {
    if (k_lo < 1 || k_hi < k_lo) throw input_error("table1: bad K range");
    const int count = k_hi - k_lo + 1;
    std::vector<Table1Row> rows(static_cast<std::size_t>(count));
    std::vector<int> identity = identity_order(static_cast<int>(table.size()));

    parallel_for(count, jobs, [&](int i) {
        int k = k_lo + i;
        HillClimbConfig local = cfg;
        local.machines = k;
        double seq = peak_memory(table, identity, k, cfg.eta);
        HillClimbResult best = hill_climb(table, identity, local);
        rows[static_cast<std::size_t>(i)] = {
            k, seq, best.peak, 100.0 * (seq - best.peak) / seq};
    });
    return rows;
}

std::string policy_name(const SchedulerPolicy& policy) {
    std::string name = to_string(policy.packer);
    name += policy.use_bias ? "+bias" : "-bias";
    name += "+" + to_string(policy.init);
    if (policy.priors) name += "+priors";
    return name;
}

std::vector<MetricsRow> run_dynamic_sweep(const SimEnvConfig& base,
                                          const SchedulerPolicy& policy,
                                          const PredictorParams& params,
                                          std::uint64_t seed0, int seeds,
                                          int jobs) {
    if (seeds < 1) throw input_error("sweep: seeds must be >= 1");
    std::vector<MetricsRow> rows(static_cast<std::size_t>(seeds));
    std::string name = policy_name(policy);
    parallel_for(seeds, jobs, [&](int i) {
        SimEnvConfig cfg = base;
        cfg.seed = seed0 + static_cast<std::uint64_t>(i);
        RunMetrics m = run_dynamic(cfg, policy, params);
        rows[static_cast<std::size_t>(i)] = {cfg.seed, name, cfg.size_pct,
                                             m.makespan, m.overcommits};
    });
    return rows;
}

namespace {

AblationRow summarize(const std::string& panel, const std::string& policy,
                      double size_pct, const std::vector<MetricsRow>& rows) {
    AblationRow out{panel, policy, size_pct, static_cast<int>(rows.size()),
                    0.0, 0.0};
    for (const MetricsRow& r : rows) {
        out.mean_makespan += r.makespan;
        out.mean_overcommits += r.overcommits;
    }
    out.mean_makespan /= static_cast<double>(rows.size());
    out.mean_overcommits /= static_cast<double>(rows.size());
    return out;
}

} // namespace

std::vector<AblationRow> run_ablation(const SimEnvConfig& base,
                                      const PredictorParams& params,
                                      const std::vector<double>& sizes,
                                      std::uint64_t seed0, int seeds,
                                      int jobs) {
    if (sizes.empty()) throw input_error("ablation: empty size grid");
    if (seeds < 1) throw input_error("ablation: seeds must be >= 1");

    struct Cell {
        std::string panel;
        SchedulerPolicy policy;
        bool exact_priors = false;
    };
    std::vector<Cell> cells;

    SchedulerPolicy def; // knapsack, bias, smallest-first
    def.init = InitOrder::SmallestFirst;

    for (PackerKind packer : {PackerKind::Knapsack, PackerKind::Greedy}) {
        SchedulerPolicy p = def;
        p.packer = packer;
        cells.push_back({"packer", p, false});
    }
    for (bool bias : {true, false}) {
        SchedulerPolicy p = def;
        p.use_bias = bias;
        cells.push_back({"bias", p, false});
    }
    for (InitOrder init : {InitOrder::BiggestFirst, InitOrder::SmallestFirst,
                           InitOrder::BiggestAndSmallest}) {
        SchedulerPolicy p = def;
        p.init = init;
        cells.push_back({"init", p, false});
    }
    {
        SchedulerPolicy p = def;
        cells.push_back({"priors", p, false});
        cells.push_back({"priors", p, true}); // truths filled per seed below
    }

    std::vector<AblationRow> rows;
    for (const Cell& cell : cells) {
        for (double size : sizes) {
            SimEnvConfig cfg = base;
            cfg.size_pct = size;
            std::vector<MetricsRow> metrics(static_cast<std::size_t>(seeds));
            parallel_for(seeds, jobs, [&](int i) {
                SimEnvConfig c = cfg;
                c.seed = seed0 + static_cast<std::uint64_t>(i);
                SchedulerPolicy policy = cell.policy;
                if (cell.exact_priors) {
                    std::map<int, double> priors;
                    std::vector<TaskTruth> truths = gen_truth(c);
                    for (int id = 1; id <= c.n; ++id)
                        priors[id] = truths[id - 1].ram_mb;
                    policy.priors = std::move(priors);
                }
                RunMetrics m = run_dynamic(c, policy, params);
                metrics[static_cast<std::size_t>(i)] = {
                    c.seed, policy_name(policy), size, m.makespan,
                    m.overcommits};
            });
            rows.push_back(summarize(cell.panel, metrics[0].policy, size,
                                     metrics));
        }
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write: " + path);
    return out;
}

} // namespace

void write_trace_csv(const std::string& path, const ScheduleTrace& trace,
                     const std::string& config) {
    std::ofstream out = open_out(path);
    out << "# " << config << "\n";
    out << "time,active_memory\n";
    for (const auto& [t, mem] : trace.memory_trace)
        out << fmt(t) << "," << fmt(mem) << "\n";
}

void write_summary_json(const std::string& path, const ScheduleTrace& trace,
                        const std::string& config) {
    nlohmann::json j;
    j["config"] = config;
    j["peak"] = trace.peak;
    j["makespan"] = trace.makespan;
    j["starts"] = trace.start;
    j["completions"] = trace.completion;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_orders_json(const std::string& path,
                       const std::vector<Table1Row>& rows,
                       const std::vector<std::vector<int>>& orders,
                       const std::string& config) {
    if (rows.size() != orders.size())
        throw input_error("orders: row/order count mismatch");
    nlohmann::json j;
    j["config"] = config;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        nlohmann::json entry;
        std::vector<int> ids;
        ids.reserve(orders[i].size());
        for (int pos : orders[i]) ids.push_back(pos + 1);
        entry["order"] = ids;
        entry["peak"] = rows[i].optimized_peak;
        entry["sequential_peak"] = rows[i].sequential_peak;
        entry["decrease_pct"] = rows[i].decrease_pct;
        j["orders"][std::to_string(rows[i].machines)] = entry;
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_table1_csv(const std::string& path,
                      const std::vector<Table1Row>& rows,
                      const std::string& config) {
    std::ofstream out = open_out(path);
    out << "# " << config << "\n";
    out << "K,sequential_peak,optimized_peak,decrease_pct\n";
    for (const Table1Row& r : rows)
        out << r.machines << "," << fmt(r.sequential_peak) << ","
            << fmt(r.optimized_peak) << "," << fmt(r.decrease_pct) << "\n";
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows,
                       const std::string& config) {
    std::ofstream out = open_out(path);
    out << "# " << config << "\n";
    out << "seed,policy,size_pct,makespan,overcommits\n";
    for (const MetricsRow& r : rows)
        out << r.seed << "," << r.policy << "," << fmt(r.size_pct) << ","
            << fmt(r.makespan) << "," << r.overcommits << "\n";
}

void write_ablation_csv(const std::string& path,
                        const std::vector<AblationRow>& rows,
                        const std::string& config) {
    std::ofstream out = open_out(path);
    out << "# " << config << "\n";
    out << "panel,policy,size_pct,seeds,mean_makespan,mean_overcommits\n";
    for (const AblationRow& r : rows)
        out << r.panel << "," << r.policy << "," << fmt(r.size_pct) << ","
            << r.seeds << "," << fmt(r.mean_makespan) << ","
            << fmt(r.mean_overcommits) << "\n";
}

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (csv.header.empty())
            csv.header = fields;
        else
            csv.rows.push_back(fields);
    }
    if (csv.header.empty()) throw input_error("plotdata: empty csv");
    return csv;
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw input_error("plotdata: bad number " + s);
        return v;
    } catch (const std::exception&) {
        throw input_error("plotdata: bad number '" + s + "'");
    }
}

} // namespace

std::string plotdata_json(const std::string& csv_text) {
    Csv csv = parse_csv(csv_text);
    if (csv.rows.empty()) throw input_error("plotdata: no data rows");

    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const std::string& f : v) s += (s.empty() ? "" : ",") + f;
        return s;
    };
    const std::string schema = join(csv.header);
    nlohmann::json series = nlohmann::json::array();

    auto push_series = [&](const std::string& label,
                           const std::vector<double>& x,
                           const std::vector<double>& y) {
        series.push_back({{"label", label}, {"x", x}, {"y", y}});
    };

    if (schema == "K,sequential_peak,optimized_peak,decrease_pct") {
        std::vector<double> x, seq, opt;
        for (const auto& r : csv.rows) {
            if (r.size() != 4) throw input_error("plotdata: ragged row");
            x.push_back(to_double(r[0]));
            seq.push_back(to_double(r[1]));
            opt.push_back(to_double(r[2]));
        }
        push_series("sequential", x, seq);
        push_series("optimized", x, opt);
    } else if (schema ==
               "panel,policy,size_pct,seeds,mean_makespan,mean_overcommits") {
        std::map<std::string, std::vector<std::pair<double, double>>> makespan,
            overcommits;
        for (const auto& r : csv.rows) {
            if (r.size() != 6) throw input_error("plotdata: ragged row");
            std::string key = r[0] + "/" + r[1];
            double x = to_double(r[2]);
            makespan[key].emplace_back(x, to_double(r[4]));
            overcommits[key].emplace_back(x, to_double(r[5]));
        }
        auto emit = [&](const char* metric, auto& groups) {
            for (auto& [key, points] : groups) {
                std::sort(points.begin(), points.end());
                std::vector<double> x, y;
                for (const auto& [px, py] : points) {
                    x.push_back(px);
                    y.push_back(py);
                }
                push_series(key + ":" + metric, x, y);
            }
        };
        emit("makespan", makespan);
        emit("overcommits", overcommits);
    } else if (schema == "seed,policy,size_pct,makespan,overcommits") {
        std::map<std::string, std::vector<std::pair<double, double>>> groups;
        for (const auto& r : csv.rows) {
            if (r.size() != 5) throw input_error("plotdata: ragged row");
            std::string key = r[1] + "@" + r[2];
            groups[key].emplace_back(to_double(r[0]), to_double(r[3]));
        }
        for (auto& [key, points] : groups) {
            std::sort(points.begin(), points.end());
            std::vector<double> x, y;
            for (const auto& [px, py] : points) {
                x.push_back(px);
                y.push_back(py);
            }
            push_series(key + ":makespan", x, y);
        }
    } else {
        throw input_error("plotdata: unrecognized csv schema: " + schema);
    }

    nlohmann::json j;
    j["series"] = series;
    return j.dump(2);
}

} // namespace memsched
