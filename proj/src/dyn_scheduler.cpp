#include "memsched/dyn_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "memsched/errors.hpp"
#include "memsched/packer.hpp"
#include "memsched/rng.hpp"

namespace memsched {

namespace {

constexpr double kFeasEps = 1e-9;

void check_schedulable(const std::vector<TaskTruth>& truths, double total_ram) {
    for (std::size_t i = 0; i < truths.size(); ++i)
        if (truths[i].ram_mb > total_ram)
            throw input_error("unschedulable: task " + std::to_string(i + 1) +
                              " needs " + std::to_string(truths[i].ram_mb) +
                              " MB of " + std::to_string(total_ram));
}

// Collapses (time, +/-alloc) events into breakpoints of total allocated MB.
// Releases at time t apply before charges at t, matching half-open activity.
std::vector<std::pair<double, double>> build_trace(
    std::vector<std::pair<double, double>> events) {
    std::sort(events.begin(), events.end(),
              [](const std::pair<double, double>& a,
                 const std::pair<double, double>& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return a.second < b.second;
              });
    std::vector<std::pair<double, double>> trace;
    double level = 0.0;
    int active = 0;
    for (std::size_t i = 0; i < events.size();) {
        double t = events[i].first;
        while (i < events.size() && events[i].first == t) {
            active += events[i].second > 0.0 ? 1 : -1;
            level += events[i++].second;
        }
        if (active == 0) level = 0.0; // cancel float residue when idle
        trace.emplace_back(t, level);
    }
    return trace;
}

} // namespace

std::vector<TaskTruth> gen_truth(const SimEnvConfig& cfg) {
    if (cfg.n < 1) throw input_error("gen_truth: n must be >= 1");
    if (!(cfg.total_ram > 0.0))
        throw input_error("gen_truth: total_ram must be positive");
    if (!(cfg.size_pct > 0.0))
        throw input_error("gen_truth: size_pct must be positive");
    if (cfg.beta_ram < 0.0 || cfg.beta_ram >= 1.0 || cfg.beta_dur < 0.0 ||
        cfg.beta_dur >= 1.0)
        throw input_error("gen_truth: beta must be in [0, 1)");

    double base1 = cfg.m * 1.0 + cfg.c;
    if (!(base1 > 0.0))
        throw input_error("gen_truth: non-positive base value for task 1");
    double scale = cfg.size_pct / 100.0 * cfg.total_ram / base1;

    std::vector<double> base(static_cast<std::size_t>(cfg.n));
    for (int i = 1; i <= cfg.n; ++i) {
        base[i - 1] = scale * (cfg.m * i + cfg.c);
        if (!(base[i - 1] > 0.0))
            throw input_error("gen_truth: non-positive base value for task " +
                              std::to_string(i));
    }

    rng_t g(cfg.seed);
    std::vector<TaskTruth> truths(static_cast<std::size_t>(cfg.n));
    for (int i = 0; i < cfg.n; ++i) {
        double u =
            cfg.beta_ram > 0.0 ? uniform_real(g, -cfg.beta_ram, cfg.beta_ram) : 0.0;
        double v =
            cfg.beta_dur > 0.0 ? uniform_real(g, -cfg.beta_dur, cfg.beta_dur) : 0.0;
        truths[i] = {base[i] * (1.0 + u), base[i] * (1.0 + v)};
    }
    return truths;
}

PackerKind parse_packer(const std::string& name) {
    if (name == "greedy") return PackerKind::Greedy;
    if (name == "knapsack") return PackerKind::Knapsack;
    throw input_error("unknown packer: " + name);
}

std::string to_string(PackerKind kind) {
    return kind == PackerKind::Greedy ? "greedy" : "knapsack";
}

RunMetrics run_dynamic(const SimEnvConfig& cfg, const SchedulerPolicy& policy,
                       const PredictorParams& predictor_params) {
    std::vector<TaskTruth> truths = gen_truth(cfg);
    check_schedulable(truths, cfg.total_ram);
    if (policy.init_count < 1)
        throw input_error("run_dynamic: init_count must be >= 1");

    PredictorParams params = predictor_params;
    params.n_total = cfg.n;
    OnlinePredictor predictor(params);

    RunMetrics metrics;
    std::vector<std::pair<double, double>> util_events;
    std::set<int> pending;
    for (int id = 1; id <= cfg.n; ++id) pending.insert(id);

    struct Running {
        int id;
        double alloc;
        double finish;
        std::size_t attempt;
    };
    std::vector<Running> running;
    std::map<int, double> last_failed_alloc;

    auto log_attempt = [&](int id, double launch, double alloc) {
        metrics.attempts.push_back({id, launch, launch + truths[id - 1].duration,
                                    alloc, truths[id - 1].ram_mb, false});
        return metrics.attempts.size() - 1;
    };

    double now = 0.0;
    if (policy.priors) {
        for (int id = 1; id <= cfg.n; ++id) {
            auto it = policy.priors->find(id);
            if (it == policy.priors->end())
                throw input_error("run_dynamic: priors missing task " +
                                  std::to_string(id));
            predictor.observe(id, it->second);
        }
        if (!predictor.can_fit())
            throw input_error("run_dynamic: degree too high for prior fit");
        predictor.fit();
    } else {
        // Sequential warm-up at full allocation: long enough to satisfy the
        // configured count and to make the first fit possible.
        std::vector<int> warmup = init_positions(policy.init, cfg.n, cfg.n);
        int done = 0;
        for (int pos : warmup) {
            if (done >= policy.init_count && predictor.can_fit()) break;
            int id = pos + 1;
            log_attempt(id, now, cfg.total_ram);
            util_events.emplace_back(now, cfg.total_ram);
            now += truths[id - 1].duration;
            util_events.emplace_back(now, -cfg.total_ram);
            predictor.observe(id, truths[id - 1].ram_mb);
            pending.erase(id);
            ++done;
        }
        if (!predictor.can_fit())
            throw input_error("run_dynamic: degree too high to ever fit");
        predictor.fit();
    }
    metrics.makespan = now;

    // Allocation for a pending task. The model estimate is raised to any
    // stored value for the task (prior or post-failure synthetic) and to
    // scale * the last failed allocation, so repeated failures escalate
    // geometrically instead of stalling; the total-RAM clamp keeps every
    // item packable, which guarantees progress on an idle machine.
    auto effective_mb = [&](int id) {
        double est = policy.use_bias ? predictor.conservative_predict(id)
                                     : predictor.predict(id);
        if (predictor.has_observation(id))
            est = std::max(est, predictor.observed_value(id));
        auto it = last_failed_alloc.find(id);
        if (it != last_failed_alloc.end())
            est = std::max(est, params.overcommit_scale * it->second);
        return std::min(est, cfg.total_ram);
    };

    auto launch_batch = [&](double t) {
        if (pending.empty()) return;
        double in_use = 0.0;
        for (const Running& r : running) in_use += r.alloc;
        double avail = cfg.total_ram - in_use;

        std::vector<PackItem> items;
        items.reserve(pending.size());
        for (int id : pending) items.push_back({id, effective_mb(id)});
        std::vector<int> batch =
            policy.packer == PackerKind::Greedy
                ? greedy_pack(items, avail, policy.pack_quantum_mb)
                : knapsack_pack(items, avail, policy.pack_quantum_mb);
        std::map<int, double> alloc_of;
        for (const PackItem& it : items) alloc_of[it.id] = it.ram_mb;
        for (int id : batch) {
            double alloc = alloc_of[id];
            std::size_t idx = log_attempt(id, t, alloc);
            running.push_back({id, alloc, t + truths[id - 1].duration, idx});
            util_events.emplace_back(t, alloc);
            util_events.emplace_back(t + truths[id - 1].duration, -alloc);
            pending.erase(id);
        }
    };

    launch_batch(now);
    if (!pending.empty() && running.empty())
        throw input_error("run_dynamic: packer made no progress");

    while (!running.empty()) {
        double t = running[0].finish;
        for (const Running& r : running) t = std::min(t, r.finish);

        std::vector<Running> done;
        for (const Running& r : running)
            if (r.finish == t) done.push_back(r);
        running.erase(std::remove_if(running.begin(), running.end(),
                                     [&](const Running& r) {
                                         return r.finish == t;
                                     }),
                      running.end());
        std::sort(done.begin(), done.end(),
                  [](const Running& a, const Running& b) { return a.id < b.id; });

        for (const Running& r : done) {
            double true_ram = truths[r.id - 1].ram_mb;
            metrics.attempts[r.attempt].failed = true_ram > r.alloc;
            if (true_ram > r.alloc) {
                ++metrics.overcommits;
                predictor.record_overcommit(r.id);
                last_failed_alloc[r.id] = r.alloc;
                pending.insert(r.id);
            } else {
                predictor.observe(r.id, true_ram);
            }
        }
        predictor.fit();
        metrics.makespan = std::max(metrics.makespan, t);

        launch_batch(t);
        if (!pending.empty() && running.empty())
            throw input_error("run_dynamic: packer made no progress");
    }

    metrics.utilization_trace = build_trace(std::move(util_events));
    return metrics;
}

RunMetrics run_naive(const SimEnvConfig& cfg) {
    std::vector<TaskTruth> truths = gen_truth(cfg);
    check_schedulable(truths, cfg.total_ram);

    RunMetrics metrics;
    std::vector<std::pair<double, double>> util_events;
    double now = 0.0;
    for (int id = 1; id <= cfg.n; ++id) {
        const TaskTruth& tt = truths[id - 1];
        metrics.attempts.push_back(
            {id, now, now + tt.duration, cfg.total_ram, tt.ram_mb, false});
        util_events.emplace_back(now, cfg.total_ram);
        now += tt.duration;
        util_events.emplace_back(now, -cfg.total_ram);
    }
    metrics.makespan = now;
    metrics.utilization_trace = build_trace(std::move(util_events));
    return metrics;
}

namespace {

// Used-RAM step profile of already-placed tasks, plus feasibility probing.
struct Profile {
    std::vector<std::pair<double, double>> events; // (time, +/-ram), sorted
    std::vector<double> completions;               // candidate start times

    // max used RAM over [t0, t1) with half-open task activity
    double max_used(double t0, double t1) const {
        double active = 0.0, peak = 0.0;
        for (const auto& [time, delta] : events) {
            if (time <= t0) {
                active += delta;
            } else if (time < t1) {
                if (peak < active) peak = active;
                active += delta;
            } else {
                break;
            }
        }
        return std::max(peak, active);
    }

    // Earliest candidate start >= not_before: the floor itself, then each
    // later completion. The floor is a valid event time for callers that
    // batch placements (it is a previous placement's start or zero).
    double earliest_start(double ram, double dur, double cap,
                          double not_before = 0.0) const {
        auto fits = [&](double t0) {
            return max_used(t0, t0 + dur) + ram <= cap + kFeasEps;
        };
        if (fits(not_before)) return not_before;
        for (double t : completions)
            if (t > not_before && fits(t)) return t;
        return completions.empty() ? not_before
                                   : std::max(completions.back(), not_before);
    }

    void place(double start, double ram, double dur) {
        auto up = std::make_pair(start, ram);
        events.insert(std::upper_bound(events.begin(), events.end(), up), up);
        auto down = std::make_pair(start + dur, -ram);
        events.insert(std::upper_bound(events.begin(), events.end(), down),
                      down);
        completions.insert(std::upper_bound(completions.begin(),
                                            completions.end(), start + dur),
                           start + dur);
    }
};

} // namespace

double place_in_order(const std::vector<TaskTruth>& truths, double total_ram,
                      const std::vector<int>& order) {
    check_schedulable(truths, total_ram);
    Profile prof;
    double makespan = 0.0;
    for (int pos : order) {
        const TaskTruth& tt = truths[pos];
        double s = prof.earliest_start(tt.ram_mb, tt.duration, total_ram);
        prof.place(s, tt.ram_mb, tt.duration);
        makespan = std::max(makespan, s + tt.duration);
    }
    return makespan;
}

namespace {

// Knapsack packing with perfect knowledge of true RAM; launches at t = 0 and
// at completion events. A strong constructive upper bound for the optimum.
double oracle_packing_makespan(const std::vector<TaskTruth>& truths,
                               double total_ram) {
    const int n = static_cast<int>(truths.size());
    std::set<int> pending;
    for (int id = 1; id <= n; ++id) pending.insert(id);
    struct Running {
        int id;
        double finish;
    };
    std::vector<Running> running;
    double makespan = 0.0, now = 0.0, in_use = 0.0;

    while (!pending.empty() || !running.empty()) {
        if (!pending.empty()) {
            std::vector<PackItem> items;
            for (int id : pending)
                items.push_back({id, truths[id - 1].ram_mb});
            std::vector<int> batch =
                knapsack_pack(items, total_ram - in_use, 1.0);
            for (int id : batch) {
                running.push_back({id, now + truths[id - 1].duration});
                in_use += truths[id - 1].ram_mb;
                pending.erase(id);
            }
        }
        if (running.empty()) break; // nothing fit; cannot occur with valid input
        double t = running[0].finish;
        for (const Running& r : running) t = std::min(t, r.finish);
        for (const Running& r : running)
            if (r.finish == t) in_use -= truths[r.id - 1].ram_mb;
        running.erase(std::remove_if(running.begin(), running.end(),
                                     [&](const Running& r) {
                                         return r.finish == t;
                                     }),
                      running.end());
        makespan = std::max(makespan, t);
        now = t;
    }
    return makespan;
}

struct BnB {
    const std::vector<TaskTruth>& truths;
    double cap;
    double total_area;
    double best;

    BnB(const std::vector<TaskTruth>& tt, double c, double incumbent)
        : truths(tt), cap(c), best(incumbent) {
        total_area = 0.0;
        for (const TaskTruth& t : tt) total_area += t.ram_mb * t.duration;
    }

    // Earliest time by which `area` of work fits into capacity left free by
    // the profile; a relaxation ignoring task shapes, hence a lower bound.
    double area_bound(const Profile& prof, double area) const {
        if (area <= 0.0) return 0.0;
        double active = 0.0, prev = 0.0, used_area = 0.0;
        for (const auto& [time, delta] : prof.events) {
            double free_cap = cap - active;
            double span = time - prev;
            if (free_cap > 0.0 && span > 0.0) {
                if (used_area + free_cap * span >= area)
                    return prev + (area - used_area) / free_cap;
                used_area += free_cap * span;
            }
            active += delta;
            prev = time;
        }
        return prev + (area - used_area) / cap;
    }

    // Placements are enumerated in non-decreasing start order with ties
    // resolved by ascending task index. Every active schedule has exactly
    // one such placement sequence, so this prunes the permutations that
    // rebuild the same schedule in a different order; optimal schedules
    // for a regular objective are active, so completeness is preserved.
    void dfs(const Profile& prof, unsigned remaining_mask, double cur_makespan,
             double remaining_area, double last_start, int last_id) {
        if (remaining_mask == 0) {
            best = std::min(best, cur_makespan);
            return;
        }
        double lb = std::max(cur_makespan, area_bound(prof, remaining_area));
        if (lb >= best - kFeasEps) return;

        const int n = static_cast<int>(truths.size());
        for (int i = 0; i < n; ++i) {
            if (!(remaining_mask & (1u << i))) continue;
            // identical-sibling symmetry: only the lowest index branches
            bool duplicate = false;
            for (int j = 0; j < i && !duplicate; ++j)
                if ((remaining_mask & (1u << j)) &&
                    truths[j].ram_mb == truths[i].ram_mb &&
                    truths[j].duration == truths[i].duration)
                    duplicate = true;
            if (duplicate) continue;

            const TaskTruth& tt = truths[i];
            double s =
                prof.earliest_start(tt.ram_mb, tt.duration, cap, last_start);
            if (s <= last_start + kFeasEps && i < last_id)
                continue; // same-start wave already covered in index order
            double finish = s + tt.duration;
            if (std::max(cur_makespan, finish) >= best - kFeasEps) continue;

            Profile child = prof;
            child.place(s, tt.ram_mb, tt.duration);
            dfs(child, remaining_mask & ~(1u << i),
                std::max(cur_makespan, finish),
                remaining_area - tt.ram_mb * tt.duration, s, i);
        }
    }
};

} // namespace

RunMetrics run_theoretical(const SimEnvConfig& cfg, int exact_limit) {
    std::vector<TaskTruth> truths = gen_truth(cfg);
    check_schedulable(truths, cfg.total_ram);
    const int n = cfg.n;

    // constructive incumbents
    std::vector<int> by_duration(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) by_duration[i] = i;
    std::sort(by_duration.begin(), by_duration.end(), [&](int a, int b) {
        if (truths[a].duration != truths[b].duration)
            return truths[a].duration > truths[b].duration;
        return a < b;
    });
    double incumbent =
        std::min(place_in_order(truths, cfg.total_ram, by_duration),
                 oracle_packing_makespan(truths, cfg.total_ram));

    RunMetrics metrics;
    metrics.exact = n <= exact_limit && n <= 30;
    if (metrics.exact) {
        BnB solver(truths, cfg.total_ram, incumbent);
        Profile empty;
        double area = 0.0;
        for (const TaskTruth& t : truths) area += t.ram_mb * t.duration;
        solver.dfs(empty, (1u << n) - 1, 0.0, area, 0.0, -1);
        incumbent = solver.best;
    }
    metrics.makespan = incumbent;
    return metrics;
}

} // namespace memsched
