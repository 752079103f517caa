#include "memsched/simulator.hpp"

#include <algorithm>
#include <string>

#include "memsched/errors.hpp"

namespace memsched {

namespace {

void check_inputs(std::size_t n, const std::vector<double>& durs,
                  const std::vector<int>& order, int machines) {
    if (machines < 1) throw input_error("list_schedule: machines must be >= 1");
    if (durs.size() != n || order.size() != n)
        throw input_error("list_schedule: mismatched input sizes");
    std::vector<char> seen(n, 0);
    for (int p : order) {
        if (p < 0 || static_cast<std::size_t>(p) >= n || seen[p])
            throw input_error("list_schedule: order is not a permutation");
        seen[p] = 1;
    }
}

} // namespace

ScheduleTrace list_schedule(const std::vector<double>& mems,
                            const std::vector<double>& durs,
                            const std::vector<int>& order, int machines) {
    const std::size_t n = mems.size();
    check_inputs(n, durs, order, machines);

    ScheduleTrace tr;
    tr.start.assign(n, 0.0);
    tr.completion.assign(n, 0.0);

    // Machines are interchangeable; tracking the multiset of free times is
    // enough. Assigning in permutation order fills simultaneously freed
    // slots in permutation order, which is the documented tie rule.
    std::vector<double> free_at(static_cast<std::size_t>(machines), 0.0);
    for (int pos : order) {
        auto it = std::min_element(free_at.begin(), free_at.end());
        tr.start[pos] = *it;
        tr.completion[pos] = *it + durs[pos];
        *it = tr.completion[pos];
        tr.makespan = std::max(tr.makespan, tr.completion[pos]);
    }

    // Breakpoints of the active-memory step function. kind 0 = completion,
    // kind 1 = start, so completions at time t are applied first.
    struct Event {
        double time;
        int kind;
        double delta;
    };
    std::vector<Event> events;
    events.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        events.push_back({tr.start[i], 1, mems[i]});
        events.push_back({tr.completion[i], 0, -mems[i]});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.kind < b.kind;
    });

    double active = 0.0;
    int running = 0;
    for (std::size_t i = 0; i < events.size();) {
        double t = events[i].time;
        bool starts_here = false;
        while (i < events.size() && events[i].time == t) {
            active += events[i].delta;
            running += events[i].kind == 1 ? 1 : -1;
            starts_here |= events[i].kind == 1;
            ++i;
        }
        if (running == 0) active = 0.0; // cancel float residue when idle
        tr.memory_trace.emplace_back(t, active);
        if (starts_here) tr.peak = std::max(tr.peak, active);
    }
    return tr;
}

ScheduleTrace list_schedule(const std::vector<Task>& table,
                            const std::vector<int>& order, int machines,
                            double eta) {
    std::vector<double> mems, durs;
    mems.reserve(table.size());
    durs.reserve(table.size());
    for (const Task& t : table) {
        mems.push_back(t.length);
        durs.push_back(eta * t.length);
    }
    return list_schedule(mems, durs, order, machines);
}

double peak_memory(const std::vector<Task>& table, const std::vector<int>& order,
                   int machines, double eta) {
    return list_schedule(table, order, machines, eta).peak;
}

std::vector<int> identity_order(int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    return order;
}

PeakEvaluator::PeakEvaluator(std::vector<double> mems, std::vector<double> durs,
                             int machines)
    : mems_(std::move(mems)), durs_(std::move(durs)), machines_(machines) {
    if (machines_ < 1)
        throw input_error("PeakEvaluator: machines must be >= 1");
    if (durs_.size() != mems_.size())
        throw input_error("PeakEvaluator: mismatched input sizes");
    free_.resize(static_cast<std::size_t>(machines_));
    start_time_.resize(mems_.size());
    start_mem_.resize(mems_.size());
    comp_.resize(mems_.size());
}

double PeakEvaluator::peak(const std::vector<int>& order) {
    const std::size_t n = mems_.size();
    std::fill(free_.begin(), free_.end(), 0.0);

    // Start times come out non-decreasing because each assignment replaces
    // the minimum free time with a larger value; only completions get sorted.
    for (std::size_t r = 0; r < n; ++r) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < free_.size(); ++m)
            if (free_[m] < free_[best]) best = m;
        int pos = order[r];
        double s = free_[best];
        double c = s + durs_[pos];
        start_time_[r] = s;
        start_mem_[r] = mems_[pos];
        comp_[r] = {c, mems_[pos]};
        free_[best] = c;
    }
    std::sort(comp_.begin(), comp_.end());

    double active = 0.0;
    double peak = 0.0;
    std::size_t k = 0;
    for (std::size_t r = 0; r < n; ++r) {
        while (k < n && comp_[k].first <= start_time_[r]) {
            active -= comp_[k].second;
            ++k;
        }
        active += start_mem_[r];
        if (active > peak) peak = active;
    }
    last_makespan_ = *std::max_element(free_.begin(), free_.end());
    return peak;
}

} // namespace memsched
