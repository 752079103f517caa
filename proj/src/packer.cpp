#include "memsched/packer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "memsched/errors.hpp"

namespace memsched {

long long quantize_up(double ram_mb, double quantum_mb) {
    long long u = static_cast<long long>(std::ceil(ram_mb / quantum_mb));
    // correct one-off float slop so u is the minimal count covering ram
    while (static_cast<double>(u) * quantum_mb < ram_mb) ++u;
    while (u > 1 && static_cast<double>(u - 1) * quantum_mb >= ram_mb) --u;
    return u;
}

long long quantize_down(double capacity_mb, double quantum_mb) {
    long long c = static_cast<long long>(std::floor(capacity_mb / quantum_mb));
    while (static_cast<double>(c) * quantum_mb > capacity_mb) --c;
    while (static_cast<double>(c + 1) * quantum_mb <= capacity_mb) ++c;
    return std::max(c, 0LL);
}

namespace {

struct QuantItem {
    int id;
    long long weight;
};

std::vector<QuantItem> validate_and_quantize(const std::vector<PackItem>& items,
                                             double capacity_mb,
                                             double quantum_mb) {
    if (!(quantum_mb > 0.0)) throw input_error("packer: quantum must be > 0");
    if (capacity_mb < 0.0) throw input_error("packer: negative capacity");
    std::set<int> ids;
    std::vector<QuantItem> q;
    q.reserve(items.size());
    for (const PackItem& it : items) {
        if (!(it.ram_mb > 0.0))
            throw input_error("packer: non-positive ram for item " +
                              std::to_string(it.id));
        if (!ids.insert(it.id).second)
            throw input_error("packer: duplicate item id " +
                              std::to_string(it.id));
        q.push_back({it.id, quantize_up(it.ram_mb, quantum_mb)});
    }
    return q;
}

} // namespace

std::vector<int> greedy_pack(const std::vector<PackItem>& items,
                             double capacity_mb, double quantum_mb) {
    std::vector<QuantItem> q =
        validate_and_quantize(items, capacity_mb, quantum_mb);
    const long long capacity = quantize_down(capacity_mb, quantum_mb);

    std::sort(q.begin(), q.end(), [](const QuantItem& a, const QuantItem& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        return a.id < b.id;
    });
    std::vector<int> selected;
    long long total = 0;
    for (const QuantItem& it : q) {
        if (total + it.weight > capacity) break;
        total += it.weight;
        selected.push_back(it.id);
    }
    std::sort(selected.begin(), selected.end());
    return selected;
}

std::vector<int> knapsack_pack(const std::vector<PackItem>& items,
                               double capacity_mb, double quantum_mb) {
    std::vector<QuantItem> q =
        validate_and_quantize(items, capacity_mb, quantum_mb);
    const long long capacity = quantize_down(capacity_mb, quantum_mb);

    // Ascending-id processing means every stored subset only ever grows by
    // appending a larger id. That keeps subsets sorted and makes the per-sum
    // tie rule (more items, then lexicographically smaller) safe to apply
    // locally: a common extension suffix cannot flip either comparison.
    std::sort(q.begin(), q.end(),
              [](const QuantItem& a, const QuantItem& b) { return a.id < b.id; });

    // prefer: does a beat b for the same weight sum?
    auto prefer = [](const std::vector<int>& a, const std::vector<int>& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    };

    std::map<long long, std::vector<int>> best{{0, {}}};
    for (const QuantItem& it : q) {
        if (it.weight > capacity) continue;
        std::map<long long, std::vector<int>> next = best;
        for (const auto& [sum, subset] : best) {
            long long s2 = sum + it.weight;
            if (s2 > capacity) continue;
            std::vector<int> cand = subset;
            cand.push_back(it.id);
            auto [slot, inserted] = next.try_emplace(s2, cand);
            if (!inserted && prefer(cand, slot->second)) slot->second = cand;
        }
        best.swap(next);
    }
    return best.rbegin()->second; // max reachable sum; subset already sorted
}

} // namespace memsched
