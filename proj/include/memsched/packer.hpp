#pragma once

#include <vector>

namespace memsched {

struct PackItem {
    int id = 0;
    double ram_mb = 0.0; // predicted requirement, > 0
};

// Both packers quantize: item weights round UP to whole quanta and the
// capacity rounds DOWN, so any selected batch stays feasible under the raw
// weights and weight sums are exact integer keys. Using one rounding rule
// for both algorithms keeps their outputs comparable on every instance:
// knapsack utilization >= greedy utilization and greedy cardinality >=
// knapsack cardinality hold exactly.

// Maximizes the number of selected items: sorts by (quantized weight, id)
// ascending and takes items while they fit. Returns ids in ascending order.
std::vector<int> greedy_pack(const std::vector<PackItem>& items,
                             double capacity_mb, double quantum_mb = 1.0);

// Maximizes total quantized weight via sparse subset-sum DP over reachable
// sums <= capacity. Ties prefer more items, then the lexicographically
// smallest id set. Returns ids in ascending order.
std::vector<int> knapsack_pack(const std::vector<PackItem>& items,
                               double capacity_mb, double quantum_mb = 1.0);

// Quantized weight of one item: ceil(ram / quantum) in quantum units.
long long quantize_up(double ram_mb, double quantum_mb);
// Quantized capacity: floor(capacity / quantum) in quantum units.
long long quantize_down(double capacity_mb, double quantum_mb);

} // namespace memsched
