#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "memsched/errors.hpp"
#include "memsched/packer.hpp"
#include "memsched/rng.hpp"

using namespace memsched;

namespace {

// Exhaustive reference over all subsets with the packers' quantized weights.
struct BestSubsets {
    long long best_total = 0; // max quantized weight sum within capacity
    int best_count = 0;       // max cardinality within capacity
};

BestSubsets enumerate(const std::vector<PackItem>& items, double capacity,
                      double quantum) {
    int n = static_cast<int>(items.size());
    long long cap = quantize_down(capacity, quantum);
    std::vector<long long> w;
    for (const auto& it : items) w.push_back(quantize_up(it.ram_mb, quantum));

    BestSubsets best;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        long long total = 0;
        int count = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                total += w[static_cast<std::size_t>(i)];
                ++count;
            }
        if (total > cap) continue;
        best.best_total = std::max(best.best_total, total);
        best.best_count = std::max(best.best_count, count);
    }
    return best;
}

long long total_weight(const std::vector<PackItem>& items,
                       const std::vector<int>& picked, double quantum) {
    long long total = 0;
    for (int id : picked)
        for (const auto& it : items)
            if (it.id == id) total += quantize_up(it.ram_mb, quantum);
    return total;
}

double total_raw(const std::vector<PackItem>& items,
                 const std::vector<int>& picked) {
    double total = 0;
    for (int id : picked)
        for (const auto& it : items)
            if (it.id == id) total += it.ram_mb;
    return total;
}

} // namespace

TEST_CASE("quantization rounds weights up and capacity down") {
    CHECK(quantize_up(1.0, 1.0) == 1);
    CHECK(quantize_up(1.2, 1.0) == 2);
    CHECK(quantize_up(0.0001, 1.0) == 1);
    CHECK(quantize_up(5.0, 1.0) == 5);
    CHECK(quantize_up(1.0, 0.25) == 4);

    CHECK(quantize_down(7.9, 1.0) == 7);
    CHECK(quantize_down(8.0, 1.0) == 8);
    CHECK(quantize_down(0.9, 1.0) == 0);
    CHECK(quantize_down(1.0, 0.25) == 4);
}

TEST_CASE("quantization survives non-representable quanta") {
    // 0.3 / 0.1 is 2.999... in doubles; the result must still cover 0.3
    long long up = quantize_up(0.3, 0.1);
    CHECK(up * 0.1 >= 0.3);
    CHECK((up - 1) * 0.1 < 0.3);

    long long down = quantize_down(0.3, 0.1);
    CHECK(down * 0.1 <= 0.3);
    CHECK((down + 1) * 0.1 > 0.3);
}

TEST_CASE("greedy takes the cheapest items first") {
    std::vector<PackItem> items = {{1, 5}, {2, 1}, {3, 2}, {4, 4}};
    CHECK(greedy_pack(items, 7) == std::vector<int>{2, 3, 4});
    CHECK(greedy_pack(items, 2.5) == std::vector<int>{2});
    CHECK(greedy_pack(items, 100) == std::vector<int>{1, 2, 3, 4});
    CHECK(greedy_pack(items, 0) == std::vector<int>{});
}

TEST_CASE("greedy breaks weight ties by id") {
    std::vector<PackItem> items = {{7, 3}, {2, 3}, {5, 3}};
    CHECK(greedy_pack(items, 6) == std::vector<int>{2, 5});
}

TEST_CASE("knapsack maximizes total weight") {
    std::vector<PackItem> items = {{1, 3}, {2, 4}, {3, 5}};
    CHECK(knapsack_pack(items, 7) == std::vector<int>{1, 2});
    CHECK(knapsack_pack(items, 9) == std::vector<int>{2, 3});
    CHECK(knapsack_pack(items, 12) == std::vector<int>{1, 2, 3});
    CHECK(knapsack_pack(items, 2) == std::vector<int>{});
}

TEST_CASE("knapsack ties prefer more items, then the smallest id set") {
    // total 5 via {1} or via {2,3}: cardinality wins
    std::vector<PackItem> a = {{1, 5}, {2, 2}, {3, 3}};
    CHECK(knapsack_pack(a, 5) == std::vector<int>{2, 3});

    // four ways to reach 5 with two items: lexicographically smallest ids win
    std::vector<PackItem> b = {{1, 2}, {2, 3}, {3, 3}, {4, 2}};
    CHECK(knapsack_pack(b, 5) == std::vector<int>{1, 2});
}

TEST_CASE("inputs are validated") {
    std::vector<PackItem> dup = {{1, 2}, {1, 3}};
    CHECK_THROWS_AS(greedy_pack(dup, 10), input_error);
    CHECK_THROWS_AS(knapsack_pack(dup, 10), input_error);

    std::vector<PackItem> nonpos = {{1, 0.0}};
    CHECK_THROWS_AS(greedy_pack(nonpos, 10), input_error);
    CHECK_THROWS_AS(knapsack_pack(nonpos, 10), input_error);

    std::vector<PackItem> ok = {{1, 2}};
    CHECK_THROWS_AS(greedy_pack(ok, 10, 0.0), input_error);
    CHECK_THROWS_AS(knapsack_pack(ok, 10, -1.0), input_error);
    CHECK_THROWS_AS(greedy_pack(ok, -5), input_error);

    CHECK(greedy_pack({}, 10) == std::vector<int>{});
    CHECK(knapsack_pack({}, 10) == std::vector<int>{});
}

TEST_CASE("both packers match the exhaustive reference on random instances") {
    rng_t rng(314);
    for (int rep = 0; rep < 120; ++rep) {
        int n = 1 + static_cast<int>(uniform_u64(rng, 0, 11));
        std::vector<PackItem> items;
        for (int i = 0; i < n; ++i) {
            double ram = 0.5 * std::pow(600.0, uniform_unit(rng)); // 0.5..300
            items.push_back({i + 1, ram});
        }
        double capacity = 600.0 * uniform_unit(rng);
        auto reference = enumerate(items, capacity, 1.0);

        auto dp = knapsack_pack(items, capacity);
        auto greedy = greedy_pack(items, capacity);
        CHECK(total_weight(items, dp, 1.0) == reference.best_total);
        CHECK(static_cast<int>(greedy.size()) == reference.best_count);
    }
}

TEST_CASE("dominance invariants hold on larger random instances") {
    rng_t rng(2718);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 1 + static_cast<int>(uniform_u64(rng, 0, 29));
        std::vector<PackItem> items;
        for (int i = 0; i < n; ++i)
            items.push_back({i + 1, 0.5 + 299.5 * uniform_unit(rng)});
        double capacity = 50.0 + 550.0 * uniform_unit(rng);

        auto dp = knapsack_pack(items, capacity);
        auto greedy = greedy_pack(items, capacity);

        // knapsack never packs less total weight; greedy never fewer items
        CHECK(total_weight(items, dp, 1.0) >= total_weight(items, greedy, 1.0));
        CHECK(greedy.size() >= dp.size());

        // raw sums stay within the raw capacity (round-up weights, round-down
        // capacity make this safe by construction)
        CHECK(total_raw(items, dp) <= capacity + 1e-9);
        CHECK(total_raw(items, greedy) <= capacity + 1e-9);

        // outputs are sorted unique ids drawn from the instance
        for (auto* sel : {&dp, &greedy}) {
            CHECK(std::is_sorted(sel->begin(), sel->end()));
            CHECK(std::adjacent_find(sel->begin(), sel->end()) == sel->end());
            for (int id : *sel) {
                CHECK(id >= 1);
                CHECK(id <= n);
            }
        }
    }
}

TEST_CASE("quantum granularity changes what fits") {
    std::vector<PackItem> items = {{1, 0.4}, {2, 0.4}, {3, 0.4}};
    // with 1 MB quanta each item weighs a full quantum
    CHECK(greedy_pack(items, 1.0, 1.0) == std::vector<int>{1});
    // with 0.25 MB quanta each weighs 2 quanta of the capacity's 4
    CHECK(greedy_pack(items, 1.0, 0.25) == std::vector<int>{1, 2});
}
