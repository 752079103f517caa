#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "memsched/errors.hpp"
#include "memsched/rng.hpp"
#include "memsched/simulator.hpp"
#include "memsched/workload.hpp"

using namespace memsched;

namespace {

std::vector<Task> make_table(const std::vector<double>& lengths) {
    std::vector<Task> t;
    for (std::size_t i = 0; i < lengths.size(); ++i)
        t.push_back({static_cast<int>(i) + 1, lengths[i]});
    return t;
}

// Integral of the active-memory step function described by the trace.
double trace_area(const std::vector<std::pair<double, double>>& trace) {
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i)
        area += (trace[i + 1].first - trace[i].first) * trace[i].second;
    return area;
}

} // namespace

TEST_CASE("three tasks on two machines, worked by hand") {
    auto table = make_table({10, 7, 4});
    auto tr = list_schedule(table, {0, 1, 2}, 2);

    CHECK(tr.start == std::vector<double>{0, 0, 7});
    CHECK(tr.completion == std::vector<double>{10, 7, 11});
    CHECK(tr.peak == doctest::Approx(17.0));
    CHECK(tr.makespan == doctest::Approx(11.0));

    REQUIRE(tr.memory_trace.size() == 4);
    CHECK(tr.memory_trace[0] == std::pair<double, double>{0, 17});
    CHECK(tr.memory_trace[1] == std::pair<double, double>{7, 14});
    CHECK(tr.memory_trace[2] == std::pair<double, double>{10, 4});
    CHECK(tr.memory_trace[3] == std::pair<double, double>{11, 0});
}

TEST_CASE("one machine serializes; K >= n is fully parallel") {
    auto table = make_table({10, 7, 4});

    auto serial = list_schedule(table, {0, 1, 2}, 1);
    CHECK(serial.peak == doctest::Approx(10.0));
    CHECK(serial.makespan == doctest::Approx(21.0));

    auto wide = list_schedule(table, {0, 1, 2}, 5);
    CHECK(wide.peak == doctest::Approx(21.0));
    CHECK(wide.makespan == doctest::Approx(10.0));
}

TEST_CASE("eta stretches durations but not memory") {
    auto table = make_table({10, 7, 4});
    auto tr = list_schedule(table, {0, 1, 2}, 1, 2.0);
    CHECK(tr.peak == doctest::Approx(10.0));
    CHECK(tr.makespan == doctest::Approx(42.0));
}

TEST_CASE("a completion at time t releases memory before a start at t") {
    // One machine: the second task starts exactly when the first completes,
    // so both are never active together.
    auto table = make_table({5, 5});
    auto tr = list_schedule(table, {0, 1}, 1);
    CHECK(tr.peak == doctest::Approx(5.0));
    CHECK(tr.makespan == doctest::Approx(10.0));
}

TEST_CASE("machines freed at the same time are filled in permutation order") {
    std::vector<double> mems = {10, 20, 1, 2};
    std::vector<double> durs = {5, 5, 1, 1};
    auto tr = list_schedule(mems, durs, {0, 1, 2, 3}, 2);
    CHECK(tr.start == std::vector<double>{0, 0, 5, 5});
    CHECK(tr.peak == doctest::Approx(30.0));
    CHECK(tr.makespan == doctest::Approx(6.0));
}

TEST_CASE("identity order on a descending table peaks at the first K tasks") {
    auto table = default_tasks();
    auto identity = identity_order(22);
    for (int k = 2; k <= 10; ++k) {
        double expected = 0.0;
        for (int i = 0; i < k; ++i) expected += table[i].length;
        CHECK(peak_memory(table, identity, k) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("trace area equals the sum of memory x duration") {
    auto table = make_table({10, 7, 4});
    auto tr = list_schedule(table, {0, 1, 2}, 2);
    CHECK(trace_area(tr.memory_trace) == doctest::Approx(165.0));

    // Random instances: the identity holds regardless of order or K.
    rng_t rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        int n = 1 + static_cast<int>(uniform_u64(rng, 0, 11));
        std::vector<double> lengths;
        double expected = 0.0;
        for (int i = 0; i < n; ++i) {
            double len = 0.5 + 9.5 * uniform_unit(rng);
            lengths.push_back(len);
            expected += len * len; // memory == length, duration == length
        }
        auto order = identity_order(n);
        std::shuffle(order.begin(), order.end(), rng);
        int k = 1 + static_cast<int>(uniform_u64(rng, 0, 3));
        auto tr2 = list_schedule(make_table(lengths), order, k);
        CHECK(trace_area(tr2.memory_trace) ==
              doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("memory trace times are strictly increasing and end at zero") {
    auto table = default_tasks();
    auto tr = list_schedule(table, identity_order(22), 4);
    for (std::size_t i = 1; i < tr.memory_trace.size(); ++i)
        CHECK(tr.memory_trace[i].first > tr.memory_trace[i - 1].first);
    CHECK(tr.memory_trace.back().second == 0.0);
    CHECK(tr.memory_trace.back().first == doctest::Approx(tr.makespan));
}

TEST_CASE("invalid orders and machine counts are rejected") {
    auto table = make_table({10, 7, 4});
    CHECK_THROWS_AS(list_schedule(table, {0, 1}, 2), input_error);
    CHECK_THROWS_AS(list_schedule(table, {0, 1, 1}, 2), input_error);
    CHECK_THROWS_AS(list_schedule(table, {0, 1, 3}, 2), input_error);
    CHECK_THROWS_AS(list_schedule(table, {0, 1, 2}, 0), input_error);
    CHECK_THROWS_AS(list_schedule(table, {0, 1, 2}, -1), input_error);
}

TEST_CASE("PeakEvaluator matches list_schedule on random instances") {
    rng_t rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 2 + static_cast<int>(uniform_u64(rng, 0, 18));
        std::vector<double> mems, durs;
        for (int i = 0; i < n; ++i) {
            mems.push_back(1.0 + 99.0 * uniform_unit(rng));
            durs.push_back(0.1 + 9.9 * uniform_unit(rng));
        }
        int k = 1 + static_cast<int>(uniform_u64(rng, 0, 5));
        PeakEvaluator eval(mems, durs, k);

        auto order = identity_order(n);
        for (int shuffle = 0; shuffle < 3; ++shuffle) {
            std::shuffle(order.begin(), order.end(), rng);
            auto tr = list_schedule(mems, durs, order, k);
            CHECK(eval.peak(order) == doctest::Approx(tr.peak).epsilon(1e-12));
            CHECK(eval.last_makespan() ==
                  doctest::Approx(tr.makespan).epsilon(1e-12));
        }
    }
}

TEST_CASE("identity_order builds 0..n-1") {
    CHECK(identity_order(0).empty());
    CHECK(identity_order(4) == std::vector<int>{0, 1, 2, 3});
}
