#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "memsched/errors.hpp"
#include "memsched/workload.hpp"

using namespace memsched;

namespace {

std::string temp_path(const std::string& name) {
    return std::string("/tmp/memsched_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

} // namespace

TEST_CASE("default table is the 22-entry descending autosome list") {
    auto tasks = default_tasks();
    REQUIRE(tasks.size() == 22);
    CHECK(tasks.front().id == 1);
    CHECK(tasks.back().id == 22);
    CHECK(tasks[0].length == doctest::Approx(249.250621).epsilon(1e-12));
    CHECK(tasks[2].length == doctest::Approx(198.022430).epsilon(1e-12));
    CHECK(tasks[21].length == doctest::Approx(48.129895).epsilon(1e-12));
    for (std::size_t i = 1; i < tasks.size(); ++i) {
        CHECK(tasks[i].length < tasks[i - 1].length);
        CHECK(tasks[i].id == static_cast<int>(i) + 1);
    }
}

TEST_CASE("load_tasks parses, skips comments, renumbers ids in file order") {
    std::string path = temp_path("table.tsv");
    write_file(path,
               "# header comment\n"
               "5\t10.5\n"
               "\n"
               "9\t3.25   # trailing comment\n"
               "1\t7\n");
    auto tasks = load_tasks(path);
    REQUIRE(tasks.size() == 3);
    CHECK(tasks[0].id == 1);
    CHECK(tasks[0].length == 10.5);
    CHECK(tasks[1].id == 2);
    CHECK(tasks[1].length == 3.25);
    CHECK(tasks[2].id == 3);
    CHECK(tasks[2].length == 7.0);
    std::remove(path.c_str());
}

TEST_CASE("load_tasks rejects bad input") {
    std::string path = temp_path("bad.tsv");

    write_file(path, "1\t-4\n");
    CHECK_THROWS_AS(load_tasks(path), input_error);

    write_file(path, "1\t0\n");
    CHECK_THROWS_AS(load_tasks(path), input_error);

    write_file(path, "not a row\n");
    CHECK_THROWS_AS(load_tasks(path), input_error);

    write_file(path, "1\t2.5 junk\n");
    CHECK_THROWS_AS(load_tasks(path), input_error);

    write_file(path, "# only comments\n\n");
    CHECK_THROWS_AS(load_tasks(path), input_error);

    CHECK_THROWS_AS(load_tasks(temp_path("does_not_exist.tsv")), input_error);
    std::remove(path.c_str());
}

TEST_CASE("save_tasks then load_tasks round-trips exactly") {
    std::string path = temp_path("roundtrip.tsv");
    auto tasks = default_tasks();
    tasks[3].length = 0.1 + 0.2; // not representable exactly; %.17g must keep it
    save_tasks(path, tasks);
    auto back = load_tasks(path);
    REQUIRE(back.size() == tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        CHECK(back[i].id == tasks[i].id);
        CHECK(back[i].length == tasks[i].length);
    }
    std::remove(path.c_str());
}

TEST_CASE("init order names parse and print") {
    CHECK(parse_init_order("biggest-first") == InitOrder::BiggestFirst);
    CHECK(parse_init_order("smallest-first") == InitOrder::SmallestFirst);
    CHECK(parse_init_order("biggest-and-smallest") ==
          InitOrder::BiggestAndSmallest);
    CHECK(to_string(InitOrder::SmallestFirst) == "smallest-first");
    CHECK(to_string(parse_init_order("biggest-and-smallest")) ==
          "biggest-and-smallest");
    CHECK_THROWS_AS(parse_init_order("alphabetical"), input_error);
    CHECK_THROWS_AS(parse_init_order(""), input_error);
}

TEST_CASE("init_positions picks table ends as documented") {
    CHECK(init_positions(InitOrder::BiggestFirst, 22, 2) ==
          std::vector<int>{0, 1});
    CHECK(init_positions(InitOrder::SmallestFirst, 22, 2) ==
          std::vector<int>{21, 20});
    CHECK(init_positions(InitOrder::BiggestAndSmallest, 22, 2) ==
          std::vector<int>{0, 21});
    CHECK(init_positions(InitOrder::BiggestAndSmallest, 22, 3) ==
          std::vector<int>{0, 21, 20});
    CHECK(init_positions(InitOrder::BiggestAndSmallest, 10, 4) ==
          std::vector<int>{0, 1, 9, 8});
}

TEST_CASE("init_positions with count = n is a permutation") {
    for (InitOrder order : {InitOrder::BiggestFirst, InitOrder::SmallestFirst,
                            InitOrder::BiggestAndSmallest}) {
        for (int n : {1, 2, 5, 8}) {
            auto pos = init_positions(order, n, n);
            REQUIRE(static_cast<int>(pos.size()) == n);
            std::vector<bool> seen(static_cast<std::size_t>(n), false);
            for (int p : pos) {
                REQUIRE(p >= 0);
                REQUIRE(p < n);
                CHECK(!seen[static_cast<std::size_t>(p)]);
                seen[static_cast<std::size_t>(p)] = true;
            }
        }
    }
}

TEST_CASE("init_positions validates its arguments") {
    CHECK_THROWS_AS(init_positions(InitOrder::BiggestFirst, 0, 0), input_error);
    CHECK_THROWS_AS(init_positions(InitOrder::BiggestFirst, 5, 6), input_error);
    CHECK_THROWS_AS(init_positions(InitOrder::BiggestFirst, 5, -1),
                    input_error);
}
