#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace memsched {

// One schedulable unit. `length` is the abstract size column of the input
// table; RAM and duration truths are derived from it by gen_truth.
struct Task {
    int id = 0;          // 1-based, stable across reorderings
    double length = 0.0; // must be > 0
};

// Built-in demo table: 22 human autosome lengths in Mbp, sorted descending.
std::vector<Task> default_tasks();

// Parses "<id>\t<length>" lines; '#' starts a comment; blank lines skipped.
// Ids are renumbered 1..n in file order. Throws input_error on non-positive
// lengths or bad syntax. save_tasks writes the same format and round-trips.
std::vector<Task> load_tasks(const std::string& path);
void save_tasks(const std::string& path, const std::vector<Task>& tasks);

enum class InitOrder { BiggestFirst, SmallestFirst, BiggestAndSmallest };

InitOrder parse_init_order(const std::string& name);
std::string to_string(InitOrder order);

// First `count` 0-based positions of an n-task table (sorted descending by
// the caller's convention) to run in the initial observation phase.
//   BiggestFirst:       0, 1, 2, ...
//   SmallestFirst:      n-1, n-2, ...
//   BiggestAndSmallest: 0 .. count/2-1 from the top, remainder from the tail.
std::vector<int> init_positions(InitOrder order, int n, int count);

} // namespace memsched
