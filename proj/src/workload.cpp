#include "memsched/workload.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "memsched/errors.hpp"

namespace memsched {

std::vector<Task> default_tasks() {
    // GRCh37 autosome lengths (Mbp), descending. Note chr20 > chr19 and
    // chr22 > chr21, so the tail is not in chromosome-number order.
    static const double lengths[] = {
        249.250621, 243.199373, 198.022430, 191.154276, 180.915260,
        171.115067, 159.138663, 146.364022, 141.213431, 135.534747,
        135.006516, 133.851895, 115.169878, 107.349540, 102.531392,
        90.354753,  81.195210,  78.077248,  63.025520,  59.128983,
        51.304566,  48.129895,
    };
    std::vector<Task> tasks;
    tasks.reserve(22);
    for (int i = 0; i < 22; ++i) tasks.push_back({i + 1, lengths[i]});
    return tasks;
}

std::vector<Task> load_tasks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open task table: " + path);

    std::vector<Task> tasks;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // skip blank / whitespace-only lines
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

        std::istringstream ls(line);
        int file_id = 0;
        double length = 0.0;
        if (!(ls >> file_id >> length))
            throw input_error("bad task line " + std::to_string(lineno) +
                              " in " + path);
        std::string rest;
        if (ls >> rest)
            throw input_error("trailing junk on task line " +
                              std::to_string(lineno) + " in " + path);
        if (!(length > 0.0))
            throw input_error("non-positive length on line " +
                              std::to_string(lineno) + " in " + path);
        // ids are renumbered 1..n in file order; the id column is cosmetic
        tasks.push_back({static_cast<int>(tasks.size()) + 1, length});
    }
    if (tasks.empty()) throw input_error("empty task table: " + path);
    return tasks;
}

void save_tasks(const std::string& path, const std::vector<Task>& tasks) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write task table: " + path);
    char buf[64];
    for (const Task& t : tasks) {
        std::snprintf(buf, sizeof buf, "%d\t%.17g\n", t.id, t.length);
        out << buf;
    }
}

InitOrder parse_init_order(const std::string& name) {
    if (name == "biggest-first") return InitOrder::BiggestFirst;
    if (name == "smallest-first") return InitOrder::SmallestFirst;
    if (name == "biggest-and-smallest") return InitOrder::BiggestAndSmallest;
    throw input_error("unknown init order: " + name);
}

std::string to_string(InitOrder order) {
    switch (order) {
        case InitOrder::BiggestFirst: return "biggest-first";
        case InitOrder::SmallestFirst: return "smallest-first";
        case InitOrder::BiggestAndSmallest: return "biggest-and-smallest";
    }
    return "?";
}

std::vector<int> init_positions(InitOrder order, int n, int count) {
    if (n <= 0) throw input_error("init_positions: empty table");
    if (count < 0 || count > n)
        throw input_error("init_positions: count out of range");

    std::vector<int> pos;
    pos.reserve(count);
    switch (order) {
        case InitOrder::BiggestFirst:
            for (int i = 0; i < count; ++i) pos.push_back(i);
            break;
        case InitOrder::SmallestFirst:
            for (int i = 0; i < count; ++i) pos.push_back(n - 1 - i);
            break;
        case InitOrder::BiggestAndSmallest: {
            int head = count / 2;
            for (int i = 0; i < head; ++i) pos.push_back(i);
            for (int i = 0; static_cast<int>(pos.size()) < count; ++i)
                pos.push_back(n - 1 - i);
            break;
        }
    }
    return pos;
}

} // namespace memsched
