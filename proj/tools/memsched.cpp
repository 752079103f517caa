// memsched: memory-aware scheduling toolkit.
//
// Subcommands: static-opt, simulate, dynamic, ablation, predict, calibrate,
// table1, plotdata. A JSON config file (--config) supplies defaults for any
// long option; explicit flags win. MEMSCHED_SEED is the seed fallback.
// Exit codes: 0 success, 1 validation error, 2 built-in result check failed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memsched/cli_report.hpp"
#include "memsched/dyn_scheduler.hpp"
#include "memsched/errors.hpp"
#include "memsched/prior_predictor.hpp"
#include "memsched/simulator.hpp"
#include "memsched/static_opt.hpp"
#include "memsched/workload.hpp"

namespace {

using namespace memsched;

std::uint64_t env_seed_default() {
    if (const char* env = std::getenv("MEMSCHED_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw input_error("MEMSCHED_SEED is not an integer");
        }
    }
    return 0;
}

// Applies --config JSON values as option defaults before parsing argv, so
// precedence is: explicit flag > config file > MEMSCHED_SEED/env > built-in.
void apply_config_defaults(CLI::App& app, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw input_error("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        for (CLI::App* sub : app.get_subcommands({})) {
            CLI::Option* opt = sub->get_option_no_throw("--" + key);
            if (!opt) continue;
            std::string text = value.is_string()
                                   ? value.get<std::string>()
                                   : value.dump();
            // write the default through to the bound variable at parse end
            opt->run_callback_for_default();
            opt->default_val(text);
        }
    }
}

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> ks;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto dash = part.find('-');
        if (dash != std::string::npos && dash > 0) {
            int lo = std::stoi(part.substr(0, dash));
            int hi = std::stoi(part.substr(dash + 1));
            if (hi < lo) throw input_error("bad K range: " + part);
            for (int k = lo; k <= hi; ++k) ks.push_back(k);
        } else {
            ks.push_back(std::stoi(part));
        }
    }
    if (ks.empty()) throw input_error("empty K list");
    for (int k : ks)
        if (k < 1) throw input_error("K must be >= 1");
    return ks;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
    if (out.empty()) throw input_error("empty list");
    return out;
}

std::vector<Task> load_table_or_default(const std::string& path) {
    return path.empty() ? default_tasks() : load_tasks(path);
}

BeagleFeatures parse_features(const std::string& text) {
    static const std::map<std::string, double BeagleFeatures::*> fields = {
        {"Thr", &BeagleFeatures::threads},
        {"Burn", &BeagleFeatures::burnin},
        {"Iter", &BeagleFeatures::iterations},
        {"Win", &BeagleFeatures::window},
        {"V", &BeagleFeatures::variants},
        {"S", &BeagleFeatures::samples},
        {"V_ref", &BeagleFeatures::ref_variants},
        {"S_ref", &BeagleFeatures::ref_samples},
    };
    BeagleFeatures x;
    std::stringstream ss(text);
    std::string part;
    std::map<std::string, bool> seen;
    while (std::getline(ss, part, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos)
            throw input_error("features: expected name=value, got '" + part +
                              "'");
        std::string name = part.substr(0, eq);
        auto it = fields.find(name);
        if (it == fields.end())
            throw input_error("features: unknown feature '" + name + "'");
        x.*(it->second) = std::stod(part.substr(eq + 1));
        seen[name] = true;
    }
    if (seen.size() != fields.size())
        throw input_error("features: all of Thr,Burn,Iter,Win,V,S,V_ref,S_ref "
                          "are required");
    return x;
}

std::map<int, double> load_priors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open priors: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("priors: ") + e.what());
    }
    if (!j.is_object()) throw input_error("priors: expected {\"id\": mb, ...}");
    std::map<int, double> priors;
    for (const auto& [key, value] : j.items()) {
        try {
            priors[std::stoi(key)] = value.get<double>();
        } catch (const std::exception&) {
            throw input_error("priors: bad entry '" + key + "'");
        }
    }
    return priors;
}

std::vector<std::pair<double, double>> load_pairs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open pairs: " + path);
    std::vector<std::pair<double, double>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b))
            throw input_error("pairs: bad line " + std::to_string(lineno));
        try {
            pairs.emplace_back(std::stod(a), std::stod(b));
        } catch (const std::exception&) {
            if (lineno == 1) continue; // header row
            throw input_error("pairs: bad numbers on line " +
                              std::to_string(lineno));
        }
    }
    return pairs;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memory-aware scheduling toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON file with default values for any long option");

    std::uint64_t seed = 0;

    // static-opt ------------------------------------------------------------
    auto* sc_static = app.add_subcommand(
        "static-opt", "hill-climb task orders minimizing peak memory");
    std::string so_k = "2-10", so_table, so_out = "orders.json";
    HillClimbConfig so_cfg;
    sc_static->add_option("--k", so_k, "K values, e.g. 4 or 2-10 or 2,4,8");
    sc_static->add_option("--iters", so_cfg.iterations, "iterations per restart");
    sc_static->add_option("--swaps", so_cfg.max_swaps, "max swaps per proposal");
    sc_static->add_option("--restarts", so_cfg.restarts, "restart count");
    sc_static->add_option("--seed", seed, "rng seed");
    sc_static->add_option("--eta", so_cfg.eta, "duration units per length");
    sc_static->add_option("--table", so_table, "task table file (default: built-in)");
    sc_static->add_option("--out", so_out, "output orders JSON");
    int so_jobs = 1;
    sc_static->add_option("--jobs", so_jobs, "worker threads");

    // simulate ---------------------------------------------------------------
    auto* sc_sim = app.add_subcommand(
        "simulate", "list-schedule one order and export the memory trace");
    std::string sim_table, sim_order, sim_trace = "trace.csv",
                sim_summary = "summary.json";
    int sim_k = 2;
    double sim_eta = 1.0;
    sc_sim->add_option("--table", sim_table, "task table file (default: built-in)");
    sc_sim->add_option("--order", sim_order,
                       "comma-separated 1-based ids (default: identity)");
    sc_sim->add_option("--k", sim_k, "concurrency budget");
    sc_sim->add_option("--eta", sim_eta, "duration units per length");
    sc_sim->add_option("--trace", sim_trace, "output trace CSV");
    sc_sim->add_option("--summary", sim_summary, "output summary JSON");

    // dynamic ----------------------------------------------------------------
    auto* sc_dyn = app.add_subcommand(
        "dynamic", "run the dynamic scheduler across seeds");
    SimEnvConfig dyn_env;
    std::string dyn_packer = "knapsack", dyn_bias = "on",
                dyn_init = "smallest-first", dyn_priors,
                dyn_out = "metrics.csv";
    int dyn_seeds = 1, dyn_jobs = 1, dyn_init_count = 2;
    PredictorParams dyn_pred;
    sc_dyn->add_option("--size-pct", dyn_env.size_pct,
                       "task-1 RAM as % of total");
    sc_dyn->add_option("--n", dyn_env.n, "task count");
    sc_dyn->add_option("--total-ram", dyn_env.total_ram, "capacity in MB");
    sc_dyn->add_option("--beta-ram", dyn_env.beta_ram, "RAM noise amplitude");
    sc_dyn->add_option("--beta-dur", dyn_env.beta_dur, "duration noise amplitude");
    sc_dyn->add_option("--packer", dyn_packer, "knapsack|greedy");
    sc_dyn->add_option("--bias", dyn_bias, "on|off");
    sc_dyn->add_option("--init", dyn_init,
                       "biggest-first|smallest-first|biggest-and-smallest");
    sc_dyn->add_option("--init-count", dyn_init_count, "warm-up task count");
    sc_dyn->add_option("--priors", dyn_priors, "JSON file: {\"id\": mb}");
    sc_dyn->add_option("--seed", seed, "base seed");
    sc_dyn->add_option("--seeds", dyn_seeds, "number of seeds");
    sc_dyn->add_option("--degree", dyn_pred.degree, "predictor degree");
    sc_dyn->add_option("--jobs", dyn_jobs, "worker threads");
    sc_dyn->add_option("--out", dyn_out, "output metrics CSV");

    // ablation ---------------------------------------------------------------
    auto* sc_abl = app.add_subcommand(
        "ablation", "policy panels x sizes x seeds, aggregated");
    SimEnvConfig abl_env;
    std::string abl_sizes = "10,20,30,40,50", abl_out = "ablation.csv";
    int abl_seeds = 20, abl_jobs = 1;
    PredictorParams abl_pred;
    sc_abl->add_option("--sizes", abl_sizes, "size_pct grid");
    sc_abl->add_option("--n", abl_env.n, "task count");
    sc_abl->add_option("--total-ram", abl_env.total_ram, "capacity in MB");
    sc_abl->add_option("--beta-ram", abl_env.beta_ram, "RAM noise amplitude");
    sc_abl->add_option("--beta-dur", abl_env.beta_dur, "duration noise amplitude");
    sc_abl->add_option("--seed", seed, "base seed");
    sc_abl->add_option("--seeds", abl_seeds, "seeds per cell");
    sc_abl->add_option("--jobs", abl_jobs, "worker threads");
    sc_abl->add_option("--out", abl_out, "output CSV");

    // predict ----------------------------------------------------------------
    auto* sc_pred = app.add_subcommand(
        "predict", "conservative RAM prior from a formula file");
    std::string pr_formula, pr_features;
    sc_pred->add_option("--formula", pr_formula, "formula JSON")->required();
    sc_pred
        ->add_option("--features", pr_features,
                     "\"Thr=4,Burn=3,Iter=12,Win=40,V=1e6,S=2e3,V_ref=1e6,"
                     "S_ref=1e4\"")
        ->required();

    // calibrate ----------------------------------------------------------------
    auto* sc_cal = app.add_subcommand(
        "calibrate", "fit the conformal adjustment from (predicted, actual) pairs");
    std::string cal_pairs, cal_formula, cal_out = "formula.json";
    double cal_alpha = 0.2;
    sc_cal->add_option("--pairs", cal_pairs, "CSV with predicted,actual")
        ->required();
    sc_cal->add_option("--alpha", cal_alpha, "miscoverage rate");
    sc_cal->add_option("--formula", cal_formula,
                       "existing formula JSON to recalibrate");
    sc_cal->add_option("--out", cal_out, "output formula JSON");

    // table1 -------------------------------------------------------------------
    auto* sc_t1 = app.add_subcommand(
        "table1", "sequential vs optimized peak for K=2..10");
    std::string t1_table, t1_out = "table1.csv";
    HillClimbConfig t1_cfg;
    int t1_jobs = 1;
    sc_t1->add_option("--table", t1_table, "task table file (default: built-in)");
    sc_t1->add_option("--iters", t1_cfg.iterations, "iterations per restart");
    sc_t1->add_option("--swaps", t1_cfg.max_swaps, "max swaps per proposal");
    sc_t1->add_option("--restarts", t1_cfg.restarts, "restart count");
    sc_t1->add_option("--seed", seed, "rng seed");
    sc_t1->add_option("--jobs", t1_jobs, "worker threads");
    sc_t1->add_option("--out", t1_out, "output CSV");

    // plotdata -------------------------------------------------------------------
    auto* sc_plot = app.add_subcommand(
        "plotdata", "convert a results CSV into {series: [{label,x,y}]} JSON");
    std::string plot_in, plot_out = "plot.json";
    sc_plot->add_option("--in", plot_in, "input CSV")->required();
    sc_plot->add_option("--out", plot_out, "output JSON");

    // lets --config appear after the subcommand name as well as before it
    for (CLI::App* sc : {sc_static, sc_sim, sc_dyn, sc_abl, sc_pred, sc_cal,
                         sc_t1, sc_plot})
        sc->fallthrough();

    try {
        // precedence: flag > config > env > built-in. The env fallback is
        // read first; config application writes straight through the bound
        // variables; parse overwrites with explicit flags last.
        seed = env_seed_default();
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config")
                apply_config_defaults(app, argv[i + 1]);
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*sc_static) {
            std::vector<Task> table = load_table_or_default(so_table);
            so_cfg.seed = seed;
            std::vector<int> ks = parse_k_list(so_k);
            std::vector<Table1Row> rows(ks.size());
            std::vector<std::vector<int>> orders(ks.size());
            std::vector<int> identity =
                identity_order(static_cast<int>(table.size()));
            parallel_for(static_cast<int>(ks.size()), so_jobs, [&](int i) {
                HillClimbConfig cfg = so_cfg;
                cfg.machines = ks[i];
                double seq = peak_memory(table, identity, cfg.machines, cfg.eta);
                HillClimbResult best = hill_climb(table, identity, cfg);
                rows[i] = {cfg.machines, seq, best.peak,
                           100.0 * (seq - best.peak) / seq};
                orders[i] = best.order;
            });
            std::ostringstream cfgline;
            cfgline << "memsched static-opt k=" << so_k
                    << " iters=" << so_cfg.iterations
                    << " swaps=" << so_cfg.max_swaps
                    << " restarts=" << so_cfg.restarts << " seed=" << seed
                    << " eta=" << so_cfg.eta
                    << " table=" << (so_table.empty() ? "builtin" : so_table);
            write_orders_json(so_out, rows, orders, cfgline.str());
            std::cout << "wrote " << so_out << "\n";
        } else if (*sc_sim) {
            std::vector<Task> table = load_table_or_default(sim_table);
            std::vector<int> order;
            if (sim_order.empty()) {
                order = identity_order(static_cast<int>(table.size()));
            } else {
                for (double v : parse_double_list(sim_order))
                    order.push_back(static_cast<int>(v) - 1);
            }
            ScheduleTrace trace = list_schedule(table, order, sim_k, sim_eta);
            std::ostringstream cfgline;
            cfgline << "memsched simulate k=" << sim_k << " eta=" << sim_eta
                    << " order="
                    << (sim_order.empty() ? "identity" : sim_order)
                    << " table=" << (sim_table.empty() ? "builtin" : sim_table);
            write_trace_csv(sim_trace, trace, cfgline.str());
            write_summary_json(sim_summary, trace, cfgline.str());
            std::cout << "peak=" << trace.peak << " makespan=" << trace.makespan
                      << "\n";
        } else if (*sc_dyn) {
            SchedulerPolicy policy;
            policy.packer = parse_packer(dyn_packer);
            if (dyn_bias != "on" && dyn_bias != "off")
                throw input_error("--bias must be on|off");
            policy.use_bias = dyn_bias == "on";
            policy.init = parse_init_order(dyn_init);
            policy.init_count = dyn_init_count;
            if (!dyn_priors.empty()) policy.priors = load_priors(dyn_priors);

            std::vector<MetricsRow> rows = run_dynamic_sweep(
                dyn_env, policy, dyn_pred, seed, dyn_seeds, dyn_jobs);
            std::ostringstream cfgline;
            cfgline << "memsched dynamic size_pct=" << dyn_env.size_pct
                    << " n=" << dyn_env.n << " total_ram=" << dyn_env.total_ram
                    << " beta_ram=" << dyn_env.beta_ram
                    << " beta_dur=" << dyn_env.beta_dur
                    << " policy=" << policy_name(policy) << " seed=" << seed
                    << " seeds=" << dyn_seeds
                    << " degree=" << dyn_pred.degree;
            write_metrics_csv(dyn_out, rows, cfgline.str());
            std::cout << "wrote " << dyn_out << "\n";
        } else if (*sc_abl) {
            std::vector<AblationRow> rows =
                run_ablation(abl_env, abl_pred, parse_double_list(abl_sizes),
                             seed, abl_seeds, abl_jobs);
            std::ostringstream cfgline;
            cfgline << "memsched ablation sizes=" << abl_sizes
                    << " n=" << abl_env.n << " total_ram=" << abl_env.total_ram
                    << " beta_ram=" << abl_env.beta_ram
                    << " beta_dur=" << abl_env.beta_dur << " seed=" << seed
                    << " seeds=" << abl_seeds;
            write_ablation_csv(abl_out, rows, cfgline.str());
            std::cout << "wrote " << abl_out << "\n";
        } else if (*sc_pred) {
            Formula formula = Formula::load(pr_formula);
            BeagleFeatures x = parse_features(pr_features);
            std::cout << conservative_prior(formula, x) << "\n";
        } else if (*sc_cal) {
            std::vector<std::pair<double, double>> pairs =
                load_pairs_csv(cal_pairs);
            ConformalMap map = fit_conformal(pairs, cal_alpha);
            Formula formula;
            if (!cal_formula.empty()) {
                formula = Formula::load(cal_formula);
            } else {
                // identity placeholder carrying only the calibration
                formula.expression = "x0";
                formula.constants = {};
                formula.standardizer.sigma_x.fill(1.0);
                formula.standardizer.sigma_y = 1.0;
                formula.parsed = parse_expr(formula.expression,
                                            formula.constants);
            }
            formula.conformal = map;
            formula.save(cal_out);
            std::cout << "wrote " << cal_out << " (" << map.knots.size()
                      << " knots)\n";
        } else if (*sc_t1) {
            std::vector<Task> table = load_table_or_default(t1_table);
            t1_cfg.seed = seed;
            std::vector<Table1Row> rows =
                run_table1(table, t1_cfg, 2, 10, t1_jobs);
            std::ostringstream cfgline;
            cfgline << "memsched table1 iters=" << t1_cfg.iterations
                    << " swaps=" << t1_cfg.max_swaps
                    << " restarts=" << t1_cfg.restarts << " seed=" << seed
                    << " table=" << (t1_table.empty() ? "builtin" : t1_table);
            write_table1_csv(t1_out, rows, cfgline.str());
            std::cout << "wrote " << t1_out << "\n";
            for (const Table1Row& r : rows) {
                if (r.decrease_pct < 20.0) {
                    std::cerr << "result check failed: K=" << r.machines
                              << " decrease " << r.decrease_pct << "% < 20%\n";
                    return 2;
                }
            }
        } else if (*sc_plot) {
            std::string json = plotdata_json(read_file(plot_in));
            std::ofstream out(plot_out);
            if (!out) throw input_error("cannot write: " + plot_out);
            out << json << "\n";
            std::cout << "wrote " << plot_out << "\n";
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
