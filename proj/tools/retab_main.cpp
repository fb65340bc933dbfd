#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "retab/pipeline.hpp"
#include "retab/print.hpp"

using namespace retab;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void write_stats_file(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    std::ofstream out(path);
    out << text;
}

struct CompiledInstance {
    Model model;                 // after optional tabulation
    Model baseline;              // before tabulation
    std::vector<TabulationReport> reports;
    std::vector<TablePtr> tables;
    double compile_ms = 0;
};

CompiledInstance compile_instance(const std::string& model_path,
                                  const std::string& param_path, bool tabulate,
                                  Int node_limit) {
    auto t0 = std::chrono::steady_clock::now();
    ModelSource src = load_model_file(model_path);
    ParamBinding binding = load_param_file(param_path);
    CompiledInstance out;
    out.baseline = compile_model(src, binding);
    if (tabulate) {
        TabLimits limits;
        limits.node_limit = node_limit;
        TabResult res = tabulate_pass(out.baseline, HeuristicConfig{}, limits);
        out.model = std::move(res.model);
        out.reports = std::move(res.reports);
        out.tables = std::move(res.tables);
    } else {
        out.model = out.baseline;
    }
    out.compile_ms = ms_since(t0);
    return out;
}

SolveOptions solve_options(const Model& m, bool all_solutions, Int node_budget,
                           unsigned seed) {
    SolveOptions opts;
    if (all_solutions)
        opts.mode = SolveMode::AllSolutions;
    else if (m.objective)
        opts.mode = SolveMode::Optimize;
    else
        opts.mode = SolveMode::FirstSolution;
    if (node_budget > 0) opts.node_budget = node_budget;
    opts.shuffle_seed = seed;
    return opts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint model reformulation by automatic tabulation"};
    app.require_subcommand(1);

    std::string model_path, param_path, stats_path;
    bool tabulate = false, dump_tables = false, all_solutions = false;
    Int node_limit = 100000, node_budget = 0;
    unsigned seed = 0;
    std::vector<std::string> param_paths;

    auto* cmd_compile = app.add_subcommand("compile", "emit the flat model");
    cmd_compile->add_option("model", model_path)->required();
    cmd_compile->add_option("param", param_path);
    cmd_compile->add_flag("--tabulate", tabulate);
    cmd_compile->add_flag("--dump-tables", dump_tables);
    cmd_compile->add_option("--node-limit", node_limit);
    cmd_compile->add_option("--stats", stats_path);

    auto* cmd_solve = app.add_subcommand("solve", "run the backtracking solver");
    cmd_solve->add_option("model", model_path)->required();
    cmd_solve->add_option("param", param_path);
    cmd_solve->add_flag("--tabulate", tabulate);
    cmd_solve->add_option("--node-limit", node_limit);
    cmd_solve->add_flag("--all-solutions", all_solutions);
    cmd_solve->add_option("--node-budget", node_budget);
    cmd_solve->add_option("--seed", seed,
                          "randomize propagator scheduling (test harness)");
    cmd_solve->add_option("--stats", stats_path);

    auto* cmd_compare = app.add_subcommand(
        "compare", "solve with and without tabulation, report quotients");
    cmd_compare->add_option("model", model_path)->required();
    cmd_compare->add_option("params", param_paths);
    cmd_compare->add_option("--node-limit", node_limit);
    cmd_compare->add_flag("--all-solutions", all_solutions);
    cmd_compare->add_option("--node-budget", node_budget);
    cmd_compare->add_option("--stats", stats_path);

    auto* cmd_report = app.add_subcommand("report", "emit tabulation reports");
    cmd_report->add_option("model", model_path)->required();
    cmd_report->add_option("param", param_path);
    cmd_report->add_option("--node-limit", node_limit);
    cmd_report->add_option("--stats", stats_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        std::ostringstream out;
        if (*cmd_compile) {
            auto inst = compile_instance(model_path, param_path, tabulate, node_limit);
            out << render_model(inst.model);
            if (tabulate) out << render_report(inst.reports);
            if (dump_tables)
                for (const auto& t : inst.tables) out << dump_table(*t);
        } else if (*cmd_solve) {
            auto inst = compile_instance(model_path, param_path, tabulate, node_limit);
            SolveOptions opts =
                solve_options(inst.model, all_solutions, node_budget, seed);
            opts.on_solution = [&](const std::vector<Int>& values) {
                out << render_solution(inst.baseline, values) << "\n";
            };
            SearchStats stats = solve(inst.model, opts);
            out << render_stats(stats);
        } else if (*cmd_compare) {
            if (param_paths.empty()) param_paths.push_back("");
            double logsum = 0;
            int n = 0;
            for (const auto& pp : param_paths) {
                auto plain = compile_instance(model_path, pp, false, node_limit);
                auto tabbed = compile_instance(model_path, pp, true, node_limit);
                SolveOptions opts =
                    solve_options(plain.model, all_solutions, node_budget, 0);
                auto t0 = std::chrono::steady_clock::now();
                SearchStats before = solve(plain.model, opts);
                double before_ms = ms_since(t0);
                t0 = std::chrono::steady_clock::now();
                SearchStats after = solve(tabbed.model, opts);
                double after_ms = ms_since(t0);
                double q = static_cast<double>(before.nodes) /
                           static_cast<double>(std::max<Int>(after.nodes, 1));
                logsum += std::log(q);
                ++n;
                out << "instance=" << (pp.empty() ? "-" : pp)
                    << " nodes_before=" << before.nodes << " nodes_after=" << after.nodes
                    << " node_quotient=" << q << " compile_ms_before=" << plain.compile_ms
                    << " compile_ms_after=" << tabbed.compile_ms
                    << " solve_ms_before=" << before_ms << " solve_ms_after=" << after_ms
                    << " status_before=" << solve_status_name(before.status)
                    << " status_after=" << solve_status_name(after.status) << "\n";
            }
            out << "s=" << std::exp(logsum / std::max(n, 1)) << "\n";
        } else if (*cmd_report) {
            auto inst = compile_instance(model_path, param_path, true, node_limit);
            out << render_report(inst.reports);
        }
        std::cout << out.str();
        write_stats_file(stats_path, out.str());
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InstantiateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
