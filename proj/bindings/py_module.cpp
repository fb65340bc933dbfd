#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "retab/pipeline.hpp"
#include "retab/print.hpp"

namespace py = pybind11;
using namespace retab;

namespace {

py::dict report_to_dict(const TabulationReport& r) {
    py::dict d;
    d["heuristic"] = r.heuristic;
    switch (r.kind) {
        case CandidateKind::TopLevel: d["phase"] = "toplevel"; break;
        case CandidateKind::NestedBool: d["phase"] = "nested"; break;
        case CandidateKind::IntegerExpr: d["phase"] = "integer"; break;
    }
    d["outcome"] = tab_status_name(r.outcome);
    d["nodes"] = r.nodes;
    d["tuples"] = r.tuples;
    d["cache_hit"] = r.cache_hit;
    d["table_id"] = r.table_id;
    d["expr"] = r.target;
    return d;
}

py::dict stats_to_dict(const SearchStats& s) {
    py::dict d;
    d["status"] = solve_status_name(s.status);
    d["nodes"] = s.nodes;
    d["solutions"] = s.solutions;
    if (s.best_objective) d["objective"] = *s.best_objective;
    return d;
}

} // namespace

PYBIND11_MODULE(pyretab, m) {
    m.doc() = "constraint model reformulation by automatic tabulation";

    py::class_<Model>(m, "Model")
        .def_property_readonly("variables",
                               [](const Model& mo) {
                                   py::list out;
                                   for (int v = 0; v < mo.store.size(); ++v) {
                                       if (mo.store[v].deleted) continue;
                                       py::dict d;
                                       d["name"] = mo.store[v].name;
                                       d["domain"] = mo.store[v].domain.values();
                                       d["aux"] = mo.store[v].is_aux;
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def_property_readonly("constraints",
                               [](const Model& mo) {
                                   py::list out;
                                   for (const auto& c : mo.constraints)
                                       out.append(print_infix(c));
                                   return out;
                               })
        .def_property_readonly("proven_unsat",
                               [](const Model& mo) { return mo.proven_unsat; })
        .def("__str__", [](const Model& mo) { return render_model(mo); });

    m.def("compile", [](const std::string& model_text, const std::string& param_text) {
        return compile_model(parse_model(model_text),
                             param_text.empty() ? ParamBinding{} : parse_params(param_text));
    }, py::arg("model_text"), py::arg("param_text") = "",
       "Parse, instantiate and filter a model given as text.");

    m.def("tabulate", [](const Model& model, Int node_limit) {
        TabLimits limits;
        limits.node_limit = node_limit;
        TabResult res = tabulate_pass(model, HeuristicConfig{}, limits);
        py::list reports;
        for (const auto& r : res.reports) reports.append(report_to_dict(r));
        py::list tables;
        for (const auto& t : res.tables) tables.append(dump_table(*t));
        py::dict out;
        out["model"] = res.model;
        out["reports"] = reports;
        out["tables"] = tables;
        return out;
    }, py::arg("model"), py::arg("node_limit") = 100000,
       "Run the tabulation pass; returns the rewritten model, the per-candidate "
       "reports and the table dumps.");

    m.def("solve", [](const Model& model, const std::string& mode, Int node_budget,
                      bool collect_solutions) {
        SolveOptions opts;
        if (mode == "all")
            opts.mode = SolveMode::AllSolutions;
        else if (mode == "optimize" || (mode == "auto" && model.objective))
            opts.mode = SolveMode::Optimize;
        else
            opts.mode = SolveMode::FirstSolution;
        if (node_budget > 0) opts.node_budget = node_budget;
        py::list solutions;
        if (collect_solutions) {
            opts.on_solution = [&](const std::vector<Int>& values) {
                py::dict sol;
                for (int v = 0; v < model.store.size(); ++v)
                    if (!model.store[v].is_aux)
                        sol[py::str(model.store[v].name)] = values[v];
                solutions.append(sol);
            };
        }
        SearchStats stats = solve(model, opts);
        py::dict out = stats_to_dict(stats);
        if (collect_solutions) out["solution_list"] = solutions;
        return out;
    }, py::arg("model"), py::arg("mode") = "auto", py::arg("node_budget") = 0,
       py::arg("collect_solutions") = false);
}
