#include "retab/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "retab/print.hpp"

namespace retab {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

ModelSource load_model_file(const std::string& path) {
    return parse_model(read_file(path));
}

ParamBinding load_param_file(const std::string& path) {
    if (path.empty()) return {};
    return parse_params(read_file(path));
}

Model compile_model(const ModelSource& src, const ParamBinding& binding) {
    return filter_domains(instantiate(src, binding));
}

std::string render_model(const Model& m) {
    std::ostringstream out;
    if (m.proven_unsat) out << "unsat true\n";
    for (int v = 0; v < m.store.size(); ++v) {
        const Var& var = m.store[v];
        if (var.deleted) continue;
        out << "var " << var.name << " " << var.domain.str() << "\n";
    }
    for (auto& [v, val] : m.assigned_deleted)
        out << "assigned " << m.store[v].name << " " << val << "\n";
    for (const auto& c : m.constraints) out << "constraint " << print_infix(c) << "\n";
    if (m.objective)
        out << (m.objective_sense == Objective::Minimize ? "minimising " : "maximising ")
            << print_infix(m.objective) << "\n";
    return out.str();
}

std::string render_solution(const Model& m, const std::vector<Int>& values) {
    std::ostringstream out;
    bool first = true;
    for (int v = 0; v < m.store.size(); ++v) {
        if (m.store[v].is_aux) continue;
        if (!first) out << " ";
        first = false;
        out << m.store[v].name << "=" << values[v];
    }
    return out.str();
}

std::string render_report(const std::vector<TabulationReport>& reports) {
    std::ostringstream out;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out << "candidate=" << i << " phase=";
        switch (r.kind) {
            case CandidateKind::TopLevel: out << "toplevel"; break;
            case CandidateKind::NestedBool: out << "nested"; break;
            case CandidateKind::IntegerExpr: out << "integer"; break;
        }
        out << " heuristic=" << r.heuristic << " outcome=" << tab_status_name(r.outcome)
            << " nodes=" << r.nodes;
        if (r.tuples >= 0) out << " tuples=" << r.tuples;
        if (r.table_id >= 0) out << " table=t" << r.table_id;
        if (r.outcome == TabOutcome::Status::AbandonedProgress)
            out << " C=" << r.progress_c << " A=" << r.space;
        if (r.outcome == TabOutcome::Status::RejectedNestedSize) out << " A=" << r.space;
        out << " cache=" << (r.cache_hit ? "hit" : "miss");
        out << " expr=\"" << r.target << "\"\n";
    }
    return out.str();
}

std::string render_stats(const SearchStats& stats) {
    std::ostringstream out;
    out << "status=" << solve_status_name(stats.status) << " nodes=" << stats.nodes
        << " solutions=" << stats.solutions;
    if (stats.best_objective) out << " objective=" << *stats.best_objective;
    out << "\n";
    return out.str();
}

} // namespace retab
