#pragma once

#include <string>

#include "retab/instantiate.hpp"
#include "retab/solver.hpp"
#include "retab/tabulate.hpp"

namespace retab {

ModelSource load_model_file(const std::string& path);
ParamBinding load_param_file(const std::string& path);  // "" -> empty binding

// instantiate + filter
Model compile_model(const ModelSource& src, const ParamBinding& binding);

// line-oriented flat-model text: variables with domains, assigned variables,
// constraints, objective
std::string render_model(const Model& m);

// one line: name=value pairs in declaration order over the original
// (non-auxiliary) variables, deleted assigned ones re-attached
std::string render_solution(const Model& m, const std::vector<Int>& values);

std::string render_report(const std::vector<TabulationReport>& reports);
std::string render_stats(const SearchStats& stats);

} // namespace retab
