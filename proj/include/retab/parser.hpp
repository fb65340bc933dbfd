#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "retab/expr.hpp"

namespace retab {

struct ParseError : std::runtime_error {
    int line, col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at line " + std::to_string(line_) + ":" +
                             std::to_string(col_)),
          line(line_), col(col_) {}
};

struct ParamDecl {
    std::string name;
    Expr range_lo, range_hi;        // null when declared as plain int
};

struct MatrixLit {
    std::vector<int> dims;          // up to 3 dimensions
    std::vector<Int> values;        // row-major
    bool operator==(const MatrixLit&) const = default;
};

struct LettingDecl {
    std::string name;
    Expr value;                     // scalar expression, or
    std::optional<MatrixLit> matrix;
};

struct FindDecl {
    std::string name;
    std::vector<std::pair<Expr, Expr>> index_ranges;  // empty for a scalar
    Expr dom_lo, dom_hi;            // null for bool
    bool is_bool = false;
};

enum class StmtKind { Given, Letting, Find, Constraint, Objective };

// Uninstantiated model description. The order vector records statement order
// for printing and for evaluating declarations in declaration order.
struct ModelSource {
    std::vector<ParamDecl> params;
    std::vector<LettingDecl> lettings;
    std::vector<FindDecl> finds;
    std::vector<Expr> constraint_templates;
    Objective objective_sense = Objective::None;
    Expr objective_template;
    std::vector<std::pair<StmtKind, int>> order;
};

struct ParamBinding {
    std::map<std::string, Int> scalars;
    std::map<std::string, MatrixLit> matrices;
};

ModelSource parse_model(const std::string& text);
ParamBinding parse_params(const std::string& text);

// Surface-syntax text for a parsed model; parse(print(parse(t))) is
// structurally equal to parse(t).
std::string print_model(const ModelSource& src);

bool model_source_equal(const ModelSource& a, const ModelSource& b);

} // namespace retab
