#pragma once

#include <string>
#include <vector>

#include "retab/expr.hpp"

namespace retab {

enum class Strength { Strong, Weak };

enum class Heuristic { IdenticalScopes, DuplicateVariables, LargeAST, WeakPropagation };

enum class CandidateKind { TopLevel, NestedBool, IntegerExpr };

struct HeuristicConfig {
    int max_distinct_vars = 10;
    int large_ast_factor = 5;
};

struct Candidate {
    CandidateKind kind;
    Heuristic heuristic;
    std::vector<int> group;     // TopLevel: indices of the grouped constraints
    int constraint_index = -1;  // NestedBool / IntegerExpr: containing constraint
    std::vector<int> path;      // child path from that constraint to the target
    Expr target;                // node to be replaced (c1 / e1)
    Expr generator;             // Boolean expression to enumerate
    std::vector<int> scope;     // scope of the target
};

std::string heuristic_name(const Candidate& c);

// Recursive syntactic classification of how strongly a reference solver
// would propagate e. Integer-typed expressions are classified as a = e for
// a fresh variable, which reduces to the classification of e itself.
Strength gac_estimate(const Expr& e, const VarStore& store);

// Top-level scan: IdenticalScopes groups constraints with equal variable
// sets; ungrouped constraints report the first of DuplicateVariables,
// LargeAST, WeakPropagation that fires. Deterministic model order.
std::vector<Candidate> scan_top_level(const Model& m, const HeuristicConfig& cfg);

// Nested-Boolean scan, parents before children, descending past a node only
// when it produced no candidate. Assumes candidates tabulate successfully;
// the pass re-walks subtrees of failed candidates itself.
std::vector<Candidate> scan_nested_bool(const Model& m, const HeuristicConfig& cfg);

// Integer-expression scan over expressions that general flattening would
// extract. Repeated identical expressions after the first produce no
// further candidate (the pass replaces them from the auxiliary cache).
std::vector<Candidate> scan_integer_exprs(const Model& m, const HeuristicConfig& cfg);

// Values e attains over all total assignments of its scope when that space
// is at most space_limit; otherwise the interval from interval arithmetic.
Domain aux_domain(const Expr& e, const VarStore& store, Int space_limit);

// ---- helpers shared with the tabulation pass ----

bool considered_for_flattening(const Expr& e, const Expr& parent, bool parent_is_root);

// First of DuplicateVariables / LargeAST / WeakPropagation firing for a
// top-level constraint (IdenticalScopes grouping is the caller's job).
bool top_level_trigger(const Expr& c, const Model& m, const HeuristicConfig& cfg,
                       int self_index, Heuristic& out);

// First heuristic firing for nested Boolean node c1 inside constraint ci.
bool nested_trigger(const Expr& c1, const Model& m, const HeuristicConfig& cfg,
                    int containing_index, Heuristic& out,
                    std::vector<Expr>& same_scope_ctrs);

bool integer_trigger(const Expr& e1, const Expr& containing, const Model& m,
                     const HeuristicConfig& cfg, int containing_index,
                     Heuristic& out, std::vector<Expr>& same_scope_ctrs);

} // namespace retab
