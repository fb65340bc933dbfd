#pragma once

#include <functional>
#include <optional>

#include "retab/table.hpp"

namespace retab {

enum class SolveMode { FirstSolution, AllSolutions, Optimize };

enum class SolveStatus { Sat, Unsat, AllSolutions, OptimalFound, NodeBudgetExhausted };

const char* solve_status_name(SolveStatus s);

struct SearchStats {
    Int nodes = 0;          // branching decisions
    Int solutions = 0;
    SolveStatus status = SolveStatus::Unsat;
    std::optional<Int> best_objective;
};

struct SolveOptions {
    SolveMode mode = SolveMode::FirstSolution;
    std::optional<Int> node_budget;
    // nonzero: randomize propagator scheduling (fixpoint confluence checks)
    unsigned shuffle_seed = 0;
    // called with a value per store variable, deleted ones included
    std::function<void(const std::vector<Int>&)> on_solution;
};

// Full GAC on one table constraint: keeps value a of scope variable v iff
// some tuple consistent with all current domains assigns v -> a. Returns
// false on wipeout. Domains vector is indexed by variable id.
bool propagate_table(const Table& t, std::vector<Domain>& domains);

// Static variable order (declaration order), ascending values, d-way
// branching, propagation to fixpoint after each decision. Optimize runs
// branch-and-bound with a strict improvement bound.
SearchStats solve(const Model& m, const SolveOptions& opts = {});

// True iff every constraint of m evaluates true under the assignment.
bool verify_solution(const Model& m, const std::vector<Int>& values);

} // namespace retab
