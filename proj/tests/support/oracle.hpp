#pragma once

#include <random>
#include <vector>

#include "retab/eval.hpp"
#include "retab/expr.hpp"
#include "retab/simplify.hpp"

namespace retab::testutil {

// All solutions of m by plain backtracking: assign variables in declaration
// order, evaluate each constraint as soon as its scope is fully assigned.
// Independent of the solver's propagation machinery. Deleted (assigned)
// variables are re-attached at their recorded values.
std::vector<std::vector<Int>> enumerate_solutions(const Model& m,
                                                  std::size_t cap = 50'000'000);

std::vector<Int> project(const std::vector<Int>& values, const std::vector<int>& vars);

// values of non-auxiliary variables, for comparing tabulated models against
// their originals
std::vector<int> original_vars(const Model& m);

// knight's move between two location variables on an n x n board, built by
// hand (location = n*x + y)
Expr knight_move(int var_a, const std::string& name_a, int var_b,
                 const std::string& name_b, Int n);

// small random expressions for property tests
class ExprGen {
public:
    ExprGen(unsigned seed, const VarStore& store, std::vector<int> vars)
        : rng_(seed), store_(store), vars_(std::move(vars)) {}

    Expr random_bool(int depth);
    Expr random_int(int depth);

private:
    Int pick(Int lo, Int hi) {
        return std::uniform_int_distribution<Int>(lo, hi)(rng_);
    }
    std::mt19937 rng_;
    const VarStore& store_;
    std::vector<int> vars_;
};

// brute-force semantic equivalence of two Boolean expressions over the full
// assignment space of their combined scope
bool equivalent(const Expr& a, const Expr& b, const VarStore& store);

} // namespace retab::testutil
