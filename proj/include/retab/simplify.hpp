#pragma once

#include <map>
#include <vector>

#include "retab/expr.hpp"

namespace retab {

using Assignment = std::map<int, Int>;  // var id -> value

// Partial evaluation and normal-form maintenance: substitutes the assignment,
// folds fully-determined subterms, pushes negation to the leaves (rewriting
// negated relations), removes double negation, flattens And/Or/Sum/Product,
// and combines like Sum terms. A fault (denominator zero, index out of range)
// under the assignment falsifies the nearest enclosing Boolean node.
Expr simplify(const Expr& e, const Assignment& assignment = {});

// Fixpoint of simplify plus canonical sorting of commutative argument lists
// (And, Or, Iff, Eq, Neq, AllDiff, Sum, Product and InSet sets) by the
// print_prefix order. Idempotent.
Expr normalize(const Expr& e);

// Depth-first, left-first variable occurrence order, duplicates removed
// keeping the first occurrence.
std::vector<int> scope_of(const Expr& e);

// Total AST node count: one per operator, constant and variable reference;
// a Sum counts one node per child plus one for a nonzero constant offset.
long count_nodes(const Expr& e);

// Occurrence count per variable over all leaves.
std::map<int, long> count_occurrences(const Expr& e);

bool contains_subexpr(const Expr& haystack, const Expr& needle);

} // namespace retab
