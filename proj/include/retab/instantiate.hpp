#pragma once

#include <stdexcept>

#include "retab/expr.hpp"
#include "retab/parser.hpp"

namespace retab {

struct InstantiateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Substitute parameters, unroll quantifiers and comprehensions, replace
// matrices with scalar variables (non-constant indexing becomes an Element
// over the row-major flattened scalars), simplify and normalize every
// constraint, and split top-level conjunctions.
Model instantiate(const ModelSource& src, const ParamBinding& params);

// Unary-constraint evaluation plus singleton propagation of assignments
// through equality and allDiff, run to fixpoint. Assigned variables are
// substituted out and deleted. A wipeout yields proven_unsat.
Model filter_domains(const Model& m);

} // namespace retab
