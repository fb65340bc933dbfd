#pragma once

#include <optional>
#include <vector>

#include "retab/expr.hpp"

namespace retab {

// Total-assignment evaluator. values[id] is the value of variable id; every
// variable occurring in e must be covered. Integer evaluation returns nullopt
// on a definedness fault (division or modulo by zero, element index out of
// bounds); Boolean evaluation turns a fault in a direct integer operand into
// false at that relational node.
std::optional<Int> eval_int(const Expr& e, const std::vector<Int>& values);
bool eval_bool(const Expr& e, const std::vector<Int>& values);

// True when no assignment can make e fault: e contains no Div/Mod with a
// possibly-zero denominator and no Element with a possibly-out-of-range index.
bool always_defined(const Expr& e);

struct Interval {
    Int lo, hi;
    Int width() const { return hi - lo; }
};

// Conservative interval for the values e can take, given current domains.
// Boolean-typed expressions yield [0,1].
Interval value_interval(const Expr& e, const VarStore& store);

} // namespace retab
