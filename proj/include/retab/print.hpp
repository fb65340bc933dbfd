#pragma once

#include <string>

#include "retab/expr.hpp"

namespace retab {

// Deterministic prefix form with variable names verbatim. This is the total
// lexical order used for sorting commutative argument lists and for cache
// keys; it is not meant to be re-parsed.
std::string print_prefix(const Expr& e);

// Surface-syntax form (infix, parenthesised as needed). Valid model-language
// text for anything the parser can produce; table constraints print as
// table([vars...], tN).
std::string print_infix(const Expr& e);

} // namespace retab
