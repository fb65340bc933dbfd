#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "retab/domain.hpp"

namespace retab {

struct Table;
using TablePtr = std::shared_ptr<const Table>;

enum class Kind {
    // core expression forms
    Const,      // integer or Boolean literal (bool_typed distinguishes)
    Var,        // reference to a decision variable
    Sum,        // coeffs[i] * children[i] + offset
    Product,
    Div,        // integer division, truncating toward zero
    Mod,        // a - (a/b)*b
    Abs,
    Neg,
    Eq, Neq, Lt, Leq, Gt, Geq,
    Not, And, Or, Implies, Iff,
    AllDiff,
    Element,    // children = entries..., index last
    InSet,      // children[0] in set (sorted constant values)
    TableCtr,   // extensional constraint over table->scope
    // template-only forms, eliminated by instantiation
    Ident,
    MatrixAccess,   // name + index expressions
    ForAll, Exists, // gens + children[0] = body
    Comprehension,  // gens + children[0] = element template
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

// Quantifier / comprehension generator: idx ranges over [lo..hi].
struct Generator {
    std::string index;
    Expr lo, hi;
};

struct ExprNode {
    Kind kind;
    bool bool_typed = false;

    Int value = 0;                  // Const
    int var = -1;                   // Var: id in the VarStore
    std::string name;               // Var / Ident / MatrixAccess
    std::vector<Expr> children;
    std::vector<Int> coeffs;        // Sum, parallel to children
    Int offset = 0;                 // Sum
    std::vector<Int> set;           // InSet, sorted ascending
    TablePtr table;                 // TableCtr
    std::vector<Generator> gens;    // ForAll / Exists / Comprehension
};

bool structurally_equal(const Expr& a, const Expr& b);

// Node builders. All enforce child types and fold nothing.
namespace mk {

Expr int_const(Int v);
Expr bool_const(bool v);
Expr var(int id, std::string name, bool is_bool = false);
Expr sum(std::vector<Expr> children, std::vector<Int> coeffs, Int offset);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr scaled(Int coeff, Expr e);
Expr product(std::vector<Expr> children);
Expr div(Expr a, Expr b);
Expr mod(Expr a, Expr b);
Expr abs(Expr e);
Expr neg(Expr e);
Expr rel(Kind k, Expr a, Expr b);
Expr not_(Expr e);
Expr and_(std::vector<Expr> children);
Expr or_(std::vector<Expr> children);
Expr implies(Expr a, Expr b);
Expr iff(Expr a, Expr b);
Expr all_diff(std::vector<Expr> children);
Expr element(std::vector<Expr> entries, Expr index);
Expr in_set(Expr e, std::vector<Int> values);
Expr table_ctr(TablePtr table);

Expr ident(std::string name);
Expr matrix_access(std::string name, std::vector<Expr> indices);
Expr quantifier(Kind k, std::vector<Generator> gens, Expr body);
Expr comprehension(std::vector<Generator> gens, Expr elem);

} // namespace mk

// Declared decision variable (or deleted placeholder kept for stable ids).
struct Var {
    std::string name;
    Domain domain;
    bool is_bool = false;
    bool deleted = false;   // assigned and removed from the model
    bool is_aux = false;    // introduced by tabulation
};

struct VarStore {
    std::vector<Var> vars;

    int add(std::string name, Domain domain, bool is_bool = false);
    const Var& operator[](int id) const { return vars.at(id); }
    Var& operator[](int id) { return vars.at(id); }
    int size() const { return static_cast<int>(vars.size()); }
};

enum class Objective { None, Minimize, Maximize };

// Flat model: scalar variables, top-level conjunction, optional objective.
struct Model {
    VarStore store;
    std::vector<Expr> constraints;
    Objective objective_sense = Objective::None;
    Expr objective;                         // integer expression, when present
    std::vector<std::pair<int, Int>> assigned_deleted;  // (var, value)
    bool proven_unsat = false;

    std::vector<int> active_vars() const;
};

} // namespace retab
