#include "retab/expr.hpp"

#include <cassert>
#include <stdexcept>

#include "retab/table.hpp"

namespace retab {

static Expr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->bool_typed != b->bool_typed) return false;
    if (a->value != b->value || a->var != b->var || a->name != b->name) return false;
    if (a->offset != b->offset || a->coeffs != b->coeffs || a->set != b->set) return false;
    if (a->table.get() != b->table.get()) return false;
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!structurally_equal(a->children[i], b->children[i])) return false;
    if (a->gens.size() != b->gens.size()) return false;
    for (std::size_t i = 0; i < a->gens.size(); ++i) {
        if (a->gens[i].index != b->gens[i].index) return false;
        if (!structurally_equal(a->gens[i].lo, b->gens[i].lo)) return false;
        if (!structurally_equal(a->gens[i].hi, b->gens[i].hi)) return false;
    }
    return true;
}

namespace mk {

Expr int_const(Int v) {
    ExprNode n{Kind::Const};
    n.value = v;
    return make(std::move(n));
}

Expr bool_const(bool v) {
    ExprNode n{Kind::Const};
    n.value = v ? 1 : 0;
    n.bool_typed = true;
    return make(std::move(n));
}

Expr var(int id, std::string name, bool is_bool) {
    ExprNode n{Kind::Var};
    n.var = id;
    n.name = std::move(name);
    n.bool_typed = is_bool;
    return make(std::move(n));
}

Expr sum(std::vector<Expr> children, std::vector<Int> coeffs, Int offset) {
    assert(children.size() == coeffs.size());
    ExprNode n{Kind::Sum};
    n.children = std::move(children);
    n.coeffs = std::move(coeffs);
    n.offset = offset;
    return make(std::move(n));
}

Expr add(Expr a, Expr b) { return sum({std::move(a), std::move(b)}, {1, 1}, 0); }
Expr sub(Expr a, Expr b) { return sum({std::move(a), std::move(b)}, {1, -1}, 0); }
Expr scaled(Int coeff, Expr e) { return sum({std::move(e)}, {coeff}, 0); }

Expr product(std::vector<Expr> children) {
    ExprNode n{Kind::Product};
    n.children = std::move(children);
    return make(std::move(n));
}

static Expr binary(Kind k, Expr a, Expr b, bool bool_typed) {
    ExprNode n{k};
    n.bool_typed = bool_typed;
    n.children = {std::move(a), std::move(b)};
    return make(std::move(n));
}

Expr div(Expr a, Expr b) { return binary(Kind::Div, std::move(a), std::move(b), false); }
Expr mod(Expr a, Expr b) { return binary(Kind::Mod, std::move(a), std::move(b), false); }

Expr abs(Expr e) {
    ExprNode n{Kind::Abs};
    n.children = {std::move(e)};
    return make(std::move(n));
}

Expr neg(Expr e) {
    ExprNode n{Kind::Neg};
    n.children = {std::move(e)};
    return make(std::move(n));
}

Expr rel(Kind k, Expr a, Expr b) {
    assert(k == Kind::Eq || k == Kind::Neq || k == Kind::Lt || k == Kind::Leq ||
           k == Kind::Gt || k == Kind::Geq);
    return binary(k, std::move(a), std::move(b), true);
}

Expr not_(Expr e) {
    ExprNode n{Kind::Not};
    n.bool_typed = true;
    n.children = {std::move(e)};
    return make(std::move(n));
}

Expr and_(std::vector<Expr> children) {
    ExprNode n{Kind::And};
    n.bool_typed = true;
    n.children = std::move(children);
    return make(std::move(n));
}

Expr or_(std::vector<Expr> children) {
    ExprNode n{Kind::Or};
    n.bool_typed = true;
    n.children = std::move(children);
    return make(std::move(n));
}

Expr implies(Expr a, Expr b) { return binary(Kind::Implies, std::move(a), std::move(b), true); }
Expr iff(Expr a, Expr b) { return binary(Kind::Iff, std::move(a), std::move(b), true); }

Expr all_diff(std::vector<Expr> children) {
    ExprNode n{Kind::AllDiff};
    n.bool_typed = true;
    n.children = std::move(children);
    return make(std::move(n));
}

Expr element(std::vector<Expr> entries, Expr index) {
    ExprNode n{Kind::Element};
    n.children = std::move(entries);
    n.children.push_back(std::move(index));
    return make(std::move(n));
}

Expr in_set(Expr e, std::vector<Int> values) {
    ExprNode n{Kind::InSet};
    n.bool_typed = true;
    n.children = {std::move(e)};
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    n.set = std::move(values);
    return make(std::move(n));
}

Expr table_ctr(TablePtr table) {
    ExprNode n{Kind::TableCtr};
    n.bool_typed = true;
    n.table = std::move(table);
    return make(std::move(n));
}

Expr ident(std::string name) {
    ExprNode n{Kind::Ident};
    n.name = std::move(name);
    return make(std::move(n));
}

Expr matrix_access(std::string name, std::vector<Expr> indices) {
    ExprNode n{Kind::MatrixAccess};
    n.name = std::move(name);
    n.children = std::move(indices);
    return make(std::move(n));
}

Expr quantifier(Kind k, std::vector<Generator> gens, Expr body) {
    assert(k == Kind::ForAll || k == Kind::Exists);
    ExprNode n{k};
    n.bool_typed = true;
    n.gens = std::move(gens);
    n.children = {std::move(body)};
    return make(std::move(n));
}

Expr comprehension(std::vector<Generator> gens, Expr elem) {
    ExprNode n{Kind::Comprehension};
    n.gens = std::move(gens);
    n.children = {std::move(elem)};
    return make(std::move(n));
}

} // namespace mk

int VarStore::add(std::string name, Domain domain, bool is_bool) {
    for (const auto& v : vars)
        if (!v.deleted && v.name == name)
            throw std::runtime_error("duplicate variable name: " + name);
    Var v;
    v.name = std::move(name);
    v.domain = std::move(domain);
    v.is_bool = is_bool;
    vars.push_back(std::move(v));
    return static_cast<int>(vars.size()) - 1;
}

std::vector<int> Model::active_vars() const {
    std::vector<int> out;
    for (int i = 0; i < store.size(); ++i)
        if (!store[i].deleted) out.push_back(i);
    return out;
}

} // namespace retab
