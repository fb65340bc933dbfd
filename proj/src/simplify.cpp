#include "retab/simplify.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "retab/eval.hpp"
#include "retab/print.hpp"
#include "retab/table.hpp"

namespace retab {

namespace {

bool is_const(const Expr& e) { return e->kind == Kind::Const; }
bool is_true(const Expr& e) { return is_const(e) && e->value != 0; }
bool is_false(const Expr& e) { return is_const(e) && e->value == 0; }

// True when e (already simplified) faults under every completion: a literal
// zero denominator or a constant out-of-range element index, anywhere inside
// an integer position.
bool is_undef(const Expr& e) {
    switch (e->kind) {
        case Kind::Div:
        case Kind::Mod:
            if (is_const(e->children[1]) && e->children[1]->value == 0) return true;
            break;
        case Kind::Element: {
            const auto& idx = e->children.back();
            Int n = static_cast<Int>(e->children.size()) - 1;
            if (is_const(idx) && (idx->value < 0 || idx->value >= n)) return true;
            break;
        }
        default:
            break;
    }
    if (e->bool_typed) return false;  // Boolean nodes absorb faults
    for (const auto& c : e->children)
        if (is_undef(c)) return true;
    return false;
}

Expr simp(const Expr& e, const Assignment& asg);

Expr push_not(const Expr& e) {
    switch (e->kind) {
        case Kind::Const: return mk::bool_const(e->value == 0);
        case Kind::Not: return e->children[0];
        case Kind::Eq: return mk::rel(Kind::Neq, e->children[0], e->children[1]);
        case Kind::Neq: return mk::rel(Kind::Eq, e->children[0], e->children[1]);
        case Kind::Lt: return mk::rel(Kind::Leq, e->children[1], e->children[0]);
        case Kind::Leq: return mk::rel(Kind::Lt, e->children[1], e->children[0]);
        case Kind::And: {
            std::vector<Expr> cs;
            cs.reserve(e->children.size());
            for (const auto& c : e->children) cs.push_back(push_not(c));
            return mk::or_(std::move(cs));
        }
        case Kind::Or: {
            std::vector<Expr> cs;
            cs.reserve(e->children.size());
            for (const auto& c : e->children) cs.push_back(push_not(c));
            return mk::and_(std::move(cs));
        }
        case Kind::Implies:
            return mk::and_({e->children[0], push_not(e->children[1])});
        case Kind::Iff:
            return mk::iff(push_not(e->children[0]), e->children[1]);
        default:
            // atom without a negation rewrite (var, inSet, allDiff, table)
            return mk::not_(e);
    }
}

Expr simp_sum(const Expr& e, const Assignment& asg) {
    std::vector<Expr> terms;
    std::vector<Int> coeffs;
    Int offset = e->offset;
    auto push_term = [&](const Expr& c, Int k) {
        if (k == 0 && always_defined(c)) return;
        if (is_const(c)) {
            offset += k * c->value;
            return;
        }
        for (std::size_t i = 0; i < terms.size(); ++i) {
            if (structurally_equal(terms[i], c)) {
                coeffs[i] += k;
                return;
            }
        }
        terms.push_back(c);
        coeffs.push_back(k);
    };
    for (std::size_t i = 0; i < e->children.size(); ++i) {
        Expr c = simp(e->children[i], asg);
        if (c->kind == Kind::Sum) {
            offset += e->coeffs[i] * c->offset;
            for (std::size_t j = 0; j < c->children.size(); ++j)
                push_term(c->children[j], e->coeffs[i] * c->coeffs[j]);
        } else {
            push_term(c, e->coeffs[i]);
        }
    }
    // drop combined-away terms (keep faulting ones)
    for (std::size_t i = 0; i < terms.size();) {
        if (coeffs[i] == 0 && always_defined(terms[i])) {
            terms.erase(terms.begin() + i);
            coeffs.erase(coeffs.begin() + i);
        } else {
            ++i;
        }
    }
    if (terms.empty()) return mk::int_const(offset);
    if (terms.size() == 1 && coeffs[0] == 1 && offset == 0) return terms[0];
    return mk::sum(std::move(terms), std::move(coeffs), offset);
}

Expr simp_product(const Expr& e, const Assignment& asg) {
    std::vector<Expr> factors;
    Int k = 1;
    bool all_defined = true;
    for (const auto& ch : e->children) {
        Expr c = simp(ch, asg);
        if (!always_defined(c)) all_defined = false;
        if (is_const(c)) {
            k *= c->value;
        } else if (c->kind == Kind::Product) {
            for (const auto& sub : c->children) factors.push_back(sub);
        } else if (c->kind == Kind::Sum && c->children.size() == 1 && c->offset == 0) {
            k *= c->coeffs[0];
            factors.push_back(c->children[0]);
        } else {
            factors.push_back(c);
        }
    }
    if (k == 0 && all_defined) return mk::int_const(0);
    if (k == 0) {
        // keep the zero with the possibly-faulting factors
        factors.insert(factors.begin(), mk::int_const(0));
        return mk::product(std::move(factors));
    }
    if (factors.empty()) return mk::int_const(k);
    Expr core = factors.size() == 1 ? factors[0] : mk::product(std::move(factors));
    if (k == 1) return core;
    return mk::sum({std::move(core)}, {k}, 0);
}

Expr simp(const Expr& e, const Assignment& asg) {
    switch (e->kind) {
        case Kind::Const:
            return e;
        case Kind::Var: {
            auto it = asg.find(e->var);
            if (it == asg.end()) return e;
            return e->bool_typed ? mk::bool_const(it->second != 0)
                                 : mk::int_const(it->second);
        }
        case Kind::Sum:
            return simp_sum(e, asg);
        case Kind::Product:
            return simp_product(e, asg);
        case Kind::Div: {
            Expr a = simp(e->children[0], asg);
            Expr b = simp(e->children[1], asg);
            if (is_const(b) && b->value != 0) {
                if (is_const(a)) return mk::int_const(a->value / b->value);
                if (b->value == 1) return a;
            }
            return mk::div(std::move(a), std::move(b));
        }
        case Kind::Mod: {
            Expr a = simp(e->children[0], asg);
            Expr b = simp(e->children[1], asg);
            if (is_const(b) && b->value != 0) {
                if (is_const(a)) return mk::int_const(a->value % b->value);
                if ((b->value == 1 || b->value == -1) && always_defined(a))
                    return mk::int_const(0);
            }
            return mk::mod(std::move(a), std::move(b));
        }
        case Kind::Abs: {
            Expr a = simp(e->children[0], asg);
            if (is_const(a)) return mk::int_const(a->value < 0 ? -a->value : a->value);
            if (a->kind == Kind::Abs) return a;
            return mk::abs(std::move(a));
        }
        case Kind::Neg: {
            Expr a = simp(e->children[0], asg);
            if (is_const(a)) return mk::int_const(-a->value);
            return simp_sum(mk::sum({std::move(a)}, {-1}, 0), {});
        }
        case Kind::Gt:
            return simp(mk::rel(Kind::Lt, e->children[1], e->children[0]), asg);
        case Kind::Geq:
            return simp(mk::rel(Kind::Leq, e->children[1], e->children[0]), asg);
        case Kind::Eq:
        case Kind::Neq:
        case Kind::Lt:
        case Kind::Leq: {
            Expr a = simp(e->children[0], asg);
            Expr b = simp(e->children[1], asg);
            if (is_undef(a) || is_undef(b)) return mk::bool_const(false);
            if (is_const(a) && is_const(b)) {
                switch (e->kind) {
                    case Kind::Eq: return mk::bool_const(a->value == b->value);
                    case Kind::Neq: return mk::bool_const(a->value != b->value);
                    case Kind::Lt: return mk::bool_const(a->value < b->value);
                    default: return mk::bool_const(a->value <= b->value);
                }
            }
            if (structurally_equal(a, b) && always_defined(a)) {
                switch (e->kind) {
                    case Kind::Eq: return mk::bool_const(true);
                    case Kind::Neq: return mk::bool_const(false);
                    case Kind::Lt: return mk::bool_const(false);
                    default: return mk::bool_const(true);
                }
            }
            return mk::rel(e->kind, std::move(a), std::move(b));
        }
        case Kind::Not: {
            Expr a = simp(e->children[0], asg);
            if (is_const(a)) return mk::bool_const(a->value == 0);
            Expr pushed = push_not(a);
            if (pushed->kind == Kind::Not) return pushed;  // irreducible atom
            return simp(pushed, {});
        }
        case Kind::And:
        case Kind::Or: {
            bool conj = e->kind == Kind::And;
            std::vector<Expr> out;
            for (const auto& ch : e->children) {
                Expr c = simp(ch, asg);
                if (is_const(c)) {
                    if (conj ? c->value == 0 : c->value != 0)
                        return mk::bool_const(!conj);
                    continue;
                }
                if (c->kind == e->kind) {
                    for (const auto& sub : c->children) out.push_back(sub);
                } else {
                    out.push_back(c);
                }
            }
            // drop structural duplicates
            std::vector<Expr> dedup;
            for (const auto& c : out) {
                bool seen = false;
                for (const auto& d : dedup)
                    if (structurally_equal(c, d)) { seen = true; break; }
                if (!seen) dedup.push_back(c);
            }
            if (dedup.empty()) return mk::bool_const(conj);
            if (dedup.size() == 1) return dedup[0];
            return conj ? mk::and_(std::move(dedup)) : mk::or_(std::move(dedup));
        }
        case Kind::Implies: {
            Expr a = simp(e->children[0], asg);
            Expr b = simp(e->children[1], asg);
            if (is_false(a) || is_true(b)) return mk::bool_const(true);
            if (is_true(a)) return b;
            if (is_false(b)) return simp(mk::not_(a), {});
            if (structurally_equal(a, b)) return mk::bool_const(true);
            return mk::implies(std::move(a), std::move(b));
        }
        case Kind::Iff: {
            Expr a = simp(e->children[0], asg);
            Expr b = simp(e->children[1], asg);
            if (is_const(a)) return a->value ? b : simp(mk::not_(b), {});
            if (is_const(b)) return b->value ? a : simp(mk::not_(a), {});
            if (structurally_equal(a, b)) return mk::bool_const(true);
            return mk::iff(std::move(a), std::move(b));
        }
        case Kind::AllDiff: {
            std::vector<Expr> cs;
            cs.reserve(e->children.size());
            bool all_const = true;
            for (const auto& ch : e->children) {
                Expr c = simp(ch, asg);
                if (is_undef(c)) return mk::bool_const(false);
                if (!is_const(c)) all_const = false;
                cs.push_back(std::move(c));
            }
            if (cs.size() <= 1) return mk::bool_const(true);
            for (std::size_t i = 0; i < cs.size(); ++i)
                for (std::size_t j = i + 1; j < cs.size(); ++j)
                    if (structurally_equal(cs[i], cs[j]) && always_defined(cs[i]))
                        return mk::bool_const(false);
            if (all_const) return mk::bool_const(true);  // distinct by the pair check
            return mk::all_diff(std::move(cs));
        }
        case Kind::Element: {
            std::vector<Expr> entries;
            entries.reserve(e->children.size() - 1);
            for (std::size_t i = 0; i + 1 < e->children.size(); ++i)
                entries.push_back(simp(e->children[i], asg));
            Expr idx = simp(e->children.back(), asg);
            Int n = static_cast<Int>(entries.size());
            if (is_const(idx)) {
                if (idx->value >= 0 && idx->value < n)
                    return entries[static_cast<std::size_t>(idx->value)];
                // constant out-of-range index: kept, absorbed by the
                // enclosing Boolean as a fault
            }
            return mk::element(std::move(entries), std::move(idx));
        }
        case Kind::InSet: {
            Expr c = simp(e->children[0], asg);
            if (is_undef(c)) return mk::bool_const(false);
            if (is_const(c))
                return mk::bool_const(
                    std::binary_search(e->set.begin(), e->set.end(), c->value));
            return mk::in_set(std::move(c), e->set);
        }
        case Kind::TableCtr: {
            std::vector<Int> row;
            for (int v : e->table->scope) {
                auto it = asg.find(v);
                if (it == asg.end()) return e;
                row.push_back(it->second);
            }
            return mk::bool_const(e->table->contains_row(row));
        }
        // template forms are left to the instantiation pass
        case Kind::Ident:
        case Kind::MatrixAccess:
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Comprehension:
            return e;
    }
    return e;
}

bool commutative(Kind k) {
    switch (k) {
        case Kind::And:
        case Kind::Or:
        case Kind::Iff:
        case Kind::Eq:
        case Kind::Neq:
        case Kind::AllDiff:
        case Kind::Sum:
        case Kind::Product:
            return true;
        default:
            return false;
    }
}

Expr sort_commutative(const Expr& e) {
    if (e->children.empty()) return e;
    std::vector<Expr> cs;
    cs.reserve(e->children.size());
    bool changed = false;
    for (const auto& c : e->children) {
        Expr s = sort_commutative(c);
        if (s.get() != c.get()) changed = true;
        cs.push_back(std::move(s));
    }
    if (commutative(e->kind)) {
        std::vector<std::size_t> order(cs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<std::string> keys(cs.size());
        for (std::size_t i = 0; i < cs.size(); ++i) keys[i] = print_prefix(cs[i]);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (keys[a] != keys[b]) return keys[a] < keys[b];
            if (e->kind == Kind::Sum) return e->coeffs[a] < e->coeffs[b];
            return false;
        });
        bool permuted = false;
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i] != i) permuted = true;
        if (permuted || changed) {
            std::vector<Expr> sorted;
            std::vector<Int> coeffs;
            sorted.reserve(cs.size());
            for (std::size_t i : order) {
                sorted.push_back(cs[i]);
                if (e->kind == Kind::Sum) coeffs.push_back(e->coeffs[i]);
            }
            ExprNode n = *e;
            n.children = std::move(sorted);
            if (e->kind == Kind::Sum) n.coeffs = std::move(coeffs);
            return std::make_shared<const ExprNode>(std::move(n));
        }
        return e;
    }
    if (!changed) return e;
    ExprNode n = *e;
    n.children = std::move(cs);
    return std::make_shared<const ExprNode>(std::move(n));
}

} // namespace

Expr simplify(const Expr& e, const Assignment& assignment) {
    return simp(e, assignment);
}

Expr normalize(const Expr& e) {
    Expr cur = e;
    for (int iter = 0; iter < 10; ++iter) {
        Expr next = sort_commutative(simp(cur, {}));
        if (structurally_equal(next, cur)) return next;
        cur = next;
    }
    return cur;
}

namespace {

void scope_walk(const Expr& e, std::vector<int>& out, std::vector<bool>& seen) {
    auto note = [&](int v) {
        if (v >= static_cast<int>(seen.size())) seen.resize(v + 1, false);
        if (!seen[v]) {
            seen[v] = true;
            out.push_back(v);
        }
    };
    if (e->kind == Kind::Var) {
        note(e->var);
        return;
    }
    if (e->kind == Kind::TableCtr) {
        for (int v : e->table->scope) note(v);
        return;
    }
    for (const auto& c : e->children) scope_walk(c, out, seen);
}

} // namespace

std::vector<int> scope_of(const Expr& e) {
    std::vector<int> out;
    std::vector<bool> seen;
    scope_walk(e, out, seen);
    return out;
}

long count_nodes(const Expr& e) {
    switch (e->kind) {
        case Kind::Const:
        case Kind::Var:
        case Kind::Ident:
            return 1;
        case Kind::Sum: {
            long n = 1 + (e->offset != 0 ? 1 : 0);
            for (const auto& c : e->children) n += count_nodes(c);
            return n;
        }
        case Kind::InSet:
            return 2 + count_nodes(e->children[0]);
        case Kind::TableCtr:
            return 1 + static_cast<long>(e->table->scope.size());
        default: {
            long n = 1;
            for (const auto& c : e->children) n += count_nodes(c);
            return n;
        }
    }
}

namespace {

void occ_walk(const Expr& e, std::map<int, long>& out) {
    if (e->kind == Kind::Var) {
        ++out[e->var];
        return;
    }
    if (e->kind == Kind::TableCtr) {
        for (int v : e->table->scope) ++out[v];
        return;
    }
    for (const auto& c : e->children) occ_walk(c, out);
}

} // namespace

std::map<int, long> count_occurrences(const Expr& e) {
    std::map<int, long> out;
    occ_walk(e, out);
    return out;
}

bool contains_subexpr(const Expr& haystack, const Expr& needle) {
    if (structurally_equal(haystack, needle)) return true;
    for (const auto& c : haystack->children)
        if (contains_subexpr(c, needle)) return true;
    return false;
}

} // namespace retab
