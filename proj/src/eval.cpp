#include "retab/eval.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "retab/table.hpp"

namespace retab {

namespace {

std::optional<Int> ev_int(const Expr& e, const std::vector<Int>& values);
bool ev_bool(const Expr& e, const std::vector<Int>& values);

std::optional<Int> ev_int(const Expr& e, const std::vector<Int>& values) {
    if (e->bool_typed) return ev_bool(e, values) ? 1 : 0;
    switch (e->kind) {
        case Kind::Const: return e->value;
        case Kind::Var: return values.at(e->var);
        case Kind::Sum: {
            Int acc = e->offset;
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                auto v = ev_int(e->children[i], values);
                if (!v) return std::nullopt;
                acc += e->coeffs[i] * *v;
            }
            return acc;
        }
        case Kind::Product: {
            Int acc = 1;
            for (const auto& c : e->children) {
                auto v = ev_int(c, values);
                if (!v) return std::nullopt;
                acc *= *v;
            }
            return acc;
        }
        case Kind::Div:
        case Kind::Mod: {
            auto a = ev_int(e->children[0], values);
            auto b = ev_int(e->children[1], values);
            if (!a || !b || *b == 0) return std::nullopt;
            return e->kind == Kind::Div ? *a / *b : *a % *b;
        }
        case Kind::Abs: {
            auto v = ev_int(e->children[0], values);
            if (!v) return std::nullopt;
            return *v < 0 ? -*v : *v;
        }
        case Kind::Neg: {
            auto v = ev_int(e->children[0], values);
            if (!v) return std::nullopt;
            return -*v;
        }
        case Kind::Element: {
            auto idx = ev_int(e->children.back(), values);
            if (!idx) return std::nullopt;
            Int n = static_cast<Int>(e->children.size()) - 1;
            if (*idx < 0 || *idx >= n) return std::nullopt;
            return ev_int(e->children[static_cast<std::size_t>(*idx)], values);
        }
        default:
            throw std::logic_error("eval_int: unexpected node kind");
    }
}

bool ev_bool(const Expr& e, const std::vector<Int>& values) {
    switch (e->kind) {
        case Kind::Const: return e->value != 0;
        case Kind::Var: return values.at(e->var) != 0;
        case Kind::Eq:
        case Kind::Neq:
        case Kind::Lt:
        case Kind::Leq:
        case Kind::Gt:
        case Kind::Geq: {
            auto a = ev_int(e->children[0], values);
            auto b = ev_int(e->children[1], values);
            if (!a || !b) return false;   // fault falsifies the relation
            switch (e->kind) {
                case Kind::Eq: return *a == *b;
                case Kind::Neq: return *a != *b;
                case Kind::Lt: return *a < *b;
                case Kind::Leq: return *a <= *b;
                case Kind::Gt: return *a > *b;
                default: return *a >= *b;
            }
        }
        case Kind::Not: return !ev_bool(e->children[0], values);
        case Kind::And:
            for (const auto& c : e->children)
                if (!ev_bool(c, values)) return false;
            return true;
        case Kind::Or:
            for (const auto& c : e->children)
                if (ev_bool(c, values)) return true;
            return false;
        case Kind::Implies:
            return !ev_bool(e->children[0], values) || ev_bool(e->children[1], values);
        case Kind::Iff:
            return ev_bool(e->children[0], values) == ev_bool(e->children[1], values);
        case Kind::AllDiff: {
            std::vector<Int> seen;
            for (const auto& c : e->children) {
                auto v = ev_int(c, values);
                if (!v) return false;
                seen.push_back(*v);
            }
            std::sort(seen.begin(), seen.end());
            return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
        }
        case Kind::InSet: {
            auto v = ev_int(e->children[0], values);
            if (!v) return false;
            return std::binary_search(e->set.begin(), e->set.end(), *v);
        }
        case Kind::TableCtr: {
            std::vector<Int> row;
            row.reserve(e->table->scope.size());
            for (int v : e->table->scope) row.push_back(values.at(v));
            return e->table->contains_row(row);
        }
        default:
            throw std::logic_error("eval_bool: unexpected node kind");
    }
}

bool denominator_nonzero(const Expr& d) {
    return d->kind == Kind::Const && d->value != 0;
}

} // namespace

std::optional<Int> eval_int(const Expr& e, const std::vector<Int>& values) {
    return ev_int(e, values);
}

bool eval_bool(const Expr& e, const std::vector<Int>& values) {
    assert(e->bool_typed);
    return ev_bool(e, values);
}

bool always_defined(const Expr& e) {
    switch (e->kind) {
        case Kind::Div:
        case Kind::Mod:
            if (!denominator_nonzero(e->children[1])) return false;
            break;
        case Kind::Element: {
            const auto& idx = e->children.back();
            Int n = static_cast<Int>(e->children.size()) - 1;
            if (idx->kind != Kind::Const || idx->value < 0 || idx->value >= n)
                return false;
            break;
        }
        default:
            break;
    }
    for (const auto& c : e->children)
        if (!always_defined(c)) return false;
    return true;
}

namespace {

Interval iv_mul(Interval a, Interval b) {
    Int c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

} // namespace

Interval value_interval(const Expr& e, const VarStore& store) {
    if (e->bool_typed && e->kind != Kind::Var) return {0, 1};
    switch (e->kind) {
        case Kind::Const: return {e->value, e->value};
        case Kind::Var: {
            const Domain& d = store[e->var].domain;
            if (d.empty()) return {0, 0};
            return {d.min(), d.max()};
        }
        case Kind::Sum: {
            Interval acc{e->offset, e->offset};
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                Interval c = value_interval(e->children[i], store);
                Interval t = iv_mul({e->coeffs[i], e->coeffs[i]}, c);
                acc = {acc.lo + t.lo, acc.hi + t.hi};
            }
            return acc;
        }
        case Kind::Product: {
            Interval acc{1, 1};
            for (const auto& c : e->children) acc = iv_mul(acc, value_interval(c, store));
            return acc;
        }
        case Kind::Div: {
            Interval a = value_interval(e->children[0], store);
            Interval b = value_interval(e->children[1], store);
            // candidate divisors: interval ends plus the values nearest zero
            std::vector<Int> divs;
            for (Int d : {b.lo, b.hi, Int(-1), Int(1)})
                if (d != 0 && d >= b.lo && d <= b.hi) divs.push_back(d);
            if (divs.empty()) return {0, 0};
            Int lo = a.lo / divs[0], hi = lo;
            for (Int d : divs)
                for (Int n : {a.lo, a.hi}) {
                    Int q = n / d;
                    lo = std::min(lo, q);
                    hi = std::max(hi, q);
                }
            return {lo, hi};
        }
        case Kind::Mod: {
            Interval a = value_interval(e->children[0], store);
            Interval b = value_interval(e->children[1], store);
            Int maxabs = std::max(std::abs(b.lo), std::abs(b.hi));
            if (maxabs == 0) return {0, 0};
            // result sign follows the dividend under truncation
            Int lo = a.lo < 0 ? -(maxabs - 1) : 0;
            Int hi = a.hi > 0 ? maxabs - 1 : 0;
            lo = std::max(lo, a.lo < 0 ? std::max(a.lo, Int(-(maxabs - 1))) : Int(0));
            hi = std::min(hi, a.hi > 0 ? std::min(a.hi, maxabs - 1) : Int(0));
            return {lo, hi};
        }
        case Kind::Abs: {
            Interval a = value_interval(e->children[0], store);
            if (a.lo >= 0) return a;
            if (a.hi <= 0) return {-a.hi, -a.lo};
            return {0, std::max(-a.lo, a.hi)};
        }
        case Kind::Neg: {
            Interval a = value_interval(e->children[0], store);
            return {-a.hi, -a.lo};
        }
        case Kind::Element: {
            Interval acc{0, 0};
            bool first = true;
            for (std::size_t i = 0; i + 1 < e->children.size(); ++i) {
                Interval c = value_interval(e->children[i], store);
                if (first) acc = c;
                else acc = {std::min(acc.lo, c.lo), std::max(acc.hi, c.hi)};
                first = false;
            }
            return acc;
        }
        default:
            throw std::logic_error("value_interval: unexpected node kind");
    }
}

} // namespace retab
