#include "retab/solver.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <random>

#include "retab/eval.hpp"
#include "retab/simplify.hpp"

namespace retab {

const char* solve_status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Sat: return "Sat";
        case SolveStatus::Unsat: return "Unsat";
        case SolveStatus::AllSolutions: return "AllSolutions";
        case SolveStatus::OptimalFound: return "OptimalFound";
        case SolveStatus::NodeBudgetExhausted: return "NodeBudgetExhausted";
    }
    return "?";
}

bool propagate_table(const Table& t, std::vector<Domain>& domains) {
    const std::size_t r = t.scope.size();
    const std::size_t rows = t.tuple_count();
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < r; ++i) {
            Domain& d = domains[t.scope[i]];
            std::vector<Int> keep;
            keep.reserve(d.size());
            for (Int a : d.values()) {
                bool supported = false;
                for (std::size_t row = 0; row < rows && !supported; ++row) {
                    const Int* tup = t.row(row);
                    if (tup[i] != a) continue;
                    supported = true;
                    for (std::size_t j = 0; j < r; ++j) {
                        if (!domains[t.scope[j]].contains(tup[j])) {
                            supported = false;
                            break;
                        }
                    }
                }
                if (supported) keep.push_back(a);
            }
            if (keep.size() != d.size()) {
                changed = true;
                d = Domain(std::move(keep));
                if (d.empty()) return false;
            }
        }
    }
    return true;
}

namespace {

Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
Int ceil_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

// linear term: coeff * variable, or coeff * reified Boolean expression
struct Term {
    Int coeff;
    int var = -1;
    Expr reif;
};

struct Prop {
    enum class Type { Table, AllDiff, Linear, BoolTree } type;
    Expr expr;
    TablePtr table;                           // Table
    std::vector<int> scope;
    std::vector<Term> terms;                  // Linear: sum + k REL 0
    Int k = 0;
    Kind rel = Kind::Eq;
};

// collect the terms of a linear expression; Boolean subexpressions become
// reified 0/1 terms
bool linear_terms(const Expr& e, Int mult, std::vector<Term>& terms, Int& k) {
    if (e->bool_typed && e->kind != Kind::Var) {
        terms.push_back({mult, -1, e});
        return true;
    }
    switch (e->kind) {
        case Kind::Const:
            k += mult * e->value;
            return true;
        case Kind::Var:
            terms.push_back({mult, e->var, nullptr});
            return true;
        case Kind::Sum: {
            k += mult * e->offset;
            for (std::size_t i = 0; i < e->children.size(); ++i)
                if (!linear_terms(e->children[i], mult * e->coeffs[i], terms, k))
                    return false;
            return true;
        }
        default:
            return false;
    }
}

bool is_bool_connective(Kind k) {
    return k == Kind::And || k == Kind::Or || k == Kind::Not || k == Kind::Implies ||
           k == Kind::Iff;
}

Prop compile_constraint(const Expr& c) {
    Prop p;
    p.expr = c;
    p.scope = scope_of(c);
    if (c->kind == Kind::TableCtr) {
        p.type = Prop::Type::Table;
        p.table = c->table;
        return p;
    }
    if (c->kind == Kind::AllDiff) {
        bool all_vars = true;
        for (const auto& ch : c->children) all_vars &= ch->kind == Kind::Var;
        if (all_vars) {
            p.type = Prop::Type::AllDiff;
            return p;
        }
    }
    if (c->kind == Kind::Eq || c->kind == Kind::Neq || c->kind == Kind::Lt ||
        c->kind == Kind::Leq) {
        std::vector<Term> terms;
        Int k = 0;
        if (linear_terms(c->children[0], 1, terms, k) &&
            linear_terms(c->children[1], -1, terms, k)) {
            // merge duplicate plain variables
            std::vector<Term> merged;
            for (auto& t : terms) {
                bool found = false;
                if (t.var >= 0) {
                    for (auto& m : merged) {
                        if (m.var == t.var) {
                            m.coeff += t.coeff;
                            found = true;
                            break;
                        }
                    }
                }
                if (!found) merged.push_back(t);
            }
            std::erase_if(merged,
                          [](const Term& t) { return t.coeff == 0 && t.var >= 0; });
            p.type = Prop::Type::Linear;
            p.terms = std::move(merged);
            p.k = k;
            p.rel = c->kind;
            if (c->kind == Kind::Lt) {  // a < b  <=>  a - b + 1 <= 0
                p.rel = Kind::Leq;
                p.k += 1;
            }
            return p;
        }
    }
    p.type = Prop::Type::BoolTree;
    return p;
}

struct Engine {
    const Model& m;
    const SolveOptions& opts;
    int nvars;

    // per-variable live-value bitmaps over the initial domain ranks
    std::vector<std::vector<Int>> values;     // rank -> value
    std::vector<std::vector<uint8_t>> live;
    std::vector<int> count;
    std::vector<Int> single;                  // cached value when count==1

    std::vector<Prop> props;
    std::vector<std::vector<int>> watchers;   // var -> constraint indices
    std::vector<std::vector<std::vector<int>>> residues;  // table props

    std::vector<std::pair<int, int>> trail;   // (var, rank)
    std::deque<std::pair<int, int>> queue;    // (constraint, trigger var)
    std::mt19937 rng;

    SearchStats stats;
    std::vector<Int> solution_buf;
    bool stop = false;

    // branch and bound
    int bound_slot = -1;
    std::optional<Int> best;

    Engine(const Model& model, const SolveOptions& o) : m(model), opts(o) {
        nvars = m.store.size();
        values.resize(nvars);
        live.resize(nvars);
        count.resize(nvars);
        single.resize(nvars, 0);
        for (int v = 0; v < nvars; ++v) {
            values[v] = m.store[v].domain.values();
            live[v].assign(values[v].size(), 1);
            count[v] = static_cast<int>(values[v].size());
            if (count[v] == 1) single[v] = values[v][0];
        }
        watchers.resize(nvars);
        for (const auto& c : m.constraints) add_prop(compile_constraint(c));
        if (m.objective && opts.mode == SolveMode::Optimize) {
            bound_slot = static_cast<int>(props.size());
            Prop p;
            p.type = Prop::Type::BoolTree;
            p.expr = mk::bool_const(true);
            add_prop(std::move(p));
        }
        rng.seed(opts.shuffle_seed);
    }

    void add_prop(Prop p) {
        int idx = static_cast<int>(props.size());
        for (int v : p.scope) watchers[v].push_back(idx);
        residues.push_back({});
        if (p.type == Prop::Type::Table) {
            auto& res = residues.back();
            res.resize(p.table->scope.size());
            for (std::size_t i = 0; i < p.table->scope.size(); ++i)
                res[i].assign(values[p.table->scope[i]].size(), -1);
        }
        props.push_back(std::move(p));
    }

    bool assigned(int v) const { return count[v] == 1; }
    Int value_of(int v) const { return single[v]; }

    Int var_min(int v) const {
        for (std::size_t r = 0; r < values[v].size(); ++r)
            if (live[v][r]) return values[v][r];
        return 0;
    }
    Int var_max(int v) const {
        for (std::size_t r = values[v].size(); r-- > 0;)
            if (live[v][r]) return values[v][r];
        return 0;
    }

    bool remove_rank(int v, int r) {
        live[v][r] = 0;
        --count[v];
        trail.push_back({v, r});
        if (count[v] == 0) return false;
        if (count[v] == 1) {
            for (std::size_t q = 0; q < values[v].size(); ++q)
                if (live[v][q]) { single[v] = values[v][q]; break; }
        }
        for (int ci : watchers[v]) queue.push_back({ci, v});
        return true;
    }

    bool remove_value(int v, Int val) {
        auto it = std::lower_bound(values[v].begin(), values[v].end(), val);
        if (it == values[v].end() || *it != val) return true;
        int r = static_cast<int>(it - values[v].begin());
        if (!live[v][r]) return true;
        return remove_rank(v, r);
    }

    // keep only values of v within [lo, hi]
    bool restrict_range(int v, Int lo, Int hi) {
        for (std::size_t r = 0; r < values[v].size(); ++r) {
            if (!live[v][r]) continue;
            if (values[v][r] < lo || values[v][r] > hi)
                if (!remove_rank(v, static_cast<int>(r))) return false;
        }
        return true;
    }

    // ---- propagators ----

    bool run_table(int ci) {
        Prop& p = props[ci];
        const Table& t = *p.table;
        const std::size_t r = t.scope.size();
        const std::size_t rows = t.tuple_count();
        auto tuple_live = [&](std::size_t row) {
            const Int* tup = t.row(row);
            for (std::size_t j = 0; j < r; ++j) {
                int v = t.scope[j];
                auto it = std::lower_bound(values[v].begin(), values[v].end(), tup[j]);
                if (it == values[v].end() || *it != tup[j]) return false;
                if (!live[v][it - values[v].begin()]) return false;
            }
            return true;
        };
        for (std::size_t i = 0; i < r; ++i) {
            int v = t.scope[i];
            for (std::size_t rank = 0; rank < values[v].size(); ++rank) {
                if (!live[v][rank]) continue;
                Int a = values[v][rank];
                int& res = residues[ci][i][rank];
                if (res >= 0 && static_cast<std::size_t>(res) < rows) {
                    if (t.row(res)[i] == a && tuple_live(static_cast<std::size_t>(res)))
                        continue;
                }
                bool found = false;
                for (std::size_t row = 0; row < rows; ++row) {
                    if (t.row(row)[i] != a) continue;
                    if (tuple_live(row)) {
                        res = static_cast<int>(row);
                        found = true;
                        break;
                    }
                }
                if (!found && !remove_rank(v, static_cast<int>(rank))) return false;
            }
        }
        return true;
    }

    bool run_alldiff(int ci, int trigger) {
        Prop& p = props[ci];
        auto eliminate = [&](int av) {
            Int val = value_of(av);
            for (int v : p.scope) {
                if (v == av) continue;
                if (assigned(v) && value_of(v) == val) return false;
                if (!remove_value(v, val)) return false;
            }
            return true;
        };
        if (trigger >= 0) {
            if (!assigned(trigger)) return true;
            return eliminate(trigger);
        }
        for (int v : p.scope)
            if (assigned(v) && !eliminate(v)) return false;
        return true;
    }

    // ---- entailment over expression trees ----

    enum class Tri { True, False, Unknown };

    Int term_lo(const Term& t) {
        if (t.var >= 0) return t.coeff > 0 ? t.coeff * var_min(t.var)
                                           : t.coeff * var_max(t.var);
        Tri s = status(t.reif);
        Int lo = s == Tri::True ? 1 : 0, hi = s == Tri::False ? 0 : 1;
        return t.coeff > 0 ? t.coeff * lo : t.coeff * hi;
    }
    Int term_hi(const Term& t) {
        if (t.var >= 0) return t.coeff > 0 ? t.coeff * var_max(t.var)
                                           : t.coeff * var_min(t.var);
        Tri s = status(t.reif);
        Int lo = s == Tri::True ? 1 : 0, hi = s == Tri::False ? 0 : 1;
        return t.coeff > 0 ? t.coeff * hi : t.coeff * lo;
    }

    // rel as a linear form "sum + k REL 0"; false if not linearizable
    bool linear_form(const Expr& e, std::vector<Term>& terms, Int& k, Kind& rel) {
        if (e->kind != Kind::Eq && e->kind != Kind::Neq && e->kind != Kind::Lt &&
            e->kind != Kind::Leq)
            return false;
        terms.clear();
        k = 0;
        if (!linear_terms(e->children[0], 1, terms, k) ||
            !linear_terms(e->children[1], -1, terms, k))
            return false;
        rel = e->kind == Kind::Lt ? Kind::Leq : e->kind;
        if (e->kind == Kind::Lt) k += 1;
        return true;
    }

    bool all_scope_assigned(const Expr& e) {
        for (int v : scope_of(e))
            if (!assigned(v)) return false;
        return true;
    }

    bool eval_under_current(const Expr& e) {
        for (int v : scope_of(e)) solution_buf[v] = value_of(v);
        return eval_bool(e, solution_buf);
    }

    Tri status(const Expr& e) {
        switch (e->kind) {
            case Kind::Const:
                return e->value ? Tri::True : Tri::False;
            case Kind::Var:
                if (!assigned(e->var)) return Tri::Unknown;
                return value_of(e->var) ? Tri::True : Tri::False;
            case Kind::Not: {
                Tri s = status(e->children[0]);
                if (s == Tri::Unknown) return s;
                return s == Tri::True ? Tri::False : Tri::True;
            }
            case Kind::And: {
                bool unknown = false;
                for (const auto& c : e->children) {
                    Tri s = status(c);
                    if (s == Tri::False) return Tri::False;
                    unknown |= s == Tri::Unknown;
                }
                return unknown ? Tri::Unknown : Tri::True;
            }
            case Kind::Or: {
                bool unknown = false;
                for (const auto& c : e->children) {
                    Tri s = status(c);
                    if (s == Tri::True) return Tri::True;
                    unknown |= s == Tri::Unknown;
                }
                return unknown ? Tri::Unknown : Tri::False;
            }
            case Kind::Implies: {
                Tri a = status(e->children[0]);
                Tri b = status(e->children[1]);
                if (a == Tri::False || b == Tri::True) return Tri::True;
                if (a == Tri::True && b == Tri::False) return Tri::False;
                return Tri::Unknown;
            }
            case Kind::Iff: {
                Tri a = status(e->children[0]);
                Tri b = status(e->children[1]);
                if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
                return a == b ? Tri::True : Tri::False;
            }
            case Kind::InSet: {
                const Expr& c = e->children[0];
                if (c->kind == Kind::Var && !c->bool_typed) {
                    bool all_in = true, any_in = false;
                    for (std::size_t r = 0; r < values[c->var].size(); ++r) {
                        if (!live[c->var][r]) continue;
                        bool in = std::binary_search(e->set.begin(), e->set.end(),
                                                     values[c->var][r]);
                        all_in &= in;
                        any_in |= in;
                    }
                    if (all_in) return Tri::True;
                    if (!any_in) return Tri::False;
                    return Tri::Unknown;
                }
                break;
            }
            default:
                break;
        }
        // comparisons over linear forms get bounds reasoning
        {
            std::vector<Term> terms;
            Int k;
            Kind rel;
            if (linear_form(e, terms, k, rel)) {
                Int smin = k, smax = k;
                for (const auto& t : terms) {
                    smin += term_lo(t);
                    smax += term_hi(t);
                }
                switch (rel) {
                    case Kind::Leq:
                        if (smax <= 0) return Tri::True;
                        if (smin > 0) return Tri::False;
                        return Tri::Unknown;
                    case Kind::Eq:
                        if (smin == 0 && smax == 0) return Tri::True;
                        if (smin > 0 || smax < 0) return Tri::False;
                        return Tri::Unknown;
                    default:  // Neq
                        if (smin == 0 && smax == 0) return Tri::False;
                        if (smin > 0 || smax < 0) return Tri::True;
                        return Tri::Unknown;
                }
            }
        }
        if (all_scope_assigned(e))
            return eval_under_current(e) ? Tri::True : Tri::False;
        return Tri::Unknown;
    }

    // restrict a term's value to [lo, hi]
    bool prune_term(const Term& t, Int lo, Int hi) {
        if (t.var >= 0) return restrict_range(t.var, lo, hi);
        if (hi < 0 || lo > 1) return false;
        if (lo > 0) return force(t.reif, true);
        if (hi < 1) return force(t.reif, false);
        return true;
    }

    bool prune_linear(const std::vector<Term>& terms, Int k, Kind rel, bool pol) {
        if (!pol) {
            switch (rel) {
                case Kind::Eq: rel = Kind::Neq; break;
                case Kind::Neq: rel = Kind::Eq; break;
                default: {  // !(sum + k <= 0)  <=>  -sum - k + 1 <= 0
                    std::vector<Term> neg = terms;
                    for (auto& t : neg) t.coeff = -t.coeff;
                    return prune_linear(neg, -k + 1, Kind::Leq, true);
                }
            }
        }
        Int smin = k, smax = k;
        for (const auto& t : terms) {
            smin += term_lo(t);
            smax += term_hi(t);
        }
        switch (rel) {
            case Kind::Leq: {
                if (smin > 0) return false;
                if (smax <= 0) return true;
                for (const auto& t : terms) {
                    Int rest = smin - term_lo(t);
                    // need coeff*x <= -rest
                    if (t.coeff > 0) {
                        if (!prune_term(t, t.var >= 0 ? var_min(t.var) : 0,
                                        floor_div(-rest, t.coeff)))
                            return false;
                    } else {
                        if (!prune_term(t, ceil_div(-rest, t.coeff),
                                        t.var >= 0 ? var_max(t.var) : 1))
                            return false;
                    }
                }
                return true;
            }
            case Kind::Eq: {
                if (smin > 0 || smax < 0) return false;
                for (const auto& t : terms) {
                    Int rest_min = smin - term_lo(t);
                    Int rest_max = smax - term_hi(t);
                    Int lo, hi;
                    if (t.coeff > 0) {
                        hi = floor_div(-rest_min, t.coeff);
                        lo = ceil_div(-rest_max, t.coeff);
                    } else {
                        lo = ceil_div(-rest_min, t.coeff);
                        hi = floor_div(-rest_max, t.coeff);
                    }
                    if (!prune_term(t, lo, hi)) return false;
                }
                return true;
            }
            case Kind::Neq: {
                const Term* free_term = nullptr;
                Int sum = k;
                for (const auto& t : terms) {
                    Int lo = term_lo(t), hi = term_hi(t);
                    if (lo == hi) {
                        sum += lo;
                    } else if (!free_term) {
                        free_term = &t;
                    } else {
                        return true;  // two or more unfixed terms
                    }
                }
                if (!free_term) return sum != 0;
                Int c = free_term->coeff;
                if (c != 0 && (-sum) % c == 0) {
                    Int bad = -sum / c;
                    if (free_term->var >= 0) {
                        // bounds consistency: only interval endpoints are shaved
                        if (bad == var_min(free_term->var) || bad == var_max(free_term->var))
                            if (!remove_value(free_term->var, bad)) return false;
                    } else if (bad == 0 || bad == 1) {
                        if (!force(free_term->reif, bad == 0)) return false;
                    }
                }
                return true;
            }
            default:
                return true;
        }
    }

    // filtering sweep of the single unassigned variable of e (or a check)
    bool sweep_scoped(const Expr& e, const std::vector<int>& scope, bool pol) {
        int free_var = -1;
        for (int v : scope) {
            if (assigned(v)) continue;
            if (free_var >= 0) return true;
            free_var = v;
        }
        if (free_var < 0) {
            for (int v : scope) solution_buf[v] = value_of(v);
            return eval_bool(e, solution_buf) == pol;
        }
        for (int v : scope) solution_buf[v] = assigned(v) ? value_of(v) : 0;
        for (std::size_t r = 0; r < values[free_var].size(); ++r) {
            if (!live[free_var][r]) continue;
            solution_buf[free_var] = values[free_var][r];
            if (eval_bool(e, solution_buf) != pol) {
                if (!remove_rank(free_var, static_cast<int>(r))) return false;
            }
        }
        return true;
    }

    bool leaf_sweep(const Expr& e, bool pol) { return sweep_scoped(e, scope_of(e), pol); }

    // make e take truth value pol, pruning where the structure allows
    bool force(const Expr& e, bool pol) {
        switch (e->kind) {
            case Kind::Const:
                return (e->value != 0) == pol;
            case Kind::Var: {
                // assign the Boolean variable
                Int want = pol ? 1 : 0;
                for (std::size_t r = 0; r < values[e->var].size(); ++r) {
                    if (!live[e->var][r]) continue;
                    if (values[e->var][r] != want)
                        if (!remove_rank(e->var, static_cast<int>(r))) return false;
                }
                return count[e->var] > 0;
            }
            case Kind::Not:
                return force(e->children[0], !pol);
            case Kind::And:
            case Kind::Or: {
                bool all_pol = (e->kind == Kind::And) == pol;
                if (all_pol) {
                    // every child takes the same polarity
                    for (const auto& c : e->children)
                        if (!force(c, pol)) return false;
                    return true;
                }
                // at least one child must take pol; unit-propagate
                const Expr* open = nullptr;
                for (const auto& c : e->children) {
                    Tri s = status(c);
                    bool child_pol = s == Tri::True;
                    if (s != Tri::Unknown && child_pol == pol) return true;
                    if (s == Tri::Unknown) {
                        if (open) return true;  // two open children
                        open = &c;
                    }
                }
                if (!open) return false;  // all children resolved the wrong way
                return force(*open, pol);
            }
            case Kind::Implies: {
                if (!pol) return force(e->children[0], true) &&
                                 force(e->children[1], false);
                Tri a = status(e->children[0]);
                Tri b = status(e->children[1]);
                if (a == Tri::True) return force(e->children[1], true);
                if (b == Tri::False) return force(e->children[0], false);
                if (a == Tri::False || b == Tri::True) return true;
                return true;
            }
            case Kind::Iff: {
                Tri a = status(e->children[0]);
                Tri b = status(e->children[1]);
                if (a != Tri::Unknown)
                    return force(e->children[1], (a == Tri::True) == pol);
                if (b != Tri::Unknown)
                    return force(e->children[0], (b == Tri::True) == pol);
                return true;
            }
            case Kind::InSet: {
                const Expr& c = e->children[0];
                if (c->kind == Kind::Var && !c->bool_typed) {
                    for (std::size_t r = 0; r < values[c->var].size(); ++r) {
                        if (!live[c->var][r]) continue;
                        bool in = std::binary_search(e->set.begin(), e->set.end(),
                                                     values[c->var][r]);
                        if (in != pol)
                            if (!remove_rank(c->var, static_cast<int>(r))) return false;
                    }
                    return count[c->var] > 0;
                }
                return leaf_sweep(e, pol);
            }
            default: {
                std::vector<Term> terms;
                Int k;
                Kind rel;
                if (linear_form(e, terms, k, rel)) return prune_linear(terms, k, rel, pol);
                return leaf_sweep(e, pol);
            }
        }
    }

    bool run_linear(int ci) {
        Prop& p = props[ci];
        return prune_linear(p.terms, p.k, p.rel, true);
    }

    bool run_booltree(int ci) {
        Prop& p = props[ci];
        int unassigned = 0;
        for (int v : p.scope)
            if (!assigned(v)) ++unassigned;
        if (unassigned <= 1) return sweep_scoped(p.expr, p.scope, true);
        if (is_bool_connective(p.expr->kind) || p.expr->kind == Kind::InSet)
            return force(p.expr, true);
        return true;
    }

    bool run_prop(int ci, int trigger) {
        switch (props[ci].type) {
            case Prop::Type::Table: return run_table(ci);
            case Prop::Type::AllDiff: return run_alldiff(ci, trigger);
            case Prop::Type::Linear: return run_linear(ci);
            case Prop::Type::BoolTree: return run_booltree(ci);
        }
        return true;
    }

    bool propagate() {
        while (!queue.empty()) {
            int ci, trigger;
            if (opts.shuffle_seed != 0) {
                std::size_t pick =
                    std::uniform_int_distribution<std::size_t>(0, queue.size() - 1)(rng);
                std::tie(ci, trigger) = queue[pick];
                queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(pick));
            } else {
                std::tie(ci, trigger) = queue.front();
                queue.pop_front();
            }
            if (!run_prop(ci, trigger)) {
                queue.clear();
                return false;
            }
        }
        return true;
    }

    bool propagate_root() {
        for (std::size_t ci = 0; ci < props.size(); ++ci) queue.push_back({static_cast<int>(ci), -1});
        return propagate();
    }

    // ---- search ----

    void found_solution() {
        for (int v = 0; v < nvars; ++v) solution_buf[v] = value_of(v);
        ++stats.solutions;
        if (opts.mode == SolveMode::Optimize) {
            Int obj = eval_int(m.objective, solution_buf).value_or(0);
            bool better = !best ||
                          (m.objective_sense == Objective::Minimize ? obj < *best : obj > *best);
            if (better) {
                best = obj;
                stats.best_objective = best;
                if (opts.on_solution) opts.on_solution(solution_buf);
                // strict improvement bound, kept across backtracking
                Kind rel = Kind::Lt;
                Expr bound_expr =
                    m.objective_sense == Objective::Minimize
                        ? mk::rel(rel, m.objective, mk::int_const(*best))
                        : mk::rel(rel, mk::int_const(*best), m.objective);
                Prop p = compile_constraint(normalize(bound_expr));
                for (int v : p.scope) {
                    auto& w = watchers[v];
                    if (std::find(w.begin(), w.end(), bound_slot) == w.end())
                        w.push_back(bound_slot);
                }
                props[bound_slot] = std::move(p);
            }
            return;
        }
        if (opts.on_solution) opts.on_solution(solution_buf);
        if (opts.mode == SolveMode::FirstSolution) {
            stats.status = SolveStatus::Sat;
            stop = true;
        }
    }

    void dfs() {
        if (stop) return;
        int var = -1;
        for (int v = 0; v < nvars; ++v) {
            if (count[v] > 1) { var = v; break; }
        }
        if (var < 0) {
            found_solution();
            return;
        }
        // snapshot of the live values at this node (d-way branching)
        std::vector<int> branch_ranks;
        for (std::size_t r = 0; r < values[var].size(); ++r)
            if (live[var][r]) branch_ranks.push_back(static_cast<int>(r));
        for (int r : branch_ranks) {
            if (stop) return;
            ++stats.nodes;
            if (opts.node_budget && stats.nodes >= *opts.node_budget) {
                stats.status = SolveStatus::NodeBudgetExhausted;
                stop = true;
                return;
            }
            std::size_t mark = trail.size();
            bool ok = true;
            // assign var := values[var][r]
            for (std::size_t q = 0; q < values[var].size() && ok; ++q) {
                if (static_cast<int>(q) != r && live[var][q])
                    ok = remove_rank(var, static_cast<int>(q));
            }
            if (ok) ok = propagate();
            if (ok) dfs();
            queue.clear();
            // single[] goes stale once count > 1 and is refreshed by
            // remove_rank when a domain collapses again
            while (trail.size() > mark) {
                auto [v, q] = trail.back();
                trail.pop_back();
                live[v][q] = 1;
                ++count[v];
                if (count[v] == 1) single[v] = values[v][q];
            }
        }
    }

    SearchStats run() {
        solution_buf.assign(nvars, 0);
        if (m.proven_unsat) {
            stats.status = SolveStatus::Unsat;
            return stats;
        }
        if (!propagate_root()) {
            stats.status = SolveStatus::Unsat;
            return stats;
        }
        dfs();
        if (!stop) {
            switch (opts.mode) {
                case SolveMode::FirstSolution:
                    stats.status = stats.solutions > 0 ? SolveStatus::Sat : SolveStatus::Unsat;
                    break;
                case SolveMode::AllSolutions:
                    stats.status = SolveStatus::AllSolutions;
                    break;
                case SolveMode::Optimize:
                    stats.status = stats.solutions > 0 ? SolveStatus::OptimalFound
                                                       : SolveStatus::Unsat;
                    break;
            }
        }
        return stats;
    }
};

} // namespace

SearchStats solve(const Model& m, const SolveOptions& opts) {
    SolveOptions o = opts;
    if (o.mode == SolveMode::Optimize && !m.objective) o.mode = SolveMode::FirstSolution;
    Engine engine(m, o);
    return engine.run();
}

bool verify_solution(const Model& m, const std::vector<Int>& values) {
    for (const auto& c : m.constraints)
        if (!eval_bool(c, values)) return false;
    return true;
}

} // namespace retab
