#include "retab/tabulate.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

#include "retab/eval.hpp"
#include "retab/print.hpp"
#include "retab/simplify.hpp"

namespace retab {

const char* tab_status_name(TabOutcome::Status s) {
    switch (s) {
        case TabOutcome::Status::Success: return "Success";
        case TabOutcome::Status::CacheHit: return "CacheHit";
        case TabOutcome::Status::AbandonedProgress: return "AbandonedProgress";
        case TabOutcome::Status::AbandonedNodeLimit: return "AbandonedNodeLimit";
        case TabOutcome::Status::RejectedNestedSize: return "RejectedNestedSize";
    }
    return "?";
}

namespace {

constexpr Int kHuge = INT64_MAX;

Int sat_mul(Int a, Int b) {
    if (a == 0 || b == 0) return 0;
    if (a > kHuge / b) return kHuge;
    return a * b;
}

} // namespace

Int assignment_space(const std::vector<Domain>& domains) {
    Int a = 1;
    for (const auto& d : domains) a = sat_mul(a, static_cast<Int>(d.size()));
    return a;
}

Int position_index(const std::vector<Int>& partial, const std::vector<Domain>& domains) {
    // suffix products |D_{i+1}| * ... * |D_r|, saturating
    std::size_t r = domains.size();
    std::vector<Int> suffix(r + 1, 1);
    for (std::size_t i = r; i-- > 0;)
        suffix[i] = sat_mul(suffix[i + 1], static_cast<Int>(domains[i].size()));
    Int c = 0;
    for (std::size_t i = 0; i < partial.size() && i < r; ++i) {
        int rank = domains[i].rank_of(partial[i]);
        if (rank < 0) throw std::invalid_argument("value not in domain");
        Int term = sat_mul(static_cast<Int>(rank), suffix[i + 1]);
        c = c > kHuge - term ? kHuge : c + term;
    }
    return c;
}

TabOutcome generate_table(const Expr& e, const VarStore& store, const TabLimits& limits,
                          bool nested_size_cap) {
    std::vector<int> scope = scope_of(e);
    std::size_t r = scope.size();
    std::vector<Domain> domains;
    domains.reserve(r);
    for (int v : scope) domains.push_back(store[v].domain);

    Int a = assignment_space(domains);
    if (nested_size_cap && a > limits.node_limit) {
        TabOutcome out{TabOutcome::Status::RejectedNestedSize};
        out.space = a;
        return out;
    }

    std::vector<Int> suffix(r + 1, 1);
    for (std::size_t i = r; i-- > 0;)
        suffix[i] = sat_mul(suffix[i + 1], static_cast<Int>(domains[i].size()));

    auto table = std::make_shared<Table>();
    table->scope = scope;

    std::vector<Int> ranks(r, 0);
    Int nodes = 0;
    TabOutcome::Status verdict = TabOutcome::Status::Success;
    Int fail_c = 0;

    // expression stack: exprs[k] is e simplified under the first k values
    std::vector<Expr> exprs(r + 1);
    exprs[0] = e;
    std::vector<Int> values(r, 0);

    std::function<bool(std::size_t)> dfs = [&](std::size_t k) -> bool {
        const Domain& d = domains[k];
        for (std::size_t rank = 0; rank < d.size(); ++rank) {
            Int val = d.value_at(rank);
            ++nodes;
            ranks[k] = static_cast<Int>(rank);
            values[k] = val;
            if (limits.is_checkpoint(nodes)) {
                // C for the current partial assignment, minima filled in
                Int c = 0;
                for (std::size_t i = 0; i <= k; ++i) {
                    Int term = sat_mul(ranks[i], suffix[i + 1]);
                    c = c > kHuge - term ? kHuge : c + term;
                }
                using U = unsigned __int128;
                if (U(c) * U(limits.node_limit) < U(nodes) * U(a)) {
                    verdict = TabOutcome::Status::AbandonedProgress;
                    fail_c = c;
                    return false;
                }
            }
            if (nodes >= limits.node_limit &&
                !(k + 1 == r && rank + 1 == d.size() && nodes == limits.node_limit)) {
                verdict = TabOutcome::Status::AbandonedNodeLimit;
                return false;
            }
            Expr cur = simplify(exprs[k], {{scope[k], val}});
            if (cur->kind == Kind::Const && cur->value == 0) continue;
            if (k + 1 == r) {
                assert(cur->kind == Kind::Const);
                if (cur->value != 0)
                    table->tuples.insert(table->tuples.end(), values.begin(), values.end());
            } else {
                exprs[k + 1] = cur;
                if (!dfs(k + 1)) return false;
            }
        }
        return true;
    };

    if (r == 0) {
        // constant constraint: table over the empty scope is unusual; treat a
        // true constant as a single empty tuple and false as no tuples
        Expr cur = simplify(e, {});
        TabOutcome out{TabOutcome::Status::Success};
        out.table = table;
        out.space = 1;
        (void)cur;
        return out;
    }

    if (!dfs(0)) {
        TabOutcome out{verdict};
        out.nodes_searched = nodes;
        out.progress_c = fail_c;
        out.space = a;
        return out;
    }
    TabOutcome out{TabOutcome::Status::Success};
    out.table = table;
    out.nodes_searched = nodes;
    out.space = a;
    return out;
}

namespace {

Expr rename_vars(const Expr& e, const std::vector<std::pair<int, std::string>>& names) {
    if (e->kind == Kind::Var) {
        for (const auto& [id, nm] : names) {
            if (id == e->var) {
                if (e->name == nm) return e;
                ExprNode n = *e;
                n.name = nm;
                return std::make_shared<const ExprNode>(std::move(n));
            }
        }
        return e;
    }
    if (e->children.empty()) return e;
    std::vector<Expr> cs;
    cs.reserve(e->children.size());
    bool changed = false;
    for (const auto& c : e->children) {
        Expr r = rename_vars(c, names);
        changed |= r.get() != c.get();
        cs.push_back(std::move(r));
    }
    if (!changed) return e;
    ExprNode n = *e;
    n.children = std::move(cs);
    return std::make_shared<const ExprNode>(std::move(n));
}

struct Canonical {
    std::string printed;
    std::vector<int> var_order;  // var id of V0, V1, ...
};

// Renaming to the canonical sequence can change the sort order of commutative
// siblings, so renaming and re-sorting are iterated; the lexicographically
// smallest printed form wins, which makes the key invariant under variable
// renaming for the expressions arising here.
Canonical canonicalize(const Expr& normalized, const VarStore& store) {
    (void)store;
    Expr cur = normalized;
    Canonical best;
    std::set<std::string> seen;
    for (int iter = 0; iter < 8; ++iter) {
        std::vector<int> vars = scope_of(cur);
        std::vector<std::pair<int, std::string>> names;
        names.reserve(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i)
            names.push_back({vars[i], "V" + std::to_string(i)});
        Expr renamed = rename_vars(cur, names);
        std::string s = print_prefix(renamed);
        if (seen.count(s)) break;
        seen.insert(s);
        if (best.printed.empty() || s < best.printed) {
            best.printed = s;
            best.var_order = vars;
        }
        cur = normalize(renamed);
    }
    return best;
}

} // namespace

CacheKey cache_key(const Expr& normalized, const VarStore& store) {
    Canonical canon = canonicalize(normalized, store);
    CacheKey key;
    key.expr = canon.printed;
    for (int v : canon.var_order) key.domains.push_back(store[v].domain);
    return key;
}

namespace {

// permute a canonical tuple matrix into the given scope order and restore
// lexicographic tuple order
TablePtr remap_table(const TablePtr& canon_table, const std::vector<int>& canon_vars,
                     const std::vector<int>& want_scope) {
    std::size_t r = want_scope.size();
    std::vector<std::size_t> col(r, 0);
    bool identity = canon_vars == want_scope;
    if (identity) {
        auto t = std::make_shared<Table>(*canon_table);
        t->scope = want_scope;
        return t;
    }
    for (std::size_t i = 0; i < r; ++i) {
        auto it = std::find(canon_vars.begin(), canon_vars.end(), want_scope[i]);
        assert(it != canon_vars.end());
        col[i] = static_cast<std::size_t>(it - canon_vars.begin());
    }
    auto t = std::make_shared<Table>();
    t->id = canon_table->id;
    t->scope = want_scope;
    std::size_t rows = canon_table->tuple_count();
    std::vector<std::vector<Int>> tmp(rows, std::vector<Int>(r));
    for (std::size_t row = 0; row < rows; ++row) {
        const Int* p = canon_table->row(row);
        for (std::size_t i = 0; i < r; ++i) tmp[row][i] = p[col[i]];
    }
    std::sort(tmp.begin(), tmp.end());
    t->tuples.reserve(rows * r);
    for (auto& row : tmp)
        t->tuples.insert(t->tuples.end(), row.begin(), row.end());
    return t;
}

} // namespace

TabOutcome TabCaches::lookup_or_generate(const Expr& e, const VarStore& store,
                                         const TabLimits& limits, bool nested_size_cap) {
    Expr norm = normalize(e);
    Canonical canon = canonicalize(norm, store);
    CacheKey key;
    key.expr = canon.printed;
    for (int v : canon.var_order) key.domains.push_back(store[v].domain);

    if (auto it = failures_.find(key); it != failures_.end()) {
        TabOutcome out{it->second.status};
        out.nodes_searched = 0;
        out.progress_c = it->second.c;
        out.space = it->second.a;
        out.from_cache = true;
        return out;
    }
    std::vector<int> want_scope = scope_of(norm);
    if (auto it = tables_.find(key); it != tables_.end()) {
        TabOutcome out{TabOutcome::Status::CacheHit};
        out.table = remap_table(it->second, canon.var_order, want_scope);
        out.space = assignment_space(key.domains);
        return out;
    }

    TabOutcome out = generate_table(norm, store, limits, nested_size_cap);
    if (out.status == TabOutcome::Status::Success) {
        // store in canonical column order
        auto canon_table = remap_table(out.table, want_scope, canon.var_order);
        auto mut = std::const_pointer_cast<Table>(canon_table);
        mut->id = static_cast<int>(canonical_.size());
        canonical_.push_back(canon_table);
        tables_[key] = canon_table;
        out.table = remap_table(canon_table, canon.var_order, want_scope);
    } else if (out.status != TabOutcome::Status::RejectedNestedSize) {
        failures_[key] = {out.status, out.nodes_searched, out.progress_c, out.space};
    }
    return out;
}

void apply_tabulation(Model& m, const Candidate& cand, const TablePtr& table, int aux_var) {
    switch (cand.kind) {
        case CandidateKind::TopLevel: {
            std::vector<int> idx = cand.group;
            std::sort(idx.begin(), idx.end());
            for (std::size_t k = idx.size(); k-- > 0;)
                m.constraints.erase(m.constraints.begin() + idx[k]);
            m.constraints.push_back(mk::table_ctr(table));
            return;
        }
        case CandidateKind::NestedBool: {
            std::function<Expr(const Expr&, std::size_t)> repl =
                [&](const Expr& node, std::size_t depth) -> Expr {
                if (depth == cand.path.size()) return mk::table_ctr(table);
                ExprNode n = *node;
                n.children[cand.path[depth]] =
                    repl(node->children[cand.path[depth]], depth + 1);
                return std::make_shared<const ExprNode>(std::move(n));
            };
            m.constraints[cand.constraint_index] =
                repl(m.constraints[cand.constraint_index], 0);
            return;
        }
        case CandidateKind::IntegerExpr: {
            assert(aux_var >= 0);
            Expr aux = mk::var(aux_var, m.store[aux_var].name);
            std::function<Expr(const Expr&, std::size_t)> repl =
                [&](const Expr& node, std::size_t depth) -> Expr {
                if (depth == cand.path.size()) return aux;
                ExprNode n = *node;
                n.children[cand.path[depth]] =
                    repl(node->children[cand.path[depth]], depth + 1);
                return std::make_shared<const ExprNode>(std::move(n));
            };
            m.constraints[cand.constraint_index] =
                repl(m.constraints[cand.constraint_index], 0);
            m.constraints.push_back(mk::table_ctr(table));
            return;
        }
    }
}

namespace {

struct PassState {
    Model m;
    const HeuristicConfig& cfg;
    const TabLimits& limits;
    TabCaches caches;
    std::vector<TabulationReport> reports;
    std::map<std::string, int> aux_cache;  // printed normalized expr -> aux var
    int aux_counter = 0;

    PassState(const Model& model, const HeuristicConfig& c, const TabLimits& l)
        : m(model), cfg(c), limits(l) {}

    TabulationReport make_report(const Candidate& cand, const TabOutcome& out) {
        TabulationReport r;
        r.heuristic = heuristic_name(cand);
        r.kind = cand.kind;
        r.target = print_infix(cand.target);
        r.outcome = out.status;
        r.nodes = out.nodes_searched;
        r.progress_c = out.progress_c;
        r.space = out.space;
        r.cache_hit = out.status == TabOutcome::Status::CacheHit || out.from_cache;
        if (out.table) {
            r.tuples = static_cast<Int>(out.table->tuple_count());
            r.table_id = out.table->id;
        }
        return r;
    }

    // ---- phase 1: top-level constraints ----

    void top_level_phase() {
        // group indices of live non-table constraints by variable set
        std::map<std::vector<int>, std::vector<int>> groups;
        for (std::size_t i = 0; i < m.constraints.size(); ++i) {
            if (m.constraints[i]->kind == Kind::TableCtr) continue;
            auto sc = scope_of(m.constraints[i]);
            std::sort(sc.begin(), sc.end());
            if (sc.empty()) continue;
            groups[sc].push_back(static_cast<int>(i));
        }
        std::set<const std::vector<int>*> attempted;
        std::vector<bool> removed(m.constraints.size(), false);
        std::vector<std::pair<std::vector<int>, TablePtr>> replacements;

        for (std::size_t i = 0; i < m.constraints.size(); ++i) {
            if (removed[i]) continue;
            const Expr& c = m.constraints[i];
            if (c->kind == Kind::TableCtr) continue;
            auto sc = scope_of(c);
            std::sort(sc.begin(), sc.end());
            auto git = groups.find(sc);
            bool group_failed = false;
            if (git != groups.end() && git->second.size() >= 2) {
                if (!attempted.count(&git->second)) {
                    attempted.insert(&git->second);
                    Candidate cand;
                    cand.kind = CandidateKind::TopLevel;
                    cand.heuristic = Heuristic::IdenticalScopes;
                    cand.group = git->second;
                    std::vector<Expr> members;
                    for (int j : cand.group) members.push_back(m.constraints[j]);
                    cand.generator = mk::and_(std::move(members));
                    cand.target = cand.generator;
                    cand.scope = scope_of(cand.generator);
                    TabOutcome out = caches.lookup_or_generate(cand.generator, m.store,
                                                               limits, false);
                    reports.push_back(make_report(cand, out));
                    if (out.ok()) {
                        for (int j : cand.group) removed[j] = true;
                        replacements.push_back({cand.group, out.table});
                        continue;
                    }
                    group_failed = true;
                } else {
                    group_failed = true;  // attempted at the first member, failed
                }
            }
            (void)group_failed;
            // individual heuristics (after a failed group, members are
            // rescanned here at their own positions)
            Heuristic h;
            if (!top_level_trigger(c, m, cfg, static_cast<int>(i), h)) continue;
            Candidate cand;
            cand.kind = CandidateKind::TopLevel;
            cand.heuristic = h;
            cand.group = {static_cast<int>(i)};
            cand.generator = c;
            cand.target = c;
            cand.scope = scope_of(c);
            TabOutcome out = caches.lookup_or_generate(c, m.store, limits, false);
            reports.push_back(make_report(cand, out));
            if (out.ok()) {
                removed[i] = true;
                replacements.push_back({{static_cast<int>(i)}, out.table});
            }
        }

        std::vector<Expr> next;
        for (std::size_t i = 0; i < m.constraints.size(); ++i)
            if (!removed[i]) next.push_back(m.constraints[i]);
        for (auto& [group, table] : replacements) next.push_back(mk::table_ctr(table));
        m.constraints = std::move(next);
    }

    // ---- phase 2: nested Boolean expressions ----

    Expr nested_walk(const Expr& node, bool is_root, int ci) {
        if (!is_root && node->bool_typed && node->kind != Kind::Const &&
            node->kind != Kind::Var && node->kind != Kind::TableCtr) {
            Heuristic h;
            std::vector<Expr> partners;
            if (nested_trigger(node, m, cfg, ci, h, partners)) {
                Candidate cand;
                cand.kind = CandidateKind::NestedBool;
                cand.heuristic = h;
                cand.constraint_index = ci;
                cand.target = node;
                if (partners.empty()) {
                    cand.generator = node;
                } else {
                    std::vector<Expr> cs{node};
                    for (auto& p : partners) cs.push_back(p);
                    cand.generator = mk::and_(std::move(cs));
                }
                cand.scope = scope_of(node);
                TabOutcome out =
                    caches.lookup_or_generate(cand.generator, m.store, limits, true);
                reports.push_back(make_report(cand, out));
                if (out.ok()) return mk::table_ctr(out.table);
                // fall through: parts of a failed candidate may be tabulated
            }
        }
        if (node->children.empty()) return node;
        std::vector<Expr> cs;
        cs.reserve(node->children.size());
        bool changed = false;
        for (const auto& c : node->children) {
            Expr r = nested_walk(c, false, ci);
            changed |= r.get() != c.get();
            cs.push_back(std::move(r));
        }
        if (!changed) return node;
        ExprNode n = *node;
        n.children = std::move(cs);
        return std::make_shared<const ExprNode>(std::move(n));
    }

    void nested_phase() {
        for (std::size_t i = 0; i < m.constraints.size(); ++i)
            m.constraints[i] = nested_walk(m.constraints[i], true, static_cast<int>(i));
    }

    // ---- phase 3: integer expressions ----

    int fresh_aux(const Domain& dom) {
        std::string name;
        while (true) {
            name = "aux" + std::to_string(aux_counter++);
            bool clash = false;
            for (const auto& v : m.store.vars) clash |= !v.deleted && v.name == name;
            if (!clash) break;
        }
        int id = m.store.add(name, dom);
        m.store[id].is_aux = true;
        return id;
    }

    Expr integer_walk(const Expr& node, const Expr& parent, bool parent_is_root,
                      const Expr& root, int ci, std::vector<Expr>& new_tables) {
        if (considered_for_flattening(node, parent, parent_is_root)) {
            std::string key = print_prefix(normalize(node));
            if (auto it = aux_cache.find(key); it != aux_cache.end())
                return mk::var(it->second, m.store[it->second].name);
            Heuristic h;
            std::vector<Expr> partners;
            if (integer_trigger(node, root, m, cfg, ci, h, partners)) {
                Candidate cand;
                cand.kind = CandidateKind::IntegerExpr;
                cand.heuristic = h;
                cand.constraint_index = ci;
                cand.target = node;
                cand.scope = scope_of(node);
                Domain dom = aux_domain(node, m.store, limits.node_limit);
                if (!dom.empty()) {
                    int aux = fresh_aux(dom);
                    Expr aux_ref = mk::var(aux, m.store[aux].name);
                    std::vector<Expr> cs{mk::rel(Kind::Eq, aux_ref, node)};
                    for (auto& p : partners) cs.push_back(p);
                    cand.generator = cs.size() == 1 ? cs[0] : mk::and_(std::move(cs));
                    TabOutcome out =
                        caches.lookup_or_generate(cand.generator, m.store, limits, false);
                    auto rep = make_report(cand, out);
                    rep.aux_var = out.ok() ? aux : -1;
                    reports.push_back(rep);
                    if (out.ok()) {
                        aux_cache[key] = aux;
                        new_tables.push_back(mk::table_ctr(out.table));
                        return aux_ref;
                    }
                    // discard the unused auxiliary variable (always last)
                    m.store.vars.pop_back();
                    --aux_counter;
                }
            }
        }
        if (node->children.empty()) return node;
        std::vector<Expr> cs;
        cs.reserve(node->children.size());
        bool changed = false;
        bool node_is_root = node.get() == root.get();
        for (const auto& c : node->children) {
            Expr r = integer_walk(c, node, node_is_root, root, ci, new_tables);
            changed |= r.get() != c.get();
            cs.push_back(std::move(r));
        }
        if (!changed) return node;
        ExprNode n = *node;
        n.children = std::move(cs);
        return std::make_shared<const ExprNode>(std::move(n));
    }

    void integer_phase() {
        std::vector<Expr> new_tables;
        std::size_t n = m.constraints.size();
        for (std::size_t i = 0; i < n; ++i)
            m.constraints[i] = integer_walk(m.constraints[i], m.constraints[i], false,
                                            m.constraints[i], static_cast<int>(i),
                                            new_tables);
        for (auto& t : new_tables) m.constraints.push_back(std::move(t));
    }
};

} // namespace

TabResult tabulate_pass(const Model& m, const HeuristicConfig& cfg, const TabLimits& limits) {
    PassState state(m, cfg, limits);
    if (!state.m.proven_unsat) {
        state.top_level_phase();
        state.nested_phase();
        state.integer_phase();
    }
    TabResult result;
    result.model = std::move(state.m);
    result.reports = std::move(state.reports);
    result.tables = state.caches.canonical_tables();
    return result;
}

} // namespace retab
