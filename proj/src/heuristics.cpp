#include "retab/heuristics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "retab/eval.hpp"
#include "retab/print.hpp"
#include "retab/simplify.hpp"
#include "retab/table.hpp"

namespace retab {

namespace {

std::vector<int> sorted_scope(const Expr& e) {
    auto s = scope_of(e);
    std::sort(s.begin(), s.end());
    return s;
}

bool shares_var(const std::vector<int>& a, const std::vector<int>& b) {
    // both sorted
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

} // namespace

std::string heuristic_name(const Candidate& c) {
    std::string base;
    switch (c.heuristic) {
        case Heuristic::IdenticalScopes: base = "IdenticalScopes"; break;
        case Heuristic::DuplicateVariables: base = "DuplicateVariables"; break;
        case Heuristic::LargeAST: base = "LargeAST"; break;
        case Heuristic::WeakPropagation: base = "WeakPropagation"; break;
    }
    switch (c.kind) {
        case CandidateKind::TopLevel: return base;
        case CandidateKind::NestedBool: return base + "Nested";
        case CandidateKind::IntegerExpr: return base + "Integer";
    }
    return base;
}

Strength gac_estimate(const Expr& e, const VarStore& store) {
    switch (e->kind) {
        case Kind::Const:
        case Kind::Var:
            return Strength::Strong;
        case Kind::TableCtr:
            return Strength::Strong;
        case Kind::Product:
        case Kind::Div:
        case Kind::Mod:
        case Kind::Abs:
        case Kind::Neg:
            return Strength::Weak;
        case Kind::Sum: {
            for (const auto& c : e->children) {
                if (gac_estimate(c, store) == Strength::Weak) return Strength::Weak;
                if (value_interval(c, store).width() > 1) return Strength::Weak;
            }
            return Strength::Strong;
        }
        case Kind::Element: {
            // strong only for a plain element: constant/variable entries
            // indexed by a variable
            if (e->children.back()->kind != Kind::Var) return Strength::Weak;
            for (std::size_t i = 0; i + 1 < e->children.size(); ++i) {
                Kind k = e->children[i]->kind;
                if (k != Kind::Const && k != Kind::Var) return Strength::Weak;
            }
            return Strength::Strong;
        }
        default: {
            for (const auto& c : e->children)
                if (gac_estimate(c, store) == Strength::Weak) return Strength::Weak;
            return Strength::Strong;
        }
    }
}

namespace {

struct TopLevelInfo {
    std::vector<std::vector<int>> scopes;     // sorted
    std::vector<Strength> strengths;

    explicit TopLevelInfo(const Model& m) {
        scopes.reserve(m.constraints.size());
        strengths.reserve(m.constraints.size());
        for (const auto& c : m.constraints) {
            scopes.push_back(sorted_scope(c));
            strengths.push_back(gac_estimate(c, m.store));
        }
    }
};

bool duplicate_vars_fire(const Expr& e, const HeuristicConfig& cfg) {
    auto occ = count_occurrences(e);
    if (occ.size() > static_cast<std::size_t>(cfg.max_distinct_vars)) return false;
    for (auto& [v, n] : occ)
        if (n >= 2) return true;
    return false;
}

bool large_ast_fire(const Expr& e, const HeuristicConfig& cfg) {
    std::size_t distinct = scope_of(e).size();
    return count_nodes(e) > cfg.large_ast_factor * static_cast<long>(distinct);
}

bool weak_prop_fire(const Expr& e, const Model& m, const HeuristicConfig& cfg,
                    const TopLevelInfo& info, int self_index) {
    std::vector<int> sc = sorted_scope(e);
    if (sc.empty() || sc.size() > static_cast<std::size_t>(cfg.max_distinct_vars))
        return false;
    if (gac_estimate(e, m.store) != Strength::Weak) return false;
    for (std::size_t j = 0; j < m.constraints.size(); ++j) {
        if (static_cast<int>(j) == self_index) continue;
        if (info.strengths[j] == Strength::Strong && shares_var(sc, info.scopes[j]))
            return true;
    }
    return false;
}

} // namespace

bool top_level_trigger(const Expr& c, const Model& m, const HeuristicConfig& cfg,
                       int self_index, Heuristic& out) {
    if (duplicate_vars_fire(c, cfg)) {
        out = Heuristic::DuplicateVariables;
        return true;
    }
    if (large_ast_fire(c, cfg)) {
        out = Heuristic::LargeAST;
        return true;
    }
    TopLevelInfo info(m);
    if (weak_prop_fire(c, m, cfg, info, self_index)) {
        out = Heuristic::WeakPropagation;
        return true;
    }
    return false;
}

std::vector<Candidate> scan_top_level(const Model& m, const HeuristicConfig& cfg) {
    TopLevelInfo info(m);
    std::map<std::vector<int>, std::vector<int>> groups;
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        if (m.constraints[i]->kind == Kind::TableCtr) continue;
        if (info.scopes[i].empty()) continue;
        groups[info.scopes[i]].push_back(static_cast<int>(i));
    }
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        if (m.constraints[i]->kind == Kind::TableCtr) continue;
        auto git = groups.find(info.scopes[i]);
        bool grouped = git != groups.end() && git->second.size() >= 2;
        if (grouped) {
            if (git->second.front() != static_cast<int>(i)) continue;
            Candidate cand;
            cand.kind = CandidateKind::TopLevel;
            cand.heuristic = Heuristic::IdenticalScopes;
            cand.group = git->second;
            std::vector<Expr> members;
            for (int j : cand.group) members.push_back(m.constraints[j]);
            cand.generator = mk::and_(std::move(members));
            cand.target = m.constraints[i];
            cand.scope = scope_of(cand.generator);
            out.push_back(std::move(cand));
            continue;
        }
        const Expr& c = m.constraints[i];
        Heuristic h;
        if (duplicate_vars_fire(c, cfg)) h = Heuristic::DuplicateVariables;
        else if (large_ast_fire(c, cfg)) h = Heuristic::LargeAST;
        else if (weak_prop_fire(c, m, cfg, info, static_cast<int>(i))) h = Heuristic::WeakPropagation;
        else continue;
        Candidate cand;
        cand.kind = CandidateKind::TopLevel;
        cand.heuristic = h;
        cand.group = {static_cast<int>(i)};
        cand.generator = c;
        cand.target = c;
        cand.scope = scope_of(c);
        out.push_back(std::move(cand));
    }
    return out;
}

bool nested_trigger(const Expr& c1, const Model& m, const HeuristicConfig& cfg,
                    int containing_index, Heuristic& out,
                    std::vector<Expr>& same_scope_ctrs) {
    TopLevelInfo info(m);
    std::vector<int> sc = sorted_scope(c1);
    same_scope_ctrs.clear();
    if (!sc.empty()) {
        for (std::size_t j = 0; j < m.constraints.size(); ++j) {
            if (info.scopes[j] == sc && !contains_subexpr(m.constraints[j], c1))
                same_scope_ctrs.push_back(m.constraints[j]);
        }
    }
    if (!same_scope_ctrs.empty()) {
        out = Heuristic::IdenticalScopes;
        return true;
    }
    if (duplicate_vars_fire(c1, cfg)) {
        out = Heuristic::DuplicateVariables;
        return true;
    }
    if (large_ast_fire(c1, cfg)) {
        out = Heuristic::LargeAST;
        return true;
    }
    if (weak_prop_fire(c1, m, cfg, info, containing_index)) {
        out = Heuristic::WeakPropagation;
        return true;
    }
    return false;
}

namespace {

void scan_nested_walk(const Expr& node, const Expr& root, int ci, const Model& m,
                      const HeuristicConfig& cfg, std::vector<int>& path,
                      std::vector<Candidate>& out) {
    if (node.get() != root.get() && node->bool_typed && node->kind != Kind::Const &&
        node->kind != Kind::Var) {
        Heuristic h;
        std::vector<Expr> partners;
        if (nested_trigger(node, m, cfg, ci, h, partners)) {
            Candidate cand;
            cand.kind = CandidateKind::NestedBool;
            cand.heuristic = h;
            cand.constraint_index = ci;
            cand.path = path;
            cand.target = node;
            if (partners.empty()) {
                cand.generator = node;
            } else {
                std::vector<Expr> cs{node};
                for (auto& p : partners) cs.push_back(p);
                cand.generator = mk::and_(std::move(cs));
            }
            cand.scope = scope_of(node);
            out.push_back(std::move(cand));
            return;  // descendants of a candidate are not scanned
        }
    }
    for (std::size_t i = 0; i < node->children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        scan_nested_walk(node->children[i], root, ci, m, cfg, path, out);
        path.pop_back();
    }
}

} // namespace

std::vector<Candidate> scan_nested_bool(const Model& m, const HeuristicConfig& cfg) {
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        std::vector<int> path;
        scan_nested_walk(m.constraints[i], m.constraints[i], static_cast<int>(i), m,
                         cfg, path, out);
    }
    return out;
}

bool considered_for_flattening(const Expr& e, const Expr& parent, bool parent_is_root) {
    if (e->bool_typed) return false;
    if (e->kind == Kind::Const || e->kind == Kind::Var) return false;
    // a sum sitting directly under a top-level comparison is not extracted
    if (e->kind == Kind::Sum && parent_is_root) {
        Kind pk = parent->kind;
        if (pk == Kind::Eq || pk == Kind::Neq || pk == Kind::Lt || pk == Kind::Leq ||
            pk == Kind::Gt || pk == Kind::Geq)
            return false;
    }
    return true;
}

bool integer_trigger(const Expr& e1, const Expr& containing, const Model& m,
                     const HeuristicConfig& cfg, int containing_index,
                     Heuristic& out, std::vector<Expr>& same_scope_ctrs) {
    TopLevelInfo info(m);
    std::vector<int> sc = sorted_scope(e1);
    same_scope_ctrs.clear();

    // IdenticalScopes(Integer): e1 has more than one variable and matches the
    // scope of a top-level constraint not containing it
    if (sc.size() > 1) {
        for (std::size_t j = 0; j < m.constraints.size(); ++j) {
            if (info.scopes[j] == sc && !contains_subexpr(m.constraints[j], e1))
                same_scope_ctrs.push_back(m.constraints[j]);
        }
        if (!same_scope_ctrs.empty()) {
            out = Heuristic::IdenticalScopes;
            return true;
        }
    }

    // c_temp = (a_temp = e1), over a temporary store entry covering e1's range
    VarStore tmp = m.store;
    Interval iv = value_interval(e1, m.store);
    int aid = tmp.add("_atemp", Domain(std::vector<Int>{iv.lo, iv.hi}));
    Expr atemp = mk::var(aid, "_atemp");
    Expr c_temp = mk::rel(Kind::Eq, atemp, e1);

    auto occ = count_occurrences(c_temp);
    std::size_t distinct = occ.size();
    if (distinct <= static_cast<std::size_t>(cfg.max_distinct_vars)) {
        for (auto& [v, n] : occ) {
            if (n >= 2) {
                out = Heuristic::DuplicateVariables;
                return true;
            }
        }
    }
    if (count_nodes(c_temp) > cfg.large_ast_factor * static_cast<long>(distinct)) {
        out = Heuristic::LargeAST;
        return true;
    }

    if (gac_estimate(mk::rel(Kind::Eq, atemp, e1), tmp) == Strength::Weak &&
        sc.size() <= static_cast<std::size_t>(cfg.max_distinct_vars)) {
        // (a) the containing constraint becomes strong once e1 is replaced
        std::function<Expr(const Expr&)> repl = [&](const Expr& n) -> Expr {
            if (n.get() == e1.get()) return atemp;
            if (n->children.empty()) return n;
            std::vector<Expr> cs;
            cs.reserve(n->children.size());
            bool changed = false;
            for (const auto& c : n->children) {
                Expr r = repl(c);
                changed |= r.get() != c.get();
                cs.push_back(std::move(r));
            }
            if (!changed) return n;
            ExprNode nn = *n;
            nn.children = std::move(cs);
            return std::make_shared<const ExprNode>(std::move(nn));
        };
        if (gac_estimate(repl(containing), tmp) == Strength::Strong) {
            out = Heuristic::WeakPropagation;
            return true;
        }
        // (b) c_temp itself triggers top-level WeakPropagation
        for (std::size_t j = 0; j < m.constraints.size(); ++j) {
            if (static_cast<int>(j) == containing_index) continue;
            if (info.strengths[j] == Strength::Strong && shares_var(sc, info.scopes[j])) {
                out = Heuristic::WeakPropagation;
                return true;
            }
        }
    }
    return false;
}

namespace {

void scan_integer_walk(const Expr& node, const Expr& parent, bool parent_is_root,
                       const Expr& root, int ci, const Model& m,
                       const HeuristicConfig& cfg, std::vector<int>& path,
                       std::set<std::string>& seen, std::vector<Candidate>& out) {
    if (considered_for_flattening(node, parent, parent_is_root)) {
        std::string key = print_prefix(node);
        if (seen.count(key)) return;  // replaced from the auxiliary cache
        Heuristic h;
        std::vector<Expr> partners;
        if (integer_trigger(node, root, m, cfg, ci, h, partners)) {
            seen.insert(key);
            Candidate cand;
            cand.kind = CandidateKind::IntegerExpr;
            cand.heuristic = h;
            cand.constraint_index = ci;
            cand.path = path;
            cand.target = node;
            cand.generator = node;  // the pass forms aux = target
            if (!partners.empty()) {
                std::vector<Expr> cs{node};
                for (auto& p : partners) cs.push_back(p);
                cand.generator = mk::and_(std::move(cs));  // marker, see pass
            }
            cand.scope = scope_of(node);
            out.push_back(std::move(cand));
            return;
        }
    }
    for (std::size_t i = 0; i < node->children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        scan_integer_walk(node->children[i], node, node.get() == root.get(), root, ci,
                          m, cfg, path, seen, out);
        path.pop_back();
    }
}

} // namespace

std::vector<Candidate> scan_integer_exprs(const Model& m, const HeuristicConfig& cfg) {
    std::vector<Candidate> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < m.constraints.size(); ++i) {
        std::vector<int> path;
        scan_integer_walk(m.constraints[i], m.constraints[i], true, m.constraints[i],
                          static_cast<int>(i), m, cfg, path, seen, out);
    }
    return out;
}

Domain aux_domain(const Expr& e, const VarStore& store, Int space_limit) {
    std::vector<int> sc = scope_of(e);
    Int space = 1;
    bool overflow = false;
    for (int v : sc) {
        Int sz = static_cast<Int>(store[v].domain.size());
        if (space > space_limit / std::max<Int>(sz, 1) + 1) overflow = true;
        space *= std::max<Int>(sz, 1);
        if (space > space_limit) overflow = true;
    }
    if (!overflow && space <= space_limit) {
        std::set<Int> vals;
        std::vector<Int> assign(store.size(), 0);
        std::function<void(std::size_t)> rec = [&](std::size_t k) {
            if (k == sc.size()) {
                auto v = eval_int(e, assign);
                if (v) vals.insert(*v);
                return;
            }
            for (Int val : store[sc[k]].domain.values()) {
                assign[sc[k]] = val;
                rec(k + 1);
            }
        };
        rec(0);
        return Domain(std::vector<Int>(vals.begin(), vals.end()));
    }
    Interval iv = value_interval(e, store);
    return Domain::range(iv.lo, iv.hi);
}

} // namespace retab
