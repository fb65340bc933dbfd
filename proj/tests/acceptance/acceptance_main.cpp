// Acceptance suite: one pass/fail line per criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "retab/pipeline.hpp"
#include "retab/print.hpp"
#include "retab/simplify.hpp"
#include "support/oracle.hpp"

using namespace retab;
using namespace retab::testutil;

namespace {

int failures = 0;

void report(int n, const std::string& label, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", n, label.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void run(int n, const std::string& label,
         const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    report(n, label, pass, detail);
}

std::string fx(const std::string& name) {
    return std::string(RETAB_FIXTURES) + "/" + name;
}

Model load(const std::string& model, const std::string& param = "") {
    return compile_model(load_model_file(fx(model)),
                         load_param_file(param.empty() ? "" : fx(param)));
}

std::vector<std::vector<Int>> rows_of(const Table& t) {
    std::vector<std::vector<Int>> out;
    for (std::size_t r = 0; r < t.tuple_count(); ++r)
        out.push_back(std::vector<Int>(t.row(r), t.row(r) + t.arity()));
    return out;
}

std::vector<std::vector<Int>> brute_tuples(const Expr& e, const VarStore& store) {
    std::vector<int> sc = scope_of(e);
    std::vector<std::vector<Int>> out;
    std::vector<Int> values(store.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == sc.size()) {
            if (eval_bool(e, values)) {
                std::vector<Int> row;
                for (int v : sc) row.push_back(values[v]);
                out.push_back(std::move(row));
            }
            return;
        }
        for (Int val : store[sc[k]].domain.values()) {
            values[sc[k]] = val;
            rec(k + 1);
        }
    };
    rec(0);
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criterion bodies ----

bool criterion1(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    Model m = instantiate(load_model_file(fx("knights_seq.model")),
                          load_param_file(fx("n4.param")));
    Expr move;
    for (const auto& c : m.constraints)
        if (c->kind == Kind::Or) { move = c; break; }
    if (!move) { detail = "no knight-move constraint found"; return false; }
    Expr norm = normalize(move);
    TabOutcome out = generate_table(norm, m.store, {}, false);
    if (out.status != TabOutcome::Status::Success) { detail = "generation failed"; return false; }
    auto rows = rows_of(*out.table);
    if (rows.size() < 2 || rows[0] != std::vector<Int>{0, 6} ||
        rows[1] != std::vector<Int>{0, 9}) {
        detail = "first tuples wrong";
        return false;
    }
    if (rows != brute_tuples(norm, m.store)) { detail = "tuple set mismatch"; return false; }
    double dt = seconds_since(t0);
    std::ostringstream d;
    d << rows.size() << " tuples, first 0 6 / 0 9, brute-force match, " << dt << "s";
    detail = d.str();
    return dt < 1.0;
}

bool criterion2(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    std::ostringstream d;

    // (a) knight-move constraints report DuplicateVariables
    {
        Model m = load("knights_seq.model", "n4.param");
        auto cands = scan_top_level(m, {});
        int dup = 0;
        for (const auto& c : cands)
            if (c.heuristic == Heuristic::DuplicateVariables) ++dup;
        if (dup != 14 || cands.size() != 14) { detail = "(a) knight triggers wrong"; return false; }
        d << "(a) 14xDuplicateVariables ";
    }
    // (b) killer clue reports IdenticalScopes and yields one arity-3 table
    {
        Model m = load("killer_mini.model");
        auto cands = scan_top_level(m, {});
        if (cands.size() != 1 || cands[0].heuristic != Heuristic::IdenticalScopes) {
            detail = "(b) clue trigger wrong";
            return false;
        }
        TabResult res = tabulate_pass(m, {}, {});
        int arity3 = 0;
        for (const auto& c : res.model.constraints)
            if (c->kind == Kind::TableCtr && c->table->arity() == 3) ++arity3;
        if (arity3 != 1) { detail = "(b) expected one arity-3 table"; return false; }
        d << "(b) IdenticalScopes+arity3 ";
    }
    // (c) langford shift constraints report WeakPropagation
    {
        Model m = load("langford.model", "l_3_3.param");
        auto cands = scan_top_level(m, {});
        int shifts = 0;
        for (const auto& c : cands) {
            if (c.target->kind != Kind::Eq) continue;
            if (c.heuristic != Heuristic::WeakPropagation) {
                detail = "(c) shift heuristic wrong";
                return false;
            }
            ++shifts;
        }
        if (shifts != 6) { detail = "(c) expected 6 shift candidates"; return false; }
        d << "(c) 6xWeakPropagation ";
    }
    // (d) two variables, >10 nodes, no duplicates or overlaps: LargeAST
    {
        Model m = load("largeast.model");
        auto cands = scan_top_level(m, {});
        if (cands.size() != 1 || cands[0].heuristic != Heuristic::LargeAST) {
            detail = "(d) LargeAST trigger wrong";
            return false;
        }
        d << "(d) LargeAST ";
    }
    // (e) peaceable attack constraints: WeakPropagation, one generation
    // search per equivalence class, the rest cache hits
    {
        Model m = load("peaceable.model", "p4.param");
        TabResult res = tabulate_pass(m, {}, {});
        int generated = 0, hits = 0, wrong = 0;
        for (const auto& r : res.reports) {
            if (r.heuristic != "WeakPropagation") continue;
            if (r.outcome == TabOutcome::Status::Success && !r.cache_hit) ++generated;
            else if (r.outcome == TabOutcome::Status::CacheHit) ++hits;
            else ++wrong;
        }
        if (generated != 1 || hits == 0 || wrong != 0) {
            std::ostringstream e;
            e << "(e) generated=" << generated << " hits=" << hits << " other=" << wrong;
            detail = e.str();
            return false;
        }
        d << "(e) 1 search + " << hits << " cache hits";
    }
    double dt = seconds_since(t0);
    d << ", " << dt << "s";
    detail = d.str();
    return dt < 5.0;
}

bool criterion3(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    struct Case { const char* model; const char* param; Int node_limit; };
    const Case cases[] = {
        {"langford.model", "l_2_2.param", 100000},
        {"langford.model", "l_3_2.param", 100000},
        {"langford.model", "l_4_2.param", 100000},
        {"knights_seq.model", "n4.param", 100000},
        {"knights_seq.model", "n5.param", 100000},
        {"coprime.model", "c3.param", 100000},
        {"coprime.model", "c4.param", 100000},
        {"coprime.model", "c5.param", 100000},
        {"peaceable.model", "p4.param", 100000},
        {"nested_small.model", "", 100000},
        {"integer_small.model", "", 100000},
        {"auxcache_small.model", "", 1200},
        {"sedf_mini.model", "", 100000},
    };
    std::ostringstream d;
    for (const auto& c : cases) {
        Model m = load(c.model, c.param ? c.param : "");
        TabLimits limits;
        limits.node_limit = c.node_limit;
        TabResult res = tabulate_pass(m, {}, limits);
        auto original = enumerate_solutions(m);
        auto tabbed = enumerate_solutions(res.model);
        auto keep = original_vars(m);
        std::set<std::vector<Int>> a, b;
        for (auto& s : original) a.insert(project(s, keep));
        for (auto& s : tabbed) b.insert(project(s, keep));
        if (a != b || tabbed.size() != b.size()) {
            detail = std::string("solution mismatch on ") + c.model + " " +
                     (c.param ? c.param : "");
            return false;
        }
        d << a.size() << " ";
    }
    double dt = seconds_since(t0);
    std::ostringstream out;
    out << "solution counts: " << d.str() << "(" << dt << "s)";
    detail = out.str();
    return dt < 60.0;
}

bool criterion4(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    Model m = load("progress5.model");
    TabLimits limits;
    TabResult res = tabulate_pass(m, {}, limits);
    const TabulationReport* abandoned = nullptr;
    for (const auto& r : res.reports)
        if (r.outcome == TabOutcome::Status::AbandonedProgress) abandoned = &r;
    if (!abandoned) { detail = "no AbandonedProgress report"; return false; }
    using U = unsigned __int128;
    if (!(U(abandoned->progress_c) * U(limits.node_limit) <
          U(abandoned->nodes) * U(abandoned->space))) {
        detail = "progress witness does not hold";
        return false;
    }
    // the model is unchanged
    if (res.model.constraints.size() != m.constraints.size()) {
        detail = "model changed";
        return false;
    }
    // with the limit raised 100x the same constraint tabulates
    Expr target;
    for (const auto& c : m.constraints)
        if (c->kind == Kind::Leq && scope_of(c).size() == 5) target = c;
    if (!target) { detail = "fixture constraint missing"; return false; }
    TabLimits big;
    big.node_limit = limits.node_limit * 100;
    TabOutcome out = generate_table(normalize(target), m.store, big, false);
    if (out.status != TabOutcome::Status::Success) { detail = "100x run failed"; return false; }
    if (rows_of(*out.table) != brute_tuples(normalize(target), m.store)) {
        detail = "tuples mismatch at 100x";
        return false;
    }
    double dt = seconds_since(t0);
    std::ostringstream d;
    d << "abandoned at node " << abandoned->nodes << " with C=" << abandoned->progress_c
      << " A=" << abandoned->space << "; completes at 100x with "
      << out.table->tuple_count() << " tuples (" << dt << "s)";
    detail = d.str();
    return dt < 10.0;
}

bool criterion5(std::string& detail) {
    std::mt19937 rng(57);
    for (int trial = 0; trial < 200; ++trial) {
        int arity = 2 + static_cast<int>(rng() % 3);
        std::vector<Domain> domains;
        Table t;
        for (int i = 0; i < arity; ++i) {
            Int lo = static_cast<Int>(rng() % 4);
            Int hi = lo + 1 + static_cast<Int>(rng() % 8);
            domains.push_back(Domain::range(lo, hi));
            t.scope.push_back(i);
        }
        std::vector<Int> row(arity);
        std::function<void(int)> rec = [&](int k) {
            if (k == arity) {
                if (rng() % 3 == 0) t.tuples.insert(t.tuples.end(), row.begin(), row.end());
                return;
            }
            for (Int v : domains[k].values()) {
                row[k] = v;
                rec(k + 1);
            }
        };
        rec(0);
        std::vector<Domain> reduced = domains;
        for (auto& dm : reduced) {
            std::vector<Int> keep;
            for (Int v : dm.values())
                if (rng() % 4 != 0) keep.push_back(v);
            if (!keep.empty()) dm = Domain(keep);
        }
        // reference filter
        std::vector<Domain> expect = reduced;
        bool expect_ok = true;
        bool changed = true;
        while (changed && expect_ok) {
            changed = false;
            for (int i = 0; i < arity && expect_ok; ++i) {
                std::vector<Int> keep;
                for (Int a : expect[i].values()) {
                    bool ok = false;
                    for (std::size_t r = 0; r < t.tuple_count() && !ok; ++r) {
                        const Int* tup = t.row(r);
                        if (tup[i] != a) continue;
                        ok = true;
                        for (int j = 0; j < arity; ++j) ok &= expect[j].contains(tup[j]);
                    }
                    if (ok) keep.push_back(a);
                }
                if (keep.size() != expect[i].size()) {
                    changed = true;
                    expect[i] = Domain(keep);
                    if (expect[i].empty()) expect_ok = false;
                }
            }
        }
        std::vector<Domain> mine = reduced;
        bool ok = propagate_table(t, mine);
        if (ok != expect_ok) { detail = "wipeout disagreement"; return false; }
        if (ok && mine != expect) { detail = "domain disagreement"; return false; }
    }
    detail = "200 random tables, exact agreement";
    return true;
}

bool criterion6(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    struct Case { const char* model; const char* param; bool optimize; };
    const Case classes[][2] = {
        {{"knights_seq.model", "n5.param", false}, {"knights_seq.model", "n6.param", false}},
        {{"langford.model", "l_7_2.param", false}, {"langford.model", "l_8_2.param", false}},
        {{"peaceable.model", "p5.param", true}, {"peaceable.model", "p6.param", true}},
    };
    std::ostringstream d;
    for (const auto& cls : classes) {
        bool strict = false;
        for (const auto& c : cls) {
            Model m = load(c.model, c.param);
            TabResult res = tabulate_pass(m, {}, {});
            SolveOptions opts;
            opts.mode = c.optimize ? SolveMode::Optimize : SolveMode::FirstSolution;
            opts.node_budget = 10'000'000;
            SearchStats before = solve(m, opts);
            SearchStats after = solve(res.model, opts);
            d << c.param << ": " << before.nodes << "->" << after.nodes << " ";
            if (after.nodes > before.nodes) {
                detail = d.str() + "— tabulated searched more nodes";
                return false;
            }
            if (after.nodes < before.nodes) strict = true;
        }
        if (!strict) {
            detail = d.str() + "— no strict improvement in class";
            return false;
        }
    }
    double dt = seconds_since(t0);
    d << "(" << dt << "s)";
    detail = d.str();
    return dt < 600.0;
}

bool criterion7(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    Model m = load("stilllife.model", "s4.param");
    TabResult res = tabulate_pass(m, {}, {});
    int is_ok = 0;
    for (const auto& r : res.reports) {
        if (r.heuristic != "IdenticalScopes") continue;
        if (r.outcome != TabOutcome::Status::Success &&
            r.outcome != TabOutcome::Status::CacheHit) {
            detail = "an IdenticalScopes candidate failed to tabulate";
            return false;
        }
        ++is_ok;
    }
    if (is_ok == 0) { detail = "no IdenticalScopes candidates"; return false; }
    SolveOptions opts;
    opts.mode = SolveMode::Optimize;
    SearchStats before = solve(m, opts);
    SearchStats after = solve(res.model, opts);
    double dt = seconds_since(t0);
    std::ostringstream d;
    d << is_ok << " pairs tabulated; nodes " << before.nodes << " vs " << after.nodes
      << ", objective " << before.best_objective.value_or(-1) << " vs "
      << after.best_objective.value_or(-1) << " (" << dt << "s)";
    detail = d.str();
    return before.nodes == after.nodes &&
           before.best_objective == after.best_objective;
}

bool criterion8(std::string& detail) {
    std::mt19937 rng(4242);
    // vars with varied domains; renamed twins permute both names and ids
    auto make_store = [&](const std::vector<int>& perm, std::vector<Domain> doms) {
        VarStore store;
        std::vector<std::string> names{"a", "b", "c", "d"};
        for (std::size_t i = 0; i < perm.size(); ++i)
            store.add(names[i] + "_" + std::to_string(perm[i]),
                      doms[static_cast<std::size_t>(perm[i])]);
        return store;
    };
    (void)make_store;

    // pair suite 1: commutative permutation + variable renaming
    for (int trial = 0; trial < 1000; ++trial) {
        VarStore s1;
        std::vector<Domain> doms;
        std::vector<int> ids;
        for (int i = 0; i < 4; ++i) {
            Domain d = Domain::range(-(static_cast<Int>(rng() % 3)),
                                     1 + static_cast<Int>(rng() % 4));
            doms.push_back(d);
            ids.push_back(s1.add("v" + std::to_string(i), d));
        }
        ExprGen gen(rng(), s1, ids);
        Expr e1 = normalize(gen.random_bool(3));

        // renaming: permutation of ids with fresh names, domains follow
        std::vector<int> perm{0, 1, 2, 3};
        std::shuffle(perm.begin(), perm.end(), rng);
        VarStore s2;
        for (int i = 0; i < 4; ++i)
            s2.add("w" + std::to_string(i), doms[static_cast<std::size_t>(perm[i])]);
        // var id i in s1 maps to position of perm value i in s2
        std::vector<int> to2(4);
        for (int i = 0; i < 4; ++i) to2[perm[i]] = i;
        std::function<Expr(const Expr&)> rebuild = [&](const Expr& e) -> Expr {
            if (e->kind == Kind::Var) {
                int nv = to2[e->var];
                return mk::var(nv, s2[nv].name, e->bool_typed);
            }
            if (e->children.empty()) return e;
            ExprNode n = *e;
            for (auto& c : n.children) c = rebuild(c);
            // random commutative shuffle
            bool comm = e->kind == Kind::And || e->kind == Kind::Or ||
                        e->kind == Kind::Eq || e->kind == Kind::Neq ||
                        e->kind == Kind::AllDiff || e->kind == Kind::Product ||
                        e->kind == Kind::Iff;
            if (comm) {
                std::vector<std::size_t> order(n.children.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                std::shuffle(order.begin(), order.end(), rng);
                std::vector<Expr> cs;
                for (std::size_t i : order) cs.push_back(n.children[i]);
                n.children = cs;
            }
            if (e->kind == Kind::Sum) {
                std::vector<std::size_t> order(n.children.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                std::shuffle(order.begin(), order.end(), rng);
                std::vector<Expr> cs;
                std::vector<Int> co;
                for (std::size_t i : order) {
                    cs.push_back(n.children[i]);
                    co.push_back(n.coeffs[i]);
                }
                n.children = cs;
                n.coeffs = co;
            }
            return std::make_shared<const ExprNode>(std::move(n));
        };
        Expr e2 = rebuild(e1);
        CacheKey k1 = cache_key(normalize(e1), s1);
        CacheKey k2 = cache_key(normalize(e2), s2);
        if (!(k1 == k2)) {
            detail = "renamed pair diverged at trial " + std::to_string(trial) +
                     ": " + k1.expr + " vs " + k2.expr;
            return false;
        }
    }

    // pair suite 2: unrelated expressions never collide while semantically
    // inequivalent (3 variables, brute-force check)
    VarStore s;
    std::vector<int> ids;
    for (int i = 0; i < 3; ++i) ids.push_back(s.add("x" + std::to_string(i), Domain::range(0, 2)));
    ExprGen gen(99, s, ids);
    int collisions = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Expr a = normalize(gen.random_bool(2));
        Expr b = normalize(gen.random_bool(2));
        CacheKey ka = cache_key(a, s);
        CacheKey kb = cache_key(b, s);
        if (ka == kb && !equivalent(a, b, s)) {
            ++collisions;
        }
    }
    if (collisions > 0) {
        detail = std::to_string(collisions) + " semantic collisions";
        return false;
    }
    detail = "1000 renamed pairs equal, 0 collisions among 1000 unrelated pairs";
    return true;
}

} // namespace

int main() {
    run(1, "worked-example fidelity (knight move table)", criterion1);
    run(2, "heuristic-trigger suite", criterion2);
    run(3, "semantic preservation", criterion3);
    run(4, "progress-check behaviour", criterion4);
    run(5, "GAC of table propagation", criterion5);
    run(6, "search-reduction direction", criterion6);
    run(7, "negative example (still life)", criterion7);
    run(8, "normal-form cache keys", criterion8);
    return failures == 0 ? 0 : 1;
}
