#include <catch2/catch_amalgamated.hpp>

#include "retab/pipeline.hpp"
#include "retab/print.hpp"
#include "retab/simplify.hpp"
#include "support/oracle.hpp"

using namespace retab;
using namespace retab::testutil;

namespace {

std::string fx(const std::string& name) {
    return std::string(RETAB_FIXTURES) + "/" + name;
}

Model load(const std::string& model, const std::string& param = "") {
    return compile_model(load_model_file(fx(model)),
                         load_param_file(param.empty() ? "" : fx(param)));
}

// brute-force tuple set of e over the full domain product
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

std::vector<std::vector<Int>> table_rows(const Table& t) {
    std::vector<std::vector<Int>> out;
    for (std::size_t r = 0; r < t.tuple_count(); ++r)
        out.push_back(std::vector<Int>(t.row(r), t.row(r) + t.arity()));
    return out;
}

} // namespace

TEST_CASE("assignment space saturates", "[tabulate]") {
    CHECK(assignment_space({Domain::range(0, 3), Domain::range(0, 3)}) == 16);
    CHECK(assignment_space({Domain::singleton(5)}) == 1);
    CHECK(assignment_space({Domain::range(0, 15), Domain::range(0, 15)}) == 256);
    std::vector<Domain> huge(12, Domain::range(0, 99999));
    CHECK(assignment_space(huge) == INT64_MAX);
}

TEST_CASE("position index ranks the lexicographic frontier", "[tabulate]") {
    std::vector<Domain> doms{Domain::range(0, 3), Domain::range(0, 3)};
    CHECK(position_index({}, doms) == 0);
    CHECK(position_index({2}, doms) == 8);
    CHECK(position_index({3, 3}, doms) == 15);
    // non-contiguous domains are mapped through value ranks
    std::vector<Domain> holes{Domain(std::vector<Int>{2, 5, 9}),
                              Domain(std::vector<Int>{1, 4})};
    CHECK(position_index({5}, holes) == 2);
    CHECK(position_index({9, 4}, holes) == 5);
    CHECK_THROWS(position_index({3}, holes));
}

TEST_CASE("knight move table matches the worked example", "[tabulate]") {
    VarStore store;
    int t0 = store.add("tour0", Domain::range(0, 15));
    int t1 = store.add("tour1", Domain::range(0, 15));
    Expr e = normalize(knight_move(t0, "tour0", t1, "tour1", 4));
    TabOutcome out = generate_table(e, store, {}, false);
    REQUIRE(out.status == TabOutcome::Status::Success);
    auto rows = table_rows(*out.table);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == std::vector<Int>{0, 6});
    CHECK(rows[1] == std::vector<Int>{0, 9});
    CHECK(rows == brute_tuples(e, store));
    CHECK(std::is_sorted(rows.begin(), rows.end()));
    // 16 first-level nodes plus 256 leaves
    CHECK(out.nodes_searched == 272);
}

TEST_CASE("an unsatisfiable expression yields an empty table", "[tabulate]") {
    VarStore store;
    int x = store.add("x", Domain::range(0, 3));
    int y = store.add("y", Domain::range(0, 3));
    Expr e = normalize(mk::and_({mk::rel(Kind::Lt, mk::var(x, "x"), mk::var(y, "y")),
                                 mk::rel(Kind::Lt, mk::var(y, "y"), mk::var(x, "x"))}));
    TabOutcome out = generate_table(e, store, {}, false);
    REQUIRE(out.status == TabOutcome::Status::Success);
    CHECK(out.table->tuple_count() == 0);
}

TEST_CASE("late satisfying tuples fail the progress check", "[tabulate]") {
    // five variables over 1..16, satisfying assignments concentrated at the
    // top of the space: C/A stays far behind nodeCount/nodeLimit
    VarStore store;
    std::vector<Expr> xs;
    std::vector<Int> ones;
    for (int i = 0; i < 5; ++i) {
        int id = store.add("x" + std::to_string(i + 1), Domain::range(1, 16));
        xs.push_back(mk::var(id, store[id].name));
        ones.push_back(1);
    }
    Expr e = normalize(mk::rel(Kind::Geq, mk::sum(std::move(xs), std::move(ones), 0),
                               mk::int_const(76)));
    TabLimits limits;
    TabOutcome out = generate_table(e, store, limits, false);
    REQUIRE(out.status == TabOutcome::Status::AbandonedProgress);
    CHECK(out.nodes_searched == 1000);  // the first checkpoint
    using U = unsigned __int128;
    CHECK(U(out.progress_c) * U(limits.node_limit) <
          U(out.nodes_searched) * U(out.space));

    // with a 100x budget the same enumeration completes
    TabLimits big;
    big.node_limit = limits.node_limit * 100;
    TabOutcome done = generate_table(e, store, big, false);
    REQUIRE(done.status == TabOutcome::Status::Success);
    CHECK(done.table->tuple_count() == 126);  // C(9,5) by symmetry
    CHECK(done.table->tuple_count() == brute_tuples(e, store).size());
}

TEST_CASE("nested size cap rejects large spaces outright", "[tabulate]") {
    VarStore store;
    int x = store.add("x", Domain::range(0, 400));
    int y = store.add("y", Domain::range(0, 400));
    Expr e = normalize(mk::rel(Kind::Eq, mk::var(x, "x"), mk::var(y, "y")));
    TabOutcome out = generate_table(e, store, {}, true);
    CHECK(out.status == TabOutcome::Status::RejectedNestedSize);
    CHECK(out.space == 401 * 401);
    CHECK(out.nodes_searched == 0);
}

TEST_CASE("cache hits avoid regeneration across renamings", "[cache]") {
    VarStore store;
    int a = store.add("a", Domain::range(0, 2));
    int b = store.add("b", Domain::range(0, 2));
    int c = store.add("c", Domain::range(0, 2));
    int d = store.add("d", Domain::range(0, 2));
    TabCaches caches;
    Expr e1 = mk::rel(Kind::Neq, mk::add(mk::var(a, "a"), mk::var(b, "b")),
                      mk::int_const(3));
    TabOutcome first = caches.lookup_or_generate(e1, store, {}, false);
    REQUIRE(first.status == TabOutcome::Status::Success);
    CHECK(first.nodes_searched > 0);

    Expr e2 = mk::rel(Kind::Neq, mk::add(mk::var(c, "c"), mk::var(d, "d")),
                      mk::int_const(3));
    TabOutcome second = caches.lookup_or_generate(e2, store, {}, false);
    CHECK(second.status == TabOutcome::Status::CacheHit);
    CHECK(second.nodes_searched == 0);
    CHECK(second.table->scope == std::vector<int>{c, d});
    CHECK(table_rows(*second.table) == table_rows(*first.table));

    // commutative reordering hits as well
    Expr e3 = mk::rel(Kind::Neq, mk::add(mk::var(b, "b"), mk::var(a, "a")),
                      mk::int_const(3));
    CHECK(caches.lookup_or_generate(e3, store, {}, false).status ==
          TabOutcome::Status::CacheHit);
    CHECK(caches.canonical_tables().size() == 1);

    // different domains are a different key
    int w = store.add("w", Domain::range(0, 1));
    Expr e4 = mk::rel(Kind::Neq, mk::add(mk::var(w, "w"), mk::var(a, "a")),
                      mk::int_const(3));
    CHECK(caches.lookup_or_generate(e4, store, {}, false).status ==
          TabOutcome::Status::Success);
}

TEST_CASE("failed attempts are replayed from the failure cache", "[cache]") {
    VarStore store;
    std::vector<Expr> xs;
    std::vector<Int> ones;
    for (int i = 0; i < 5; ++i) {
        int id = store.add("x" + std::to_string(i + 1), Domain::range(1, 16));
        xs.push_back(mk::var(id, store[id].name));
        ones.push_back(1);
    }
    Expr e = mk::rel(Kind::Geq, mk::sum(xs, ones, 0), mk::int_const(76));
    TabCaches caches;
    TabOutcome first = caches.lookup_or_generate(e, store, {}, false);
    REQUIRE(first.status == TabOutcome::Status::AbandonedProgress);
    CHECK_FALSE(first.from_cache);
    TabOutcome replay = caches.lookup_or_generate(e, store, {}, false);
    CHECK(replay.status == TabOutcome::Status::AbandonedProgress);
    CHECK(replay.from_cache);
    CHECK(replay.nodes_searched == 0);
}

TEST_CASE("top-level replacement swaps the group for one table", "[apply]") {
    Model m = load("killer_mini.model");
    auto cands = scan_top_level(m, {});
    REQUIRE(cands.size() == 1);
    TabCaches caches;
    TabOutcome out = caches.lookup_or_generate(cands[0].generator, m.store, {}, false);
    REQUIRE(out.status == TabOutcome::Status::Success);
    std::size_t before = m.constraints.size();
    apply_tabulation(m, cands[0], out.table);
    CHECK(m.constraints.size() == before - 1);
    CHECK(m.constraints.back()->kind == Kind::TableCtr);
    CHECK(m.constraints.back()->table->arity() == 3);
    CHECK(m.constraints.back()->table->tuple_count() == 6);
}

TEST_CASE("contradictory identical scopes give an empty table", "[apply]") {
    Model m = compile_model(
        parse_model("find x : int(0..3) find y : int(0..3) such that "
                    "x != y + 1, x = y + 1"),
        {});
    TabResult res = tabulate_pass(m, {}, {});
    REQUIRE(res.model.constraints.size() == 1);
    REQUIRE(res.model.constraints[0]->kind == Kind::TableCtr);
    CHECK(res.model.constraints[0]->table->tuple_count() == 0);
}

TEST_CASE("integer replacement introduces a defining table", "[apply]") {
    // tour1 mod 8 becomes aux0 with a top-level table over {tour1, aux0}
    Model m = compile_model(
        parse_model("find tour1 : int(0..600) find t2 : int(0..600) find t3 : int(0..600) "
                    "such that allDiff([tour1, t2, t3]), "
                    "(tour1 % 8 = t2 % 8) \\/ (tour1 % 8 = t3)"),
        {});
    TabResult res = tabulate_pass(m, {}, {});
    int aux_id = -1;
    for (int v = 0; v < res.model.store.size(); ++v)
        if (res.model.store[v].is_aux && aux_id < 0) aux_id = v;
    REQUIRE(aux_id >= 0);
    CHECK(res.model.store[aux_id].domain.values() ==
          std::vector<Int>{0, 1, 2, 3, 4, 5, 6, 7});
    bool found = false;
    for (const auto& c : res.model.constraints) {
        if (c->kind != Kind::TableCtr) continue;
        if (c->table->scope.size() == 2 && c->table->scope[1] == aux_id) {
            found = true;
            CHECK(c->table->tuple_count() == 601);
        }
    }
    CHECK(found);
}

TEST_CASE("knights tour pass tabulates every move constraint", "[pass]") {
    Model m = load("knights_seq.model", "n4.param");
    TabResult res = tabulate_pass(m, {}, {});
    int tables = 0, alldiffs = 0, other = 0;
    for (const auto& c : res.model.constraints) {
        if (c->kind == Kind::TableCtr) {
            ++tables;
            CHECK(c->table->arity() == 2);
        } else if (c->kind == Kind::AllDiff) {
            ++alldiffs;
        } else {
            ++other;
        }
    }
    CHECK(tables == 14);
    CHECK(alldiffs == 1);
    CHECK(other == 0);
    for (const auto& r : res.reports)
        CHECK(r.heuristic == "DuplicateVariables");
}

TEST_CASE("oversized killer cage is left intact", "[pass]") {
    Model m = load("killer_abandon.model");
    TabResult res = tabulate_pass(m, {}, {});
    bool abandoned5 = false, tabulated3 = false;
    for (const auto& r : res.reports) {
        if (r.outcome == TabOutcome::Status::AbandonedProgress) abandoned5 = true;
        if (r.outcome == TabOutcome::Status::Success && r.tuples > 0) tabulated3 = true;
    }
    CHECK(abandoned5);
    CHECK(tabulated3);
    // the 5-cell cage pair is still in the model, the 3-cell pair is a table
    int tables = 0, sums = 0;
    for (const auto& c : res.model.constraints) {
        if (c->kind == Kind::TableCtr) {
            ++tables;
            CHECK(c->table->arity() == 3);
        }
        if (c->kind == Kind::Leq || c->kind == Kind::Eq) ++sums;
    }
    CHECK(tables == 1);
    CHECK(sums >= 1);
}

TEST_CASE("models with no triggers are unchanged", "[pass]") {
    Model m = compile_model(
        parse_model("find x : int(0..5) find y : int(0..5) find z : int(0..5) "
                    "such that x < y, y < z"),
        {});
    TabResult res = tabulate_pass(m, {}, {});
    CHECK(res.reports.empty());
    REQUIRE(res.model.constraints.size() == m.constraints.size());
    for (std::size_t i = 0; i < m.constraints.size(); ++i)
        CHECK(structurally_equal(res.model.constraints[i], m.constraints[i]));
}

TEST_CASE("pass preserves solutions with aux projection", "[pass][property]") {
    for (auto [model, node_limit] :
         {std::pair{"nested_small.model", Int(100000)},
          std::pair{"integer_small.model", Int(100000)},
          std::pair{"sedf_mini.model", Int(100000)},
          std::pair{"auxcache_small.model", Int(1200)},
          std::pair{"killer_mini.model", Int(100000)},
          std::pair{"nested_is.model", Int(100000)}}) {
        INFO(model);
        Model m = load(model);
        TabLimits limits;
        limits.node_limit = node_limit;
        TabResult res = tabulate_pass(m, {}, limits);
        auto original = enumerate_solutions(m);
        auto tabbed = enumerate_solutions(res.model);
        auto keep = original_vars(m);
        std::set<std::vector<Int>> a, b;
        for (auto& s : original) a.insert(project(s, keep));
        for (auto& s : tabbed) b.insert(project(s, keep));
        CHECK(a == b);
        CHECK(tabbed.size() == b.size());  // aux values functionally determined
        CHECK(original.size() == a.size());
    }
}

TEST_CASE("generated tables always match brute force", "[pass][property]") {
    for (auto [model, param] : {std::pair{"killer_mini.model", ""},
                                std::pair{"largeast.model", ""},
                                std::pair{"nested_is.model", ""}}) {
        INFO(model);
        Model m = load(model, param ? param : "");
        auto top = scan_top_level(m, {});
        auto nested = scan_nested_bool(m, {});
        top.insert(top.end(), nested.begin(), nested.end());
        for (const auto& cand : top) {
            Expr gen = normalize(cand.generator);
            TabOutcome out = generate_table(gen, m.store, {}, false);
            if (out.status != TabOutcome::Status::Success) continue;
            CHECK(table_rows(*out.table) == brute_tuples(gen, m.store));
        }
    }
}
