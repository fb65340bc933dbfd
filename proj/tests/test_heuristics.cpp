#include <catch2/catch_amalgamated.hpp>

#include "retab/heuristics.hpp"
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

} // namespace

TEST_CASE("gac estimate on the worked examples", "[estimate]") {
    VarStore store;
    std::vector<Expr> xs;
    for (int i = 0; i < 6; ++i) {
        int id = store.add("x" + std::to_string(i + 1), Domain::range(1, 3));
        xs.push_back(mk::var(id, store[id].name));
    }
    // allDiff over plain variables is strong
    CHECK(gac_estimate(mk::all_diff({xs[0], xs[1], xs[2]}), store) == Strength::Strong);
    // allDiff over differences of {1..3} variables is weak
    Expr diffs = mk::all_diff({mk::sub(xs[0], xs[1]), mk::sub(xs[2], xs[3]),
                               mk::sub(xs[4], xs[5])});
    CHECK(gac_estimate(diffs, store) == Strength::Weak);
    // a sum of Booleans compared with a constant is strong
    VarStore bools;
    std::vector<Expr> bs;
    std::vector<Int> ones;
    for (int i = 0; i < 4; ++i) {
        int id = bools.add("b" + std::to_string(i), Domain::boolean(), true);
        bs.push_back(mk::var(id, bools[id].name, true));
        ones.push_back(1);
    }
    Expr cmp = mk::rel(Kind::Eq, mk::sum(std::move(bs), std::move(ones), 0),
                       mk::int_const(2));
    CHECK(gac_estimate(cmp, bools) == Strength::Strong);
    // arithmetic is weak
    CHECK(gac_estimate(mk::rel(Kind::Eq, mk::mod(xs[0], mk::int_const(2)), xs[1]),
                       store) == Strength::Weak);
}

TEST_CASE("knight move constraints report DuplicateVariables", "[scan]") {
    Model m = load("knights_seq.model", "n4.param");
    auto cands = scan_top_level(m, {});
    int dup = 0;
    for (const auto& c : cands) {
        if (c.heuristic == Heuristic::DuplicateVariables) ++dup;
    }
    CHECK(dup == 14);  // every remaining knight-move constraint
    // the allDiff itself triggers nothing
    for (const auto& c : cands) CHECK(c.target->kind != Kind::AllDiff);
}

TEST_CASE("killer clue pair reports IdenticalScopes", "[scan]") {
    Model m = load("killer_mini.model");
    auto cands = scan_top_level(m, {});
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].heuristic == Heuristic::IdenticalScopes);
    CHECK(cands[0].group.size() == 2);
    CHECK(cands[0].scope.size() == 3);
}

TEST_CASE("langford shift constraints report WeakPropagation", "[scan]") {
    Model m = load("langford.model", "l_3_3.param");
    auto cands = scan_top_level(m, {});
    int shifts = 0;
    for (const auto& c : cands) {
        if (c.target->kind == Kind::Eq) {
            CHECK(c.heuristic == Heuristic::WeakPropagation);
            ++shifts;
        }
    }
    CHECK(shifts == 6);  // n*(k-1) shift constraints
}

TEST_CASE("two-variable expression with a large tree reports LargeAST", "[scan]") {
    Model m = load("largeast.model");
    auto cands = scan_top_level(m, {});
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].heuristic == Heuristic::LargeAST);
    CHECK(count_nodes(cands[0].target) > 10);
    CHECK(cands[0].scope.size() == 2);
}

TEST_CASE("peaceable attack constraints report WeakPropagation", "[scan]") {
    Model m = load("peaceable.model", "p4.param");
    auto cands = scan_top_level(m, {});
    int attacks = 0, is_groups = 0;
    for (const auto& c : cands) {
        if (c.heuristic == Heuristic::IdenticalScopes) {
            ++is_groups;
            CHECK(c.group.size() == 2);  // the two army-size sums
        } else {
            CHECK(c.heuristic == Heuristic::WeakPropagation);
            CHECK(c.scope.size() == 2);
            ++attacks;
        }
    }
    CHECK(is_groups == 1);
    CHECK(attacks > 0);
}

TEST_CASE("heuristic precedence follows the fixed order", "[scan]") {
    // a constraint triggering DuplicateVariables, LargeAST and
    // WeakPropagation reports the first of them
    Model m = load("knights_seq.model", "n4.param");
    HeuristicConfig cfg;
    for (const auto& c : m.constraints) {
        if (c->kind == Kind::AllDiff) continue;
        auto occ = count_occurrences(c);
        bool dup = false;
        for (auto& [v, n] : occ) dup |= n >= 2;
        REQUIRE(dup);
        CHECK(count_nodes(c) > cfg.large_ast_factor * static_cast<long>(occ.size()));
        CHECK(gac_estimate(c, m.store) == Strength::Weak);
    }
    auto cands = scan_top_level(m, cfg);
    for (const auto& c : cands)
        CHECK(c.heuristic == Heuristic::DuplicateVariables);
}

TEST_CASE("identical scopes grouping is a partition", "[scan][property]") {
    for (auto [model, param] : {std::pair{"coprime.model", "c4.param"},
                                std::pair{"killer_abandon.model", ""},
                                std::pair{"peaceable.model", "p4.param"}}) {
        Model m = load(model, param ? param : "");
        auto cands = scan_top_level(m, {});
        std::set<int> seen;
        for (const auto& c : cands) {
            for (int i : c.group) {
                INFO(model);
                CHECK_FALSE(seen.count(i));
                seen.insert(i);
            }
        }
    }
}

TEST_CASE("coprime pairs group with their ordering constraints", "[scan]") {
    Model m = load("coprime.model", "c3.param");
    auto cands = scan_top_level(m, {});
    // one group per pair of sequence variables
    int groups = 0;
    for (const auto& c : cands)
        if (c.heuristic == Heuristic::IdenticalScopes) ++groups;
    CHECK(groups == 3);
}

TEST_CASE("nested identical scopes targets only the nested node", "[scan]") {
    Model m = load("nested_is.model");
    auto top = scan_top_level(m, {});
    CHECK(top.empty());
    auto nested = scan_nested_bool(m, {});
    REQUIRE(!nested.empty());
    const Candidate& c = nested.front();
    CHECK(c.heuristic == Heuristic::IdenticalScopes);
    CHECK(c.kind == CandidateKind::NestedBool);
    CHECK(c.target->kind == Kind::Neq);
    // generator is the conjunction with the same-scope top-level constraint
    CHECK(c.generator->kind == Kind::And);
    CHECK(c.generator->children.size() == 2);
}

TEST_CASE("nested scan skips descendants of candidates", "[scan]") {
    Model m = load("nested_small.model");
    auto nested = scan_nested_bool(m, {});
    // both disjuncts trigger (normal form orders the comparison first);
    // nothing inside them is reported
    REQUIRE(nested.size() == 2);
    CHECK(nested[0].heuristic == Heuristic::WeakPropagation);
    CHECK(nested[0].target->kind == Kind::Leq);
    CHECK(nested[1].heuristic == Heuristic::WeakPropagation);
    CHECK(nested[1].target->kind == Kind::InSet);
}

TEST_CASE("integer scan finds weakly propagating arithmetic", "[scan]") {
    Model m = load("auxcache.model");
    auto cands = scan_integer_exprs(m, {});
    // u%7 once (second occurrence is an aux-cache hit) and v%7 once
    REQUIRE(cands.size() == 2);
    for (const auto& c : cands) {
        CHECK(c.heuristic == Heuristic::WeakPropagation);
        CHECK(c.target->kind == Kind::Mod);
    }
    CHECK_FALSE(structurally_equal(cands[0].target, cands[1].target));
}

TEST_CASE("group table indexing reports IdenticalScopes integer", "[scan]") {
    Model m = load("sedf_mini.model");
    auto cands = scan_integer_exprs(m, {});
    REQUIRE(!cands.empty());
    CHECK(cands[0].heuristic == Heuristic::IdenticalScopes);
    CHECK(cands[0].kind == CandidateKind::IntegerExpr);
    CHECK(cands[0].target->kind == Kind::Element);
    CHECK(cands[0].scope.size() == 2);
}

TEST_CASE("aux domain enumerates exactly when the space is small", "[auxdomain]") {
    VarStore store;
    int x = store.add("x", Domain::range(0, 15));
    Expr xr = mk::var(x, "x");
    CHECK(aux_domain(mk::mod(xr, mk::int_const(4)), store, 100000).values() ==
          std::vector<Int>{0, 1, 2, 3});
    int y = store.add("y", Domain::range(1, 5));
    CHECK(aux_domain(mk::sum({mk::var(y, "y")}, {1}, -3), store, 100000).values() ==
          std::vector<Int>{-2, -1, 0, 1, 2});
    // above the limit: interval arithmetic
    Domain d = aux_domain(mk::mod(xr, mk::int_const(4)), store, 4);
    CHECK(d.min() == 0);
    CHECK(d.max() == 3);
}

TEST_CASE("aux domain of group table indexing", "[auxdomain]") {
    Model m = load("sedf_mini.model");
    auto cands = scan_integer_exprs(m, {});
    REQUIRE(!cands.empty());
    Domain d = aux_domain(cands[0].target, m.store, 100000);
    CHECK(d.values() == std::vector<Int>{1, 2, 3, 4});
}
