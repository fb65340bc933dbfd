#pragma once

#include <unordered_map>

#include "retab/heuristics.hpp"
#include "retab/table.hpp"

namespace retab {

struct TabLimits {
    Int node_limit = 100000;
    // progress checks after 1000 and 10000 nodes, then every 10000
    bool is_checkpoint(Int nodes) const {
        return nodes == 1000 || (nodes >= 10000 && nodes % 10000 == 0);
    }
};

struct TabOutcome {
    enum class Status {
        Success,
        CacheHit,
        AbandonedProgress,
        AbandonedNodeLimit,
        RejectedNestedSize,
    };
    Status status;
    TablePtr table;             // Success / CacheHit
    Int nodes_searched = 0;
    Int progress_c = 0;         // AbandonedProgress: C at the failing checkpoint
    Int space = 0;              // A
    bool from_cache = false;    // failure replayed from the failure cache

    bool ok() const {
        return status == Status::Success || status == Status::CacheHit;
    }
};

const char* tab_status_name(TabOutcome::Status s);

// A = product of the scope domain sizes, saturating at INT64_MAX.
Int assignment_space(const std::vector<Domain>& domains);

// Mixed-radix rank of the partial assignment completed with domain minima;
// values are mapped to their rank within each domain first.
Int position_index(const std::vector<Int>& partial, const std::vector<Domain>& domains);

// Depth-first d-way enumeration of the satisfying assignments of e (Boolean,
// already normalized) in scope order with ascending values. One node per
// value assignment attempted. Abandons at a checkpoint when
// C*nodeLimit < nodeCount*A (128-bit intermediates), or at nodeLimit nodes.
TabOutcome generate_table(const Expr& e, const VarStore& store, const TabLimits& limits,
                          bool nested_size_cap);

// Cache key: canonical printed form (normal form plus renaming of the
// depth-first variable sequence to V0,V1,...) and the domains in canonical
// variable order.
struct CacheKey {
    std::string expr;
    std::vector<Domain> domains;
    bool operator==(const CacheKey&) const = default;
};

struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
        std::size_t h = std::hash<std::string>()(k.expr);
        for (const auto& d : k.domains) h = h * 1000003 + d.size();
        return h;
    }
};

CacheKey cache_key(const Expr& normalized, const VarStore& store);

// In-memory caches for one tabulation pass: generated tables and failed
// attempts. Cached tables hold tuples in canonical variable order and are
// remapped to the requesting scope on a hit.
class TabCaches {
public:
    // normalizes e, consults both caches, generates on a miss; table ids are
    // assigned per distinct tuple matrix
    TabOutcome lookup_or_generate(const Expr& e, const VarStore& store,
                                  const TabLimits& limits, bool nested_size_cap);

    const std::vector<TablePtr>& canonical_tables() const { return canonical_; }

private:
    struct CachedFailure {
        TabOutcome::Status status;
        Int nodes, c, a;
    };
    std::unordered_map<CacheKey, TablePtr, CacheKeyHash> tables_;
    std::unordered_map<CacheKey, CachedFailure, CacheKeyHash> failures_;
    std::vector<TablePtr> canonical_;
};

// AST replacement for a tabulated candidate. TopLevel: the grouped
// constraints are removed and one table constraint appended. NestedBool: the
// target node is replaced in place. IntegerExpr: cand.aux_var must name the
// pre-created auxiliary variable; the target is replaced by it and the table
// appended at top level.
void apply_tabulation(Model& m, const Candidate& cand, const TablePtr& table,
                      int aux_var = -1);

struct TabulationReport {
    std::string heuristic;
    CandidateKind kind;
    std::string target;
    TabOutcome::Status outcome;
    Int nodes = 0;
    Int tuples = -1;
    Int progress_c = 0;
    Int space = 0;
    bool cache_hit = false;
    int table_id = -1;
    int aux_var = -1;
};

struct TabResult {
    Model model;
    std::vector<TabulationReport> reports;
    std::vector<TablePtr> tables;   // canonical tuple matrices, id order
};

// Top-level, nested-Boolean, then integer-expression phases, tabulating each
// candidate as it is found. Members of a failed IdenticalScopes group are
// rescanned individually; descendants of failed nested/integer targets are
// still visited. The A <= nodeLimit guard applies to nested candidates.
TabResult tabulate_pass(const Model& m, const HeuristicConfig& cfg, const TabLimits& limits);

} // namespace retab
