#pragma once

#include <string>
#include <vector>

#include "retab/expr.hpp"

namespace retab {

// Extensional constraint payload: ordered scope plus satisfying tuples,
// stored row-major, sorted lexicographically ascending with no duplicates.
struct Table {
    int id = -1;                    // stable name "t<id>" for dumps
    std::vector<int> scope;         // variable ids, column order
    std::vector<Int> tuples;        // flat, arity() per row
    std::vector<int> cols;          // column count helper

    int arity() const { return static_cast<int>(scope.size()); }
    std::size_t tuple_count() const {
        return scope.empty() ? 0 : tuples.size() / scope.size();
    }
    const Int* row(std::size_t r) const { return tuples.data() + r * scope.size(); }
    bool contains_row(const std::vector<Int>& row) const;
};

// Bit-exact dump format:
//   table <name> arity <r> tuples <t>
//   <t lines of r space-separated integers>
std::string dump_table(const Table& t);

} // namespace retab
