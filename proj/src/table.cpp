#include "retab/table.hpp"

#include <sstream>

namespace retab {

bool Table::contains_row(const std::vector<Int>& row) const {
    const std::size_t r = scope.size();
    if (row.size() != r || r == 0) return false;
    std::size_t lo = 0, hi = tuple_count();
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        const Int* t = tuples.data() + mid * r;
        int cmp = 0;
        for (std::size_t i = 0; i < r; ++i) {
            if (t[i] < row[i]) { cmp = -1; break; }
            if (t[i] > row[i]) { cmp = 1; break; }
        }
        if (cmp == 0) return true;
        if (cmp < 0) lo = mid + 1;
        else hi = mid;
    }
    return false;
}

std::string dump_table(const Table& t) {
    std::ostringstream out;
    out << "table t" << t.id << " arity " << t.arity() << " tuples "
        << t.tuple_count() << "\n";
    const std::size_t r = t.scope.size();
    for (std::size_t row = 0; row < t.tuple_count(); ++row) {
        const Int* p = t.row(row);
        for (std::size_t i = 0; i < r; ++i) {
            if (i) out << " ";
            out << p[i];
        }
        out << "\n";
    }
    return out.str();
}

} // namespace retab
