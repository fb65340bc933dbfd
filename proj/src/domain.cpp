#include "retab/domain.hpp"

#include <algorithm>
#include <sstream>

namespace retab {

Domain::Domain(std::vector<Int> values) : values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

Domain Domain::range(Int lo, Int hi) {
    Domain d;
    if (lo <= hi) {
        d.values_.reserve(static_cast<std::size_t>(hi - lo + 1));
        for (Int v = lo; v <= hi; ++v) d.values_.push_back(v);
    }
    return d;
}

bool Domain::contains(Int v) const {
    return std::binary_search(values_.begin(), values_.end(), v);
}

int Domain::rank_of(Int v) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it == values_.end() || *it != v) return -1;
    return static_cast<int>(it - values_.begin());
}

void Domain::remove(Int v) {
    auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it != values_.end() && *it == v) values_.erase(it);
}

void Domain::keep_range(Int lo, Int hi) {
    std::erase_if(values_, [&](Int v) { return v < lo || v > hi; });
}

std::string Domain::str() const {
    std::ostringstream out;
    out << "{";
    // print maximal runs as lo..hi
    std::size_t i = 0;
    bool first = true;
    while (i < values_.size()) {
        std::size_t j = i;
        while (j + 1 < values_.size() && values_[j + 1] == values_[j] + 1) ++j;
        if (!first) out << ",";
        first = false;
        if (j == i)
            out << values_[i];
        else
            out << values_[i] << ".." << values_[j];
        i = j + 1;
    }
    out << "}";
    return out.str();
}

} // namespace retab
