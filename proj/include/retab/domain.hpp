#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace retab {

using Int = std::int64_t;

// Finite integer domain: values sorted ascending, no duplicates.
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<Int> values);
    static Domain range(Int lo, Int hi);
    static Domain boolean() { return range(0, 1); }
    static Domain singleton(Int v) { return range(v, v); }

    bool empty() const { return values_.empty(); }
    std::size_t size() const { return values_.size(); }
    Int min() const { return values_.front(); }
    Int max() const { return values_.back(); }
    bool contains(Int v) const;
    // Rank of v among the domain values (0-based); -1 if absent.
    int rank_of(Int v) const;
    Int value_at(std::size_t rank) const { return values_[rank]; }
    bool is_singleton() const { return values_.size() == 1; }

    void remove(Int v);
    void keep_range(Int lo, Int hi);

    const std::vector<Int>& values() const { return values_; }
    bool operator==(const Domain& other) const = default;

    std::string str() const;

private:
    std::vector<Int> values_;
};

} // namespace retab
