#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hofd {

// A subset of input coordinates, stored 0-based and sorted ascending.
struct SubsetIndex {
    std::vector<int> vars;

    int order() const { return static_cast<int>(vars.size()); }
    bool contains(int v) const;
    bool is_strict_subset_of(const SubsetIndex& other) const;

    // 1-based, dot-joined: {0,2} -> "1.3".
    std::string label() const;

    bool operator==(const SubsetIndex& other) const { return vars == other.vars; }
};

// All non-empty subsets of {0..p-1} with at most max_order elements, ordered
// by cardinality ascending and lexicographically within each cardinality.
std::vector<SubsetIndex> enumerate_subsets(int p, int max_order);

// Positions (into the same enumeration) of the strict non-empty subsets of u,
// in canonical order.
std::vector<int> strict_subset_positions(const std::vector<SubsetIndex>& all, int u_pos);

}  // namespace hofd
