#include "hofd/subsets.hpp"

#include <algorithm>

#include "hofd/errors.hpp"

namespace hofd {

bool SubsetIndex::contains(int v) const {
    return std::binary_search(vars.begin(), vars.end(), v);
}

bool SubsetIndex::is_strict_subset_of(const SubsetIndex& other) const {
    if (vars.size() >= other.vars.size()) return false;
    return std::includes(other.vars.begin(), other.vars.end(), vars.begin(), vars.end());
}

std::string SubsetIndex::label() const {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(vars[i] + 1);
    }
    return out;
}

std::vector<SubsetIndex> enumerate_subsets(int p, int max_order) {
    if (p < 1) throw ConfigError("dimension must be positive");
    if (max_order < 1 || max_order > p) {
        throw ConfigError("interaction order must lie in [1, " + std::to_string(p) +
                          "], got " + std::to_string(max_order));
    }
    std::vector<SubsetIndex> out;
    for (int k = 1; k <= max_order; ++k) {
        // lexicographic combinations of size k
        std::vector<int> comb(k);
        for (int i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            out.push_back(SubsetIndex{comb});
            int i = k - 1;
            while (i >= 0 && comb[i] == p - k + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    return out;
}

std::vector<int> strict_subset_positions(const std::vector<SubsetIndex>& all, int u_pos) {
    std::vector<int> out;
    const SubsetIndex& u = all[static_cast<std::size_t>(u_pos)];
    for (int v = 0; v < u_pos; ++v) {
        if (all[static_cast<std::size_t>(v)].is_strict_subset_of(u)) out.push_back(v);
    }
    return out;
}

}  // namespace hofd
