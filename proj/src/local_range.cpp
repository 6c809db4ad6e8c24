#include "sgattn/local_range.hpp"

#include "sgattn/errors.hpp"

namespace sgattn {

LocalRangeMask induce_from_distances(const DistanceVector& d) {
    const std::size_t n = d.token_count;
    if (n == 0 || d.values.size() + 1 != n)
        throw LengthMismatch("distance vector of length " + std::to_string(d.values.size()) +
                             " inconsistent with token count " + std::to_string(d.token_count));
    LocalRangeMask mask(n);
    const auto& v = d.values;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t begin = 0;
        if (i >= 2) {
            // Nearest gap left of the adjacent one with a strictly larger
            // distance; the range starts just right of it.
            for (std::size_t g = i - 1; g-- > 0;) {
                if (v[g] > v[i - 1]) {
                    begin = g + 1;
                    break;
                }
            }
        }
        std::size_t end = n - 1;
        if (i + 1 < n) {
            for (std::size_t g = i + 1; g + 1 <= n - 1; ++g) {
                if (v[g] > v[i]) {
                    end = g;
                    break;
                }
            }
        }
        mask.set_row_interval(i, begin, end);
    }
    return mask;
}

LocalRangeMask range_from_tree(const ConstituencyTree& tree) {
    const std::size_t n = tree.token_count();
    LocalRangeMask mask(n);
    for (std::size_t t = 0; t < n; ++t) {
        NodeIndex cur = tree.leaf(t);
        while (tree.node(cur).parent &&
               tree.node(*tree.node(cur).parent).children.front() == cur)
            cur = *tree.node(cur).parent;
        const std::size_t begin =
            tree.node(cur).parent ? tree.node(*tree.node(cur).parent).span_begin : 0;

        cur = tree.leaf(t);
        while (tree.node(cur).parent &&
               tree.node(*tree.node(cur).parent).children.back() == cur)
            cur = *tree.node(cur).parent;
        const std::size_t end =
            tree.node(cur).parent ? tree.node(*tree.node(cur).parent).span_end : n - 1;

        mask.set_row_interval(t, begin, end);
    }
    return mask;
}

bool masks_equal(const LocalRangeMask& a, const LocalRangeMask& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("mask sizes differ: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    return a == b;
}

} // namespace sgattn
