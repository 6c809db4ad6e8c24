#pragma once

#include "sgattn/distance.hpp"
#include "sgattn/tree.hpp"

#include <cstddef>
#include <vector>

namespace sgattn {

// Dense n x n boolean matrix; row i is the attention range of token i.
// Every row is a single contiguous run of 1s containing the diagonal.
class LocalRangeMask {
public:
    explicit LocalRangeMask(std::size_t n) : n_(n), bits_(n * n, 0) {}

    std::size_t size() const { return n_; }
    bool at(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool v) { bits_[i * n_ + j] = v ? 1 : 0; }

    // Fills [begin, end] of row i, both endpoints included.
    void set_row_interval(std::size_t i, std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j <= end; ++j)
            bits_[i * n_ + j] = 1;
    }

    bool operator==(const LocalRangeMask& other) const = default;

private:
    std::size_t n_;
    std::vector<unsigned char> bits_;
};

// Range induction from distances: token i's range stretches to both sides
// until it hits a gap with a strictly larger distance than the adjacent gap
// on that side (ties extend the range). Empty search domains default to the
// sentence edges.
LocalRangeMask induce_from_distances(const DistanceVector& d);

// Range induction from the tree alone (no distances): sibling-structure
// back-trace. For each token, walk up while the current node is the
// leftmost (rightmost) child of its parent; the range starts at the leftmost
// (ends at the rightmost) leaf of the parent where the walk stops, or at the
// sentence edge when the walk exhausts at the root. Oracle counterpart of
// induce_from_distances.
LocalRangeMask range_from_tree(const ConstituencyTree& tree);

// Elementwise equality; throws DimensionMismatch when sizes differ.
bool masks_equal(const LocalRangeMask& a, const LocalRangeMask& b);

} // namespace sgattn
