#pragma once

#include "sgattn/tree.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sgattn {

// Serialized tree: one scalar per gap between consecutive tokens. Values are
// exact integers throughout the pipeline (they are ranks, not measurements).
struct DistanceVector {
    std::vector<std::int32_t> values; // length token_count - 1
    std::size_t token_count = 0;

    std::size_t size() const { return values.size(); }
};

inline constexpr std::int32_t kSentenceSentinel = 999;

// Bottom-up serialization: each constituent merges its children at one plus
// the largest distance inside them, so deeper constituents merge earlier.
// Output length n-1, minimum value 1 for n >= 2.
DistanceVector generate_distances(const ConstituencyTree& tree);

// True iff d ranks every pair of gaps exactly as the LCA heights of the
// corresponding consecutive-token pairs do:
// sign(d_i - d_j) == sign(h_{i+1}^i - h_{j+1}^j) for all gap pairs (i, j).
// Throws LengthMismatch when d does not fit the tree.
bool verify_sign_property(const ConstituencyTree& tree, const DistanceVector& d);

// Word -> subword mapping. Runs are contiguous, ordered, non-overlapping and
// cover every subword position.
struct SubwordRun {
    std::size_t begin; // half-open subword interval
    std::size_t end;
};

struct BpeAlignment {
    std::vector<std::string> subword_tokens;
    std::vector<SubwordRun> word_to_subwords;

    std::size_t word_count() const { return word_to_subwords.size(); }
    std::size_t subword_count() const { return subword_tokens.size(); }

    // Groups subwords into words by the continuation marker convention:
    // a subword ending in `marker` ("sw@@") continues the current word.
    static BpeAlignment from_subwords(std::vector<std::string> subwords,
                                      std::string_view marker = "@@");
    // One subword per word; used when no segmentation is supplied.
    static BpeAlignment identity(std::vector<std::string> words);

    void validate() const;
};

// Expands a word-level vector over subwords: gaps inside a word get 0, gaps
// between words keep the word-level distance, then every entry is shifted up
// by 1 (unconditionally, even when nothing was split) so the minimum is 1.
// Throws AlignmentMismatch when the word counts disagree.
DistanceVector expand_bpe(const DistanceVector& d, const BpeAlignment& align);

// Joins finalized per-sentence vectors with `sentinel` at each boundary: all
// sentences merge last. Throws SentinelOverflow when an intra-sentence value
// already reaches the sentinel.
DistanceVector concat_sentences(std::span<const DistanceVector> ds,
                                std::int32_t sentinel = kSentenceSentinel);

} // namespace sgattn
