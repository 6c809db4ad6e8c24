#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgattn {

using NodeIndex = std::uint32_t;

struct Node {
    std::string label; // constituent tag; for leaves, the surface token itself
    std::optional<NodeIndex> parent;
    std::vector<NodeIndex> children; // ordered left to right
    std::size_t span_begin = 0;      // inclusive token interval covered by this node
    std::size_t span_end = 0;
    int height = 0; // leaves 0, internal = 1 + max(children)

    bool is_leaf() const { return children.empty(); }
};

// Ordered rooted tree over a token sequence. Immutable after construction;
// all operations on it are pure and safe for concurrent reads.
class ConstituencyTree {
public:
    // Takes label/children structure, fills in spans, heights, tokens and leaf
    // order, and validates the invariants (throws sgattn::Error on violation).
    ConstituencyTree(std::vector<Node> nodes, NodeIndex root);

    const Node& node(NodeIndex index) const { return nodes_[index]; }
    NodeIndex root() const { return root_; }
    std::size_t node_count() const { return nodes_.size(); }

    const std::vector<std::string>& tokens() const { return tokens_; }
    std::size_t token_count() const { return tokens_.size(); }
    // Node holding token `token` (0-based).
    NodeIndex leaf(std::size_t token) const;

    void validate() const;

private:
    std::vector<Node> nodes_;
    NodeIndex root_ = 0;
    std::vector<std::string> tokens_;
    std::vector<NodeIndex> leaves_; // token index -> node index
};

// Parses a bracketed constituency tree ("(S (NP (PRP I)) ...)").
// Whitespace-insensitive. A group whose sole content is one bare token -- a
// preterminal -- is collapsed with its token into a single leaf, except at
// the top level where the root label is kept. Tokens are stored verbatim;
// parentheses inside tokens must already be escaped as -LRB-/-RRB-.
// Throws UnbalancedBrackets / EmptyConstituent / TrailingInput with the byte
// offset of the offending input.
ConstituencyTree parse_ptb(std::string_view text);

// Canonical single-space bracketed form: leaves render as their bare token,
// internal nodes as "(LABEL child ...)". render -> parse -> render is
// idempotent; parse(render(t)) == t whenever no internal node of t has a
// single leaf as its only child (such nodes are textually indistinguishable
// from preterminals and re-collapse).
std::string render_ptb(const ConstituencyTree& tree);

// Height of the lowest common ancestor of tokens i and j (0-based), with
// leaves at height 0. Symmetric; lca_height(t, i, i) == 0.
// Throws IndexOutOfRange.
int lca_height(const ConstituencyTree& tree, std::size_t i, std::size_t j);

// Deterministic pseudo-random tree over `leaf_count` tokens: arbitrary arity,
// flat levels and unary chains included. Property-test fixture generator.
ConstituencyTree random_tree(std::size_t leaf_count, std::uint64_t seed);

bool structurally_equal(const ConstituencyTree& a, const ConstituencyTree& b);

} // namespace sgattn
