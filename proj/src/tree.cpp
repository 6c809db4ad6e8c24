#include "sgattn/tree.hpp"

#include "sgattn/errors.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

namespace sgattn {

namespace {

bool is_atom_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')';
}

bool atom_ok(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_atom_char);
}

} // namespace

ConstituencyTree::ConstituencyTree(std::vector<Node> nodes, NodeIndex root)
    : nodes_(std::move(nodes)), root_(root) {
    if (nodes_.empty() || root_ >= nodes_.size())
        throw Error("tree: bad root index");

    // In-order walk: number leaves, collect tokens, fix parent links.
    nodes_[root_].parent.reset();
    std::vector<std::pair<NodeIndex, std::size_t>> stack; // node, next child slot
    stack.emplace_back(root_, 0);
    std::vector<char> seen(nodes_.size(), 0);
    seen[root_] = 1;
    while (!stack.empty()) {
        auto& [idx, next] = stack.back();
        Node& n = nodes_[idx];
        if (n.is_leaf()) {
            n.span_begin = n.span_end = tokens_.size();
            n.height = 0;
            leaves_.push_back(idx);
            tokens_.push_back(n.label);
            stack.pop_back();
            continue;
        }
        if (next < n.children.size()) {
            NodeIndex child = n.children[next++];
            if (child >= nodes_.size() || seen[child])
                throw Error("tree: malformed child links");
            seen[child] = 1;
            nodes_[child].parent = idx;
            stack.emplace_back(child, 0);
            continue;
        }
        n.span_begin = nodes_[n.children.front()].span_begin;
        n.span_end = nodes_[n.children.back()].span_end;
        n.height = 0;
        for (NodeIndex c : n.children)
            n.height = std::max(n.height, nodes_[c].height + 1);
        stack.pop_back();
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(nodes_.size()))
        throw Error("tree: unreachable nodes");
    validate();
}

NodeIndex ConstituencyTree::leaf(std::size_t token) const {
    if (token >= leaves_.size())
        throw IndexOutOfRange("token index " + std::to_string(token) + " out of range (n=" +
                              std::to_string(leaves_.size()) + ")");
    return leaves_[token];
}

void ConstituencyTree::validate() const {
    if (tokens_.empty())
        throw Error("tree: no leaves");
    std::size_t leaf_cursor = 0;
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (!atom_ok(n.label))
            throw Error("tree: empty label or label with whitespace/parentheses");
        if (i == root_) {
            if (n.parent)
                throw Error("tree: root has a parent");
        } else if (!n.parent) {
            throw Error("tree: non-root node without parent");
        }
        if (n.is_leaf()) {
            if (n.span_begin != n.span_end)
                throw Error("tree: leaf spans more than one token");
            ++leaf_cursor;
        } else {
            // Parent span must be the contiguous in-order union of child spans.
            std::size_t expect = n.span_begin;
            for (NodeIndex c : n.children) {
                const Node& child = nodes_[c];
                if (child.parent != i)
                    throw Error("tree: child/parent link mismatch");
                if (child.span_begin != expect)
                    throw Error("tree: non-contiguous child spans");
                expect = child.span_end + 1;
            }
            if (expect != n.span_end + 1)
                throw Error("tree: parent span does not match children");
        }
    }
    if (leaf_cursor != tokens_.size())
        throw Error("tree: leaf count does not match tokens");
}

namespace {

struct GroupItem {
    NodeIndex node;
    bool from_token; // built from a bare token, not a nested group
};

struct OpenGroup {
    std::string label;
    bool has_label = false;
    std::vector<GroupItem> items;
};

} // namespace

ConstituencyTree parse_ptb(std::string_view text) {
    std::vector<Node> nodes;
    std::vector<OpenGroup> open;
    std::vector<std::size_t> open_offsets; // byte offset of each unmatched '('
    std::optional<NodeIndex> completed_root;

    auto make_node = [&](std::string label) {
        nodes.push_back(Node{std::move(label), std::nullopt, {}, 0, 0, 0});
        return static_cast<NodeIndex>(nodes.size() - 1);
    };

    std::size_t pos = 0;
    const std::size_t len = text.size();
    while (pos < len) {
        char c = text[pos];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
            continue;
        }
        if (completed_root)
            throw TrailingInput("trailing input after complete tree", pos);
        if (c == '(') {
            if (!open.empty() && !open.back().has_label)
                throw EmptyConstituent("constituent without label", pos);
            open.push_back({});
            open_offsets.push_back(pos);
            ++pos;
            continue;
        }
        if (c == ')') {
            if (open.empty())
                throw UnbalancedBrackets("unmatched ')'", pos);
            OpenGroup group = std::move(open.back());
            open.pop_back();
            open_offsets.pop_back();
            if (!group.has_label)
                throw EmptyConstituent("constituent without label", pos);
            if (group.items.empty())
                throw EmptyConstituent("constituent '" + group.label + "' has no children", pos);

            GroupItem result;
            if (group.items.size() == 1 && group.items.front().from_token && !open.empty()) {
                // Preterminal "(TAG token)": merge POS tag and token into one
                // leaf. Kept as-is at the top level so the root label survives.
                result = {group.items.front().node, false};
            } else {
                NodeIndex built = make_node(std::move(group.label));
                for (const GroupItem& item : group.items)
                    nodes[built].children.push_back(item.node);
                result = {built, false};
            }
            if (open.empty())
                completed_root = result.node;
            else
                open.back().items.push_back(result);
            ++pos;
            continue;
        }
        // Atom: either a group's label or a bare token.
        std::size_t start = pos;
        while (pos < len && is_atom_char(text[pos]))
            ++pos;
        std::string atom(text.substr(start, pos - start));
        if (open.empty())
            throw UnbalancedBrackets("expected '(' before token", start);
        if (!open.back().has_label) {
            open.back().label = std::move(atom);
            open.back().has_label = true;
        } else {
            open.back().items.push_back({make_node(std::move(atom)), true});
        }
    }
    if (!open.empty())
        throw UnbalancedBrackets("unclosed '('", open_offsets.back());
    if (!completed_root)
        throw UnbalancedBrackets("expected '('", len);
    return ConstituencyTree(std::move(nodes), *completed_root);
}

bool structurally_equal(const ConstituencyTree& a, const ConstituencyTree& b) {
    struct Frame {
        NodeIndex ia, ib;
    };
    std::vector<Frame> stack{{a.root(), b.root()}};
    while (!stack.empty()) {
        auto [ia, ib] = stack.back();
        stack.pop_back();
        const Node& na = a.node(ia);
        const Node& nb = b.node(ib);
        if (na.label != nb.label || na.children.size() != nb.children.size())
            return false;
        for (std::size_t k = 0; k < na.children.size(); ++k)
            stack.push_back({na.children[k], nb.children[k]});
    }
    return true;
}

std::string render_ptb(const ConstituencyTree& tree) {
    std::string out;
    struct Frame {
        NodeIndex idx;
        std::size_t next = 0;
    };
    std::vector<Frame> stack{{tree.root(), 0}};
    while (!stack.empty()) {
        Frame& f = stack.back();
        const Node& n = tree.node(f.idx);
        if (n.is_leaf()) {
            out += n.label;
            stack.pop_back();
            continue;
        }
        if (f.next == 0) {
            out += '(';
            out += n.label;
        }
        if (f.next < n.children.size()) {
            out += ' ';
            stack.push_back({n.children[f.next++], 0});
            continue;
        }
        out += ')';
        stack.pop_back();
    }
    return out;
}

int lca_height(const ConstituencyTree& tree, std::size_t i, std::size_t j) {
    const std::size_t n = tree.token_count();
    if (i >= n || j >= n)
        throw IndexOutOfRange("token pair (" + std::to_string(i) + "," + std::to_string(j) +
                              ") out of range (n=" + std::to_string(n) + ")");
    NodeIndex cur = tree.leaf(i);
    while (tree.node(cur).span_begin > j || tree.node(cur).span_end < j)
        cur = *tree.node(cur).parent;
    return tree.node(cur).height;
}

namespace {

constexpr const char* kRandomLabels[] = {"S", "NP", "VP", "PP", "ADJP", "SBAR", "ADVP", "X"};

struct RandomBuilder {
    std::mt19937_64 rng;
    std::vector<Node> nodes;
    std::size_t next_token = 0;

    NodeIndex add_node(std::string label) {
        nodes.push_back(Node{std::move(label), std::nullopt, {}, 0, 0, 0});
        return static_cast<NodeIndex>(nodes.size() - 1);
    }

    std::string pick_label() {
        return kRandomLabels[rng() % (sizeof(kRandomLabels) / sizeof(kRandomLabels[0]))];
    }

    NodeIndex make_leaf() {
        return add_node("w" + std::to_string(next_token++));
    }

    // Internal node over `count` >= 2 tokens. Subtrees of a single token are
    // emitted as bare leaves so no internal node ever has a lone leaf child;
    // "(TAG token)" would re-collapse on parse and break round-tripping.
    NodeIndex build(std::size_t count, int chain) {
        NodeIndex me = add_node(pick_label());
        // Occasional unary wrapper above another constituent, depth-capped.
        if (chain < 2 && count >= 2 && rng() % 100 < 15) {
            NodeIndex child = build(count, chain + 1);
            nodes[me].children.push_back(child);
            return me;
        }
        std::size_t max_arity = std::min<std::size_t>(count, 5);
        std::size_t arity = 2 + rng() % (max_arity - 1);
        if (rng() % 100 < 10) arity = count; // flat level
        // Split count tokens into `arity` positive parts.
        std::vector<std::size_t> cuts; // cut after token offsets 1..count-1
        std::vector<std::size_t> gaps(count - 1);
        for (std::size_t g = 0; g < gaps.size(); ++g) gaps[g] = g + 1;
        std::shuffle(gaps.begin(), gaps.end(), rng);
        cuts.assign(gaps.begin(), gaps.begin() + (arity - 1));
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(count);
        std::size_t start = 0;
        for (std::size_t part : cuts) {
            std::size_t part_size = part - start;
            NodeIndex child = part_size == 1 ? make_leaf() : build(part_size, 0);
            nodes[me].children.push_back(child);
            start = part;
        }
        return me;
    }
};

} // namespace

ConstituencyTree random_tree(std::size_t leaf_count, std::uint64_t seed) {
    if (leaf_count < 1)
        throw Error("random_tree: leaf_count must be >= 1");
    RandomBuilder b;
    b.rng.seed(seed * 0x9e3779b97f4a7c15ULL + leaf_count);
    NodeIndex root;
    if (leaf_count == 1) {
        root = b.add_node(b.pick_label());
        NodeIndex leaf = b.make_leaf();
        b.nodes[root].children.push_back(leaf);
    } else {
        root = b.build(leaf_count, 0);
    }
    return ConstituencyTree(std::move(b.nodes), root);
}

} // namespace sgattn
