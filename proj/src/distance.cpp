#include "sgattn/distance.hpp"

#include "sgattn/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace sgattn {

namespace {

void generate_node(const ConstituencyTree& tree, NodeIndex idx,
                   std::vector<std::int32_t>& out) {
    const Node& n = tree.node(idx);
    if (n.is_leaf())
        return;
    std::int32_t maxd = 0;
    std::vector<std::vector<std::int32_t>> child_vectors;
    child_vectors.reserve(n.children.size());
    for (NodeIndex c : n.children) {
        std::vector<std::int32_t> cd;
        generate_node(tree, c, cd);
        for (std::int32_t v : cd) maxd = std::max(maxd, v);
        child_vectors.push_back(std::move(cd));
    }
    const std::int32_t nd = maxd + 1;
    for (std::size_t k = 0; k < child_vectors.size(); ++k) {
        if (k > 0)
            out.push_back(nd);
        out.insert(out.end(), child_vectors[k].begin(), child_vectors[k].end());
    }
}

int sgn(std::int64_t v) { return (v > 0) - (v < 0); }

} // namespace

DistanceVector generate_distances(const ConstituencyTree& tree) {
    DistanceVector d;
    d.token_count = tree.token_count();
    d.values.reserve(d.token_count > 0 ? d.token_count - 1 : 0);
    generate_node(tree, tree.root(), d.values);
    return d;
}

bool verify_sign_property(const ConstituencyTree& tree, const DistanceVector& d) {
    const std::size_t n = tree.token_count();
    if (d.values.size() + 1 != n)
        throw LengthMismatch("distance length " + std::to_string(d.values.size()) +
                             " does not fit tree with " + std::to_string(n) + " tokens");
    std::vector<int> heights(n > 0 ? n - 1 : 0);
    for (std::size_t g = 0; g + 1 < n; ++g)
        heights[g] = lca_height(tree, g, g + 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (sgn(static_cast<std::int64_t>(d.values[i]) - d.values[j]) !=
                sgn(static_cast<std::int64_t>(heights[i]) - heights[j]))
                return false;
    return true;
}

BpeAlignment BpeAlignment::from_subwords(std::vector<std::string> subwords,
                                         std::string_view marker) {
    BpeAlignment align;
    align.subword_tokens = std::move(subwords);
    std::size_t word_begin = 0;
    for (std::size_t s = 0; s < align.subword_tokens.size(); ++s) {
        const std::string& sw = align.subword_tokens[s];
        const bool continues = sw.size() > marker.size() &&
                               sw.compare(sw.size() - marker.size(), marker.size(), marker) == 0;
        if (!continues || s + 1 == align.subword_tokens.size()) {
            align.word_to_subwords.push_back({word_begin, s + 1});
            word_begin = s + 1;
        }
    }
    return align;
}

BpeAlignment BpeAlignment::identity(std::vector<std::string> words) {
    BpeAlignment align;
    align.subword_tokens = std::move(words);
    align.word_to_subwords.reserve(align.subword_tokens.size());
    for (std::size_t s = 0; s < align.subword_tokens.size(); ++s)
        align.word_to_subwords.push_back({s, s + 1});
    return align;
}

void BpeAlignment::validate() const {
    std::size_t expect = 0;
    for (const SubwordRun& run : word_to_subwords) {
        if (run.begin != expect || run.end <= run.begin)
            throw AlignmentMismatch("subword runs must be contiguous, ordered and non-empty");
        expect = run.end;
    }
    if (expect != subword_tokens.size())
        throw AlignmentMismatch("subword runs do not cover all subword positions");
}

DistanceVector expand_bpe(const DistanceVector& d, const BpeAlignment& align) {
    align.validate();
    if (align.word_count() != d.token_count)
        throw AlignmentMismatch("alignment has " + std::to_string(align.word_count()) +
                                " words, distance vector covers " +
                                std::to_string(d.token_count));
    const std::size_t subwords = align.subword_count();
    DistanceVector out;
    out.token_count = subwords;
    if (subwords == 0)
        return out;
    out.values.assign(subwords - 1, 0); // intra-word gaps: the lowest value, 0
    for (std::size_t w = 0; w + 1 < align.word_count(); ++w)
        out.values[align.word_to_subwords[w].end - 1] = d.values[w];
    for (std::int32_t& v : out.values)
        v += 1; // uniform shift; rank-preserving, yields minimum 1
    return out;
}

DistanceVector concat_sentences(std::span<const DistanceVector> ds, std::int32_t sentinel) {
    if (ds.empty())
        throw std::invalid_argument("concat_sentences: no sentences");
    DistanceVector out;
    for (const DistanceVector& d : ds) {
        if (d.token_count == 0)
            throw std::invalid_argument("concat_sentences: empty sentence");
        for (std::int32_t v : d.values) {
            if (v < 1)
                throw std::invalid_argument("concat_sentences: sentence not finalized (value < 1)");
            if (v >= sentinel)
                throw SentinelOverflow("intra-sentence distance " + std::to_string(v) +
                                       " reaches sentinel " + std::to_string(sentinel));
        }
        if (out.token_count > 0)
            out.values.push_back(sentinel);
        out.values.insert(out.values.end(), d.values.begin(), d.values.end());
        out.token_count += d.token_count;
    }
    return out;
}

} // namespace sgattn
