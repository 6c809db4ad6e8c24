#pragma once

#include "sgattn/distance.hpp"
#include "sgattn/tree.hpp"

#include <string>
#include <vector>

namespace fixtures {

// "I swim across the river ." with the usual preterminal layer.
inline const char* kExampleTree =
    "(S (NP (PRP I)) (VP (VBP swim) (PP (IN across) (NP (DT the) (NN river)))) (. .))";

inline const std::vector<std::string> kExampleTokens = {"I",   "swim",  "across",
                                                        "the", "river", "."};

// Word-level distances of the example sentence.
inline const std::vector<std::int32_t> kExampleDistances = {4, 3, 2, 1, 4};

inline sgattn::DistanceVector make_distance(std::vector<std::int32_t> values) {
    sgattn::DistanceVector d;
    d.token_count = values.size() + 1;
    d.values = std::move(values);
    return d;
}

} // namespace fixtures
