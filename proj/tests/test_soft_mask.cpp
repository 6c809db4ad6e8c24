#include "sgattn/errors.hpp"
#include "sgattn/local_range.hpp"
#include "sgattn/soft_mask.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace sgattn;

namespace {

// Straight-line reference: evaluates the continued product directly per
// entry, no shared code with the library loop.
double reference_entry(const std::vector<std::int32_t>& d, std::size_t i, std::size_t j,
                       double tau) {
    auto alpha = [tau](double a, double b) { return (std::tanh((a - b) / tau) + 1.0) / 2.0; };
    if (j + 1 >= i && j <= i + 1)
        return 1.0; // diagonal band
    double p = 1.0;
    if (j < i) {
        for (std::size_t t = j; t + 1 <= i - 1; ++t)
            p *= alpha(d[i - 1], d[t]);
    } else {
        for (std::size_t t = i + 1; t + 1 <= j; ++t)
            p *= alpha(d[i], d[t]);
    }
    return p;
}

} // namespace

TEST_CASE("soft_compare") {
    CHECK(soft_compare(3.0, 3.0, 10.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(soft_compare(14.0, 4.0, 10.0) == doctest::Approx(0.8807970779778824).epsilon(1e-13));
    CHECK(soft_compare(5.0, 4.0, 1e-6) == 1.0); // tanh saturates
    CHECK(soft_compare(4.0, 5.0, 1e-6) == 0.0);
    CHECK(soft_compare(5.0, 4.0, 10.0) > soft_compare(4.5, 4.0, 10.0)); // increasing in a
    CHECK_THROWS_AS(soft_compare(1.0, 2.0, 0.0), NonPositiveTau);
    CHECK_THROWS_AS(soft_compare(1.0, 2.0, -1.0), NonPositiveTau);
}

TEST_CASE("build_soft_mask trivial shapes") {
    const SoftMask two = build_soft_mask(fixtures::make_distance({1}), SoftMaskConfig{});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(two.at(i, j) == 1.0);

    const SoftMask one = build_soft_mask(fixtures::make_distance({}), SoftMaskConfig{});
    CHECK(one.size() == 1);
    CHECK(one.at(0, 0) == 1.0);

    CHECK_THROWS_AS(build_soft_mask(fixtures::make_distance({1}), SoftMaskConfig{-2.0, 1e-6}),
                    NonPositiveTau);
}

TEST_CASE("soft mask matches the scalar reference on the example") {
    const std::vector<std::int32_t> d = {4, 3, 2, 1, 4};
    const SoftMask mask = build_soft_mask(fixtures::make_distance(d), SoftMaskConfig{10.0, 1e-6});
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(mask.at(i, j) ==
                  doctest::Approx(reference_entry(d, i, j, 10.0)).epsilon(1e-14));
    // Row 3 (token "across"), leftmost column: single factor against the
    // gap distance 4 with anchor 3.
    CHECK(mask.at(2, 0) == doctest::Approx(0.4501660026875221).epsilon(1e-13));
    CHECK(mask.at(2, 0) == doctest::Approx(soft_compare(3.0, 4.0, 10.0)).epsilon(1e-15));
    CHECK(mask.at(2, 0) > 0.0);
    CHECK(mask.at(2, 0) < 1.0);
    // Unimodal: non-increasing away from the diagonal band.
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = i; j-- > 1;)
            CHECK(mask.at(i, j - 1) <= mask.at(i, j) + 1e-15);
        for (std::size_t j = i + 2; j + 1 < 6; ++j)
            CHECK(mask.at(i, j + 1) <= mask.at(i, j) + 1e-15);
    }
}

TEST_CASE("soft mask entries stay in [0,1] with a forced diagonal band") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 2 + rng() % 20;
        std::vector<std::int32_t> values(n - 1);
        for (auto& v : values) v = 1 + static_cast<std::int32_t>(rng() % 12);
        const SoftMask mask =
            build_soft_mask(fixtures::make_distance(values), SoftMaskConfig{10.0, 1e-6});
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(mask.at(i, i) == 1.0);
            if (i > 0) CHECK(mask.at(i, i - 1) == 1.0);
            if (i + 1 < n) CHECK(mask.at(i, i + 1) == 1.0);
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(mask.at(i, j) >= 0.0);
                CHECK(mask.at(i, j) <= 1.0);
            }
        }
    }
}

TEST_CASE("each off-band entry is its inner neighbour times one comparison") {
    const std::vector<std::int32_t> d = {4, 3, 2, 1, 4, 2, 6};
    const SoftMask mask = build_soft_mask(fixtures::make_distance(d), SoftMaskConfig{10.0, 1e-6});
    const std::size_t n = 8;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j + 2 <= i; ++j) {
            const double factor = soft_compare(d[i - 1], d[j], 10.0);
            CHECK(mask.at(i, j) == doctest::Approx(mask.at(i, j + 1) * factor).epsilon(1e-14));
        }
        for (std::size_t j = i + 2; j < n; ++j) {
            const double factor = soft_compare(d[i], d[j - 1], 10.0);
            CHECK(mask.at(i, j) == doctest::Approx(mask.at(i, j - 1) * factor).epsilon(1e-14));
        }
    }
}

TEST_CASE("tied distances contribute exactly one half") {
    // d constant: every comparison is a tie, each outward step halves.
    const SoftMask mask =
        build_soft_mask(fixtures::make_distance({3, 3, 3, 3}), SoftMaskConfig{10.0, 1e-6});
    CHECK(mask.at(0, 2) == 0.5);
    CHECK(mask.at(0, 3) == 0.25);
    CHECK(mask.at(0, 4) == 0.125);
    CHECK(mask.at(4, 2) == 0.5);
    CHECK(mask.at(4, 1) == 0.25);
    CHECK(mask.at(4, 0) == 0.125);
}

TEST_CASE("tau -> 0 recovers the hard mask when compared values are distinct") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 2 + rng() % 16;
        // Pairwise-distinct values: shuffled 1..n-1.
        std::vector<std::int32_t> values(n - 1);
        for (std::size_t g = 0; g < values.size(); ++g)
            values[g] = static_cast<std::int32_t>(g + 1);
        std::shuffle(values.begin(), values.end(), rng);
        const DistanceVector d = fixtures::make_distance(values);
        const SoftMask soft = build_soft_mask(d, SoftMaskConfig{1e-6, 1e-6});
        const LocalRangeMask hard = induce_from_distances(d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!(j + 1 >= i && j <= i + 1)) // skip the forced band
                    CHECK(std::abs(soft.at(i, j) - (hard.at(i, j) ? 1.0 : 0.0)) <= 1e-6);
    }
}
