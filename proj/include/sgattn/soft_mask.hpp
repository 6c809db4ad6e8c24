#pragma once

#include "sgattn/distance.hpp"

#include <cstddef>
#include <vector>

namespace sgattn {

struct SoftMaskConfig {
    double tau = 10.0;               // softness temperature
    double hard_limit_epsilon = 1e-6; // tolerance used by tests at tau -> 0
};

// Smoothed local-range mask: entries in [0,1], main and both secondary
// diagonals exactly 1.
class SoftMask {
public:
    explicit SoftMask(std::size_t n) : n_(n), weights_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) { weights_[i * n_ + j] = v; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::size_t n_;
    std::vector<double> weights_;
};

// (tanh((a - b) / tau) + 1) / 2: 0.5 at a == b, -> 1 as a grows past b,
// -> 0 as a falls below b. Throws NonPositiveTau.
double soft_compare(double a, double b, double tau);

// Smooths the hard range of each token by a continued product of soft
// comparisons against the token's adjacent gap distance, walking outward
// from the diagonal. The diagonal band is set to 1 to initiate the products.
// As tau -> 0 this recovers induce_from_distances wherever no compared
// distances tie (tied factors settle at 0.5).
SoftMask build_soft_mask(const DistanceVector& d, const SoftMaskConfig& cfg);

} // namespace sgattn
