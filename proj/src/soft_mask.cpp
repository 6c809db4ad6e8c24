#include "sgattn/soft_mask.hpp"

#include "sgattn/errors.hpp"

#include <cmath>

namespace sgattn {

double soft_compare(double a, double b, double tau) {
    if (!(tau > 0.0))
        throw NonPositiveTau("tau must be positive, got " + std::to_string(tau));
    return (std::tanh((a - b) / tau) + 1.0) / 2.0;
}

SoftMask build_soft_mask(const DistanceVector& d, const SoftMaskConfig& cfg) {
    if (!(cfg.tau > 0.0))
        throw NonPositiveTau("tau must be positive, got " + std::to_string(cfg.tau));
    const std::size_t n = d.token_count;
    if (n == 0 || d.values.size() + 1 != n)
        throw LengthMismatch("distance vector of length " + std::to_string(d.values.size()) +
                             " inconsistent with token count " + std::to_string(d.token_count));
    const auto& v = d.values;
    SoftMask mask(n);
    for (std::size_t i = 0; i < n; ++i) {
        mask.set(i, i, 1.0);
        if (i > 0) mask.set(i, i - 1, 1.0);
        if (i + 1 < n) mask.set(i, i + 1, 1.0);

        // Pre-text side: anchor at the gap just left of token i, multiply in
        // one comparison per gap walked over.
        if (i >= 2) {
            const double anchor = static_cast<double>(v[i - 1]);
            double product = 1.0;
            for (std::size_t j = i - 1; j-- > 0;) {
                product *= soft_compare(anchor, static_cast<double>(v[j]), cfg.tau);
                mask.set(i, j, product);
            }
        }
        // Post-text side, mirrored with the anchor at the gap just right of
        // token i.
        if (i + 2 < n) {
            const double anchor = static_cast<double>(v[i]);
            double product = 1.0;
            for (std::size_t j = i + 2; j < n; ++j) {
                product *= soft_compare(anchor, static_cast<double>(v[j - 1]), cfg.tau);
                mask.set(i, j, product);
            }
        }
    }
    return mask;
}

} // namespace sgattn
