#pragma once

#include "sgattn/matrix.hpp"

#include <cstdint>
#include <vector>

namespace sgattn {

struct AttentionConfig {
    std::size_t d_model = 0;
    std::size_t num_heads = 0;
    std::size_t grammar_heads = 0; // first `grammar_heads` heads receive the mask
    bool use_soft_mask = false;
    double tau = 10.0;
    std::size_t d_ff = 0; // 0 -> 4 * d_model

    std::size_t head_dim() const { return d_model / num_heads; }
    std::size_t ff_dim() const { return d_ff == 0 ? 4 * d_model : d_ff; }
    void validate() const; // throws DimensionMismatch / std::invalid_argument
};

// One post-norm encoder layer: multi-head self-attention, output projection,
// residual + layer norm, position-wise feed-forward (ReLU), residual + layer
// norm. No dropout. Weights are immutable during forward/backward calls;
// concurrent calls on different inputs are safe.
struct AttentionLayer {
    AttentionConfig config;
    Matrix w_q, w_k, w_v, w_o; // d_model x d_model
    Matrix ff_w1;              // d_model x d_ff
    std::vector<double> ff_b1; // d_ff
    Matrix ff_w2;              // d_ff x d_model
    std::vector<double> ff_b2;           // d_model
    std::vector<double> ln1_gain, ln1_bias; // d_model
    std::vector<double> ln2_gain, ln2_bias; // d_model

    // Deterministic uniform init (explicit arithmetic, no distribution
    // objects, so the bytes do not depend on the standard library).
    static AttentionLayer seeded(const AttentionConfig& config, std::uint64_t seed);
};

// Row-normalized exponentials weighted by the mask:
// out[j][i] = m[j][i] * exp(x[j][i]) / sum_k m[j][k] * exp(x[j][k]),
// computed stably by subtracting each row's max over supported (m > 0)
// entries. Entries with m == 0 come out exactly 0; rows sum to 1.
// Throws ZeroMaskRow when a mask row has no support, DimensionMismatch on
// shape errors.
Matrix masked_softmax(const Matrix& mask, const Matrix& logits);

// Single-head syntax-guided attention: masked_softmax(G, Q K^T / sqrt(d_k)) V.
// With an all-ones mask this is vanilla scaled dot-product attention.
Matrix syntax_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                        const Matrix& mask);

// Per-head attention matrices captured during a forward pass, for support-
// pattern inspection.
struct EncoderTrace {
    std::vector<Matrix> head_attention; // num_heads matrices, n x n
};

Matrix encoder_forward(const AttentionLayer& layer, const Matrix& input,
                       const Matrix& mask, EncoderTrace* trace = nullptr);

struct LayerGradients {
    Matrix w_q, w_k, w_v, w_o, ff_w1, ff_w2;
    std::vector<double> ff_b1, ff_b2, ln1_gain, ln1_bias, ln2_gain, ln2_bias;
    Matrix input;
};

// Exact reverse-mode gradients of encoder_forward with respect to every
// weight and the input, for the scalar loss sum(output * upstream_grad).
// The mask is a constant: no gradient flows into it.
LayerGradients encoder_backward(const AttentionLayer& layer, const Matrix& input,
                                const Matrix& mask, const Matrix& upstream_grad);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t checked_parameters = 0;
};

// Central finite differences over every weight, bias and input entry against
// encoder_backward. rel error = |fd - analytic| / max(1, |fd|, |analytic|).
GradCheckReport finite_difference_check(const AttentionLayer& layer, const Matrix& input,
                                        const Matrix& mask, const Matrix& upstream_grad,
                                        double step = 1e-5);

} // namespace sgattn
