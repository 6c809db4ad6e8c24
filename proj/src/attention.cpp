#include "sgattn/attention.hpp"

#include "sgattn/errors.hpp"
#include "sgattn/kernels.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sgattn {

namespace {

constexpr double kLayerNormEpsilon = 1e-5;

struct LayerNormCache {
    Matrix normalized;           // x-hat
    std::vector<double> inv_std; // per row
};

Matrix layer_norm(const Matrix& x, const std::vector<double>& gain,
                  const std::vector<double>& bias, LayerNormCache& cache) {
    const std::size_t n = x.rows(), d = x.cols();
    cache.normalized = Matrix(n, d);
    cache.inv_std.assign(n, 0.0);
    Matrix out(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row(i);
        const double mean = kernels::vsum(row, d) / static_cast<double>(d);
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = row[j] - mean;
            var += c * c;
        }
        var /= static_cast<double>(d);
        const double inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        cache.inv_std[i] = inv_std;
        for (std::size_t j = 0; j < d; ++j) {
            const double normalized = (row[j] - mean) * inv_std;
            cache.normalized(i, j) = normalized;
            out(i, j) = gain[j] * normalized + bias[j];
        }
    }
    return out;
}

Matrix layer_norm_backward(const Matrix& d_out, const LayerNormCache& cache,
                           const std::vector<double>& gain, std::vector<double>& d_gain,
                           std::vector<double>& d_bias) {
    const std::size_t n = d_out.rows(), d = d_out.cols();
    Matrix dx(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double g = d_out(i, j);
            const double xhat = cache.normalized(i, j);
            d_gain[j] += g * xhat;
            d_bias[j] += g;
            const double dxhat = g * gain[j];
            mean_dxhat += dxhat;
            mean_dxhat_xhat += dxhat * xhat;
        }
        mean_dxhat /= static_cast<double>(d);
        mean_dxhat_xhat /= static_cast<double>(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double dxhat = d_out(i, j) * gain[j];
            dx(i, j) = cache.inv_std[i] *
                       (dxhat - mean_dxhat - cache.normalized(i, j) * mean_dxhat_xhat);
        }
    }
    return dx;
}

Matrix add_row_bias(const Matrix& m, const std::vector<double>& bias) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i)
        kernels::vadd(out.row(i), bias.data(), out.row(i), out.cols());
    return out;
}

struct ForwardCache {
    Matrix q, k, v;
    std::vector<Matrix> attn;     // per head
    std::vector<Matrix> head_out; // per head, n x d_k
    Matrix heads_concat;
    Matrix attn_proj;
    Matrix r1;
    LayerNormCache ln1;
    Matrix y;
    Matrix z1;
    Matrix u; // relu(z1)
    Matrix f;
    Matrix r2;
    LayerNormCache ln2;
    Matrix out;
};

void run_forward(const AttentionLayer& layer, const Matrix& input, const Matrix& mask,
                 ForwardCache& cache) {
    const AttentionConfig& cfg = layer.config;
    cfg.validate();
    const std::size_t n = input.rows();
    if (input.cols() != cfg.d_model)
        throw DimensionMismatch("encoder input width does not match d_model");
    if (mask.rows() != n || mask.cols() != n)
        throw DimensionMismatch("mask shape does not match sequence length");

    const std::size_t dk = cfg.head_dim();
    const double scaling = 1.0 / std::sqrt(static_cast<double>(dk));

    cache.q = matmul(input, layer.w_q);
    cache.k = matmul(input, layer.w_k);
    cache.v = matmul(input, layer.w_v);

    const Matrix all_ones = Matrix::ones(n, n);
    cache.attn.clear();
    cache.head_out.clear();
    cache.heads_concat = Matrix(n, cfg.d_model);
    for (std::size_t h = 0; h < cfg.num_heads; ++h) {
        const std::size_t c0 = h * dk, c1 = c0 + dk;
        Matrix qh = slice_cols(cache.q, c0, c1);
        Matrix kh = slice_cols(cache.k, c0, c1);
        Matrix vh = slice_cols(cache.v, c0, c1);
        Matrix scores = matmul_nt(qh, kh);
        scale_inplace(scores, scaling);
        const Matrix& head_mask = h < cfg.grammar_heads ? mask : all_ones;
        Matrix attn = masked_softmax(head_mask, scores);
        Matrix out = matmul(attn, vh);
        paste_cols(cache.heads_concat, out, c0);
        cache.attn.push_back(std::move(attn));
        cache.head_out.push_back(std::move(out));
    }
    cache.attn_proj = matmul(cache.heads_concat, layer.w_o);
    cache.r1 = add(input, cache.attn_proj);
    cache.y = layer_norm(cache.r1, layer.ln1_gain, layer.ln1_bias, cache.ln1);

    cache.z1 = add_row_bias(matmul(cache.y, layer.ff_w1), layer.ff_b1);
    cache.u = cache.z1;
    for (std::size_t idx = 0; idx < cache.u.size(); ++idx)
        if (cache.u.data()[idx] < 0.0) cache.u.data()[idx] = 0.0;
    cache.f = add_row_bias(matmul(cache.u, layer.ff_w2), layer.ff_b2);
    cache.r2 = add(cache.y, cache.f);
    cache.out = layer_norm(cache.r2, layer.ln2_gain, layer.ln2_bias, cache.ln2);
}

// Softmax-shaped jacobian restricted to the supported entries; masked-out
// logits receive exactly zero gradient.
Matrix masked_softmax_backward(const Matrix& mask, const Matrix& attn, const Matrix& d_attn) {
    const std::size_t n = attn.rows(), m = attn.cols();
    Matrix dx(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            if (mask(i, j) > 0.0) inner += d_attn(i, j) * attn(i, j);
        for (std::size_t j = 0; j < m; ++j)
            dx(i, j) = mask(i, j) > 0.0 ? attn(i, j) * (d_attn(i, j) - inner) : 0.0;
    }
    return dx;
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> sums(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        kernels::vadd(sums.data(), m.row(i), sums.data(), m.cols());
    return sums;
}

} // namespace

void AttentionConfig::validate() const {
    if (d_model == 0 || num_heads == 0)
        throw std::invalid_argument("d_model and num_heads must be positive");
    if (d_model % num_heads != 0)
        throw DimensionMismatch("d_model must be divisible by num_heads");
    if (grammar_heads > num_heads)
        throw std::invalid_argument("grammar_heads must not exceed num_heads");
    if (!(tau > 0.0))
        throw NonPositiveTau("config tau must be positive");
}

AttentionLayer AttentionLayer::seeded(const AttentionConfig& config, std::uint64_t seed) {
    config.validate();
    AttentionLayer layer;
    layer.config = config;
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
    };
    auto init = [&](Matrix& m, std::size_t in_dim, std::size_t out_dim) {
        m = Matrix(in_dim, out_dim);
        const double r = 1.0 / std::sqrt(static_cast<double>(in_dim));
        for (std::size_t idx = 0; idx < m.size(); ++idx)
            m.data()[idx] = (2.0 * uniform() - 1.0) * r;
    };
    const std::size_t dm = config.d_model, dff = config.ff_dim();
    init(layer.w_q, dm, dm);
    init(layer.w_k, dm, dm);
    init(layer.w_v, dm, dm);
    init(layer.w_o, dm, dm);
    init(layer.ff_w1, dm, dff);
    init(layer.ff_w2, dff, dm);
    layer.ff_b1.assign(dff, 0.0);
    layer.ff_b2.assign(dm, 0.0);
    layer.ln1_gain.assign(dm, 1.0);
    layer.ln1_bias.assign(dm, 0.0);
    layer.ln2_gain.assign(dm, 1.0);
    layer.ln2_bias.assign(dm, 0.0);
    return layer;
}

Matrix masked_softmax(const Matrix& mask, const Matrix& logits) {
    if (!mask.same_shape(logits))
        throw DimensionMismatch("masked_softmax: mask and logits shapes differ");
    const std::size_t n = mask.rows(), m = mask.cols();
    Matrix out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = 0.0;
        bool any = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (mask(i, j) > 0.0 && (!any || logits(i, j) > row_max)) {
                row_max = logits(i, j);
                any = true;
            }
        }
        if (!any)
            throw ZeroMaskRow("mask row " + std::to_string(i) + " has no support");
        double denom = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (mask(i, j) > 0.0) {
                const double e = mask(i, j) * std::exp(logits(i, j) - row_max);
                out(i, j) = e;
                denom += e;
            } else {
                out(i, j) = 0.0;
            }
        }
        for (std::size_t j = 0; j < m; ++j)
            if (mask(i, j) > 0.0) out(i, j) /= denom;
    }
    return out;
}

Matrix syntax_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                        const Matrix& mask) {
    if (q.cols() != k.cols() || k.rows() != v.rows())
        throw DimensionMismatch("syntax_attention: Q/K/V shapes inconsistent");
    if (mask.rows() != q.rows() || mask.cols() != k.rows())
        throw DimensionMismatch("syntax_attention: mask shape inconsistent");
    Matrix scores = matmul_nt(q, k);
    scale_inplace(scores, 1.0 / std::sqrt(static_cast<double>(q.cols())));
    return matmul(masked_softmax(mask, scores), v);
}

Matrix encoder_forward(const AttentionLayer& layer, const Matrix& input, const Matrix& mask,
                       EncoderTrace* trace) {
    ForwardCache cache;
    run_forward(layer, input, mask, cache);
    if (trace)
        trace->head_attention = cache.attn;
    return cache.out;
}

LayerGradients encoder_backward(const AttentionLayer& layer, const Matrix& input,
                                const Matrix& mask, const Matrix& upstream_grad) {
    ForwardCache cache;
    run_forward(layer, input, mask, cache);
    if (!upstream_grad.same_shape(cache.out))
        throw DimensionMismatch("upstream gradient shape does not match output");

    const AttentionConfig& cfg = layer.config;
    const std::size_t n = input.rows();
    const std::size_t dk = cfg.head_dim();
    const double scaling = 1.0 / std::sqrt(static_cast<double>(dk));

    LayerGradients g;
    g.ln1_gain.assign(cfg.d_model, 0.0);
    g.ln1_bias.assign(cfg.d_model, 0.0);
    g.ln2_gain.assign(cfg.d_model, 0.0);
    g.ln2_bias.assign(cfg.d_model, 0.0);

    // out = LN2(r2)
    Matrix d_r2 =
        layer_norm_backward(upstream_grad, cache.ln2, layer.ln2_gain, g.ln2_gain, g.ln2_bias);

    // r2 = y + f
    Matrix d_y = d_r2;
    const Matrix& d_f = d_r2;

    // f = u W2 + b2
    Matrix d_u = matmul_nt(d_f, layer.ff_w2);
    g.ff_w2 = matmul_tn(cache.u, d_f);
    g.ff_b2 = column_sums(d_f);

    // u = relu(z1)
    Matrix d_z1 = d_u;
    for (std::size_t idx = 0; idx < d_z1.size(); ++idx)
        if (cache.z1.data()[idx] <= 0.0) d_z1.data()[idx] = 0.0;

    // z1 = y W1 + b1
    add_inplace(d_y, matmul_nt(d_z1, layer.ff_w1));
    g.ff_w1 = matmul_tn(cache.y, d_z1);
    g.ff_b1 = column_sums(d_z1);

    // y = LN1(r1)
    Matrix d_r1 = layer_norm_backward(d_y, cache.ln1, layer.ln1_gain, g.ln1_gain, g.ln1_bias);

    // r1 = input + heads_concat W_o
    g.input = d_r1;
    Matrix d_heads = matmul_nt(d_r1, layer.w_o);
    g.w_o = matmul_tn(cache.heads_concat, d_r1);

    const Matrix all_ones = Matrix::ones(n, n);
    Matrix d_q(n, cfg.d_model), d_k(n, cfg.d_model), d_v(n, cfg.d_model);
    for (std::size_t h = 0; h < cfg.num_heads; ++h) {
        const std::size_t c0 = h * dk, c1 = c0 + dk;
        Matrix d_head = slice_cols(d_heads, c0, c1);
        Matrix vh = slice_cols(cache.v, c0, c1);
        Matrix qh = slice_cols(cache.q, c0, c1);
        Matrix kh = slice_cols(cache.k, c0, c1);

        // head_out = attn vh
        Matrix d_attn = matmul_nt(d_head, vh);
        Matrix d_vh = matmul_tn(cache.attn[h], d_head);

        const Matrix& head_mask = h < cfg.grammar_heads ? mask : all_ones;
        Matrix d_scores = masked_softmax_backward(head_mask, cache.attn[h], d_attn);
        scale_inplace(d_scores, scaling);

        // scores = qh kh^T
        Matrix d_qh = matmul(d_scores, kh);
        Matrix d_kh = matmul_tn(d_scores, qh);

        paste_cols(d_q, d_qh, c0);
        paste_cols(d_k, d_kh, c0);
        paste_cols(d_v, d_vh, c0);
    }

    g.w_q = matmul_tn(input, d_q);
    g.w_k = matmul_tn(input, d_k);
    g.w_v = matmul_tn(input, d_v);
    add_inplace(g.input, matmul_nt(d_q, layer.w_q));
    add_inplace(g.input, matmul_nt(d_k, layer.w_k));
    add_inplace(g.input, matmul_nt(d_v, layer.w_v));
    return g;
}

namespace {

double loss_for(const AttentionLayer& layer, const Matrix& input, const Matrix& mask,
                const Matrix& upstream) {
    Matrix out = encoder_forward(layer, input, mask);
    return kernels::dot(out.data(), upstream.data(), out.size());
}

} // namespace

GradCheckReport finite_difference_check(const AttentionLayer& layer, const Matrix& input,
                                        const Matrix& mask, const Matrix& upstream_grad,
                                        double step) {
    LayerGradients analytic = encoder_backward(layer, input, mask, upstream_grad);

    AttentionLayer work = layer;
    Matrix work_input = input;

    struct Span {
        double* values;
        const double* grads;
        std::size_t count;
    };
    const std::vector<Span> spans = {
        {work.w_q.data(), analytic.w_q.data(), work.w_q.size()},
        {work.w_k.data(), analytic.w_k.data(), work.w_k.size()},
        {work.w_v.data(), analytic.w_v.data(), work.w_v.size()},
        {work.w_o.data(), analytic.w_o.data(), work.w_o.size()},
        {work.ff_w1.data(), analytic.ff_w1.data(), work.ff_w1.size()},
        {work.ff_b1.data(), analytic.ff_b1.data(), work.ff_b1.size()},
        {work.ff_w2.data(), analytic.ff_w2.data(), work.ff_w2.size()},
        {work.ff_b2.data(), analytic.ff_b2.data(), work.ff_b2.size()},
        {work.ln1_gain.data(), analytic.ln1_gain.data(), work.ln1_gain.size()},
        {work.ln1_bias.data(), analytic.ln1_bias.data(), work.ln1_bias.size()},
        {work.ln2_gain.data(), analytic.ln2_gain.data(), work.ln2_gain.size()},
        {work.ln2_bias.data(), analytic.ln2_bias.data(), work.ln2_bias.size()},
        {work_input.data(), analytic.input.data(), work_input.size()},
    };

    GradCheckReport report;
    for (const Span& span : spans) {
        for (std::size_t idx = 0; idx < span.count; ++idx) {
            const double saved = span.values[idx];
            span.values[idx] = saved + step;
            const double plus = loss_for(work, work_input, mask, upstream_grad);
            span.values[idx] = saved - step;
            const double minus = loss_for(work, work_input, mask, upstream_grad);
            span.values[idx] = saved;
            const double fd = (plus - minus) / (2.0 * step);
            const double an = span.grads[idx];
            const double denom = std::max({1.0, std::abs(fd), std::abs(an)});
            report.max_rel_error = std::max(report.max_rel_error, std::abs(fd - an) / denom);
            ++report.checked_parameters;
        }
    }
    return report;
}

} // namespace sgattn
