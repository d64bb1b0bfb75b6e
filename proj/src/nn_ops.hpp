#pragma once

#include <cstdint>
#include <memory>

#include "rng.hpp"
#include "tensor.hpp"

namespace cipherlab {

// Softmax over the last axis. The row max is subtracted as a constant,
// which leaves the value and all derivatives exact (softmax is invariant
// to constant row shifts).
template <class T>
Tensor<T> softmax(const Tensor<T>& x) {
    if (x.rank() < 1) throw ShapeError("softmax: rank >= 1 required");
    const std::size_t axis = x.rank() - 1;
    const std::size_t cols = x.extent(axis);
    const std::size_t rows = x.size() / cols;
    std::vector<T> mx(rows);
    const T* p = x.data();
    for (std::size_t r = 0; r < rows; ++r) {
        T m = p[r * cols];
        for (std::size_t c = 1; c < cols; ++c) m = std::max(m, p[r * cols + c]);
        mx[r] = m;
    }
    Shape mshape = x.shape();
    mshape[axis] = 1;
    Tensor<T> shift = broadcast_to(Tensor<T>(mshape, std::move(mx)), x.shape());
    Tensor<T> e = exp(sub(x, shift));
    Tensor<T> denom = broadcast_to(sum_keepdim(e, axis), x.shape());
    return div(e, denom);
}

// Per-row normalization over channels to zero mean / unit variance, then
// affine with gain and bias of length C. x is [N, C].
template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                     T eps = T(1e-6)) {
    if (x.rank() != 2) throw ShapeError("layer_norm: [N,C] input required");
    const std::size_t c = x.extent(1);
    if (gain.size() != c || bias.size() != c)
        throw ShapeError("layer_norm: gain/bias must have length C");
    if (!(eps > T(0))) throw ShapeError("layer_norm: eps must be positive");
    Tensor<T> m = mean_keepdim(x, 1);
    Tensor<T> centered = sub(x, broadcast_to(m, x.shape()));
    Tensor<T> var = mean_keepdim(square(centered), 1);
    Tensor<T> normed = div(centered, broadcast_to(sqrt(add_const(var, eps)), x.shape()));
    Tensor<T> g2 = broadcast_to(reshape(gain, Shape{1, c}), x.shape());
    Tensor<T> b2 = broadcast_to(reshape(bias, Shape{1, c}), x.shape());
    return add(mul(normed, g2), b2);
}

namespace detail {

inline std::shared_ptr<const std::vector<std::size_t>> conv_pad_indices(std::size_t batch,
                                                                        std::size_t n,
                                                                        std::size_t pad_left,
                                                                        std::size_t padded) {
    auto idx = std::make_shared<std::vector<std::size_t>>(batch * n);
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < n; ++i) (*idx)[b * n + i] = b * padded + pad_left + i;
    return idx;
}

inline std::shared_ptr<const std::vector<std::size_t>> conv_tap_indices(std::size_t batch,
                                                                        std::size_t out_len,
                                                                        std::size_t fs,
                                                                        std::size_t stride,
                                                                        std::size_t padded) {
    auto idx = std::make_shared<std::vector<std::size_t>>(batch * out_len * fs);
    std::size_t k = 0;
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t m = 0; m < out_len; ++m)
            for (std::size_t j = 0; j < fs; ++j) (*idx)[k++] = b * padded + m * stride + j;
    return idx;
}

} // namespace detail

// 1-D cross-correlation over a batch of sequences laid out as [batch*n, c_in]
// rows (batch-major). "same" zero padding; output is [batch*ceil(n/stride),
// c_out]. Weights are [fs, c_in, c_out], fs odd. Internally an im2col gather
// plus one matmul, so every piece has an exact higher-order adjoint.
template <class T>
Tensor<T> conv1d_batched(const Tensor<T>& x, std::size_t batch, std::size_t n,
                         const Tensor<T>& w, const Tensor<T>& bias, std::size_t stride) {
    if (x.rank() != 2 || w.rank() != 3) throw ShapeError("conv1d: x must be [N,Cin], w [fs,Cin,Cout]");
    if (x.extent(0) != batch * n) throw ShapeError("conv1d: row count != batch*n");
    const std::size_t fs = w.extent(0), cin = w.extent(1), cout = w.extent(2);
    if (fs % 2 == 0) throw ShapeError("conv1d: filter size must be odd");
    if (x.extent(1) != cin) throw ShapeError("conv1d: channel mismatch");
    if (bias.size() != cout) throw ShapeError("conv1d: bias length != c_out");
    if (stride == 0) throw ShapeError("conv1d: stride must be positive");
    const std::size_t out_len = (n + stride - 1) / stride;

    Tensor<T> flat;
    if (fs == 1 && stride == 1) {
        flat = matmul(x, reshape(w, Shape{cin, cout}));
    } else {
        const std::size_t p = (fs - 1) / 2;
        const std::size_t last_tap = (out_len - 1) * stride + fs - 1; // in padded coords
        const std::size_t padded = std::max(n + 2 * p, last_tap + 1);
        Tensor<T> xp = scatter_rows(x, detail::conv_pad_indices(batch, n, p, padded),
                                    batch * padded);
        Tensor<T> cols = gather_rows(xp, detail::conv_tap_indices(batch, out_len, fs, stride, padded));
        flat = matmul(reshape(cols, Shape{batch * out_len, fs * cin}),
                      reshape(w, Shape{fs * cin, cout}));
    }
    Tensor<T> b2 = broadcast_to(reshape(bias, Shape{1, cout}), flat.shape());
    return add(flat, b2);
}

template <class T>
Tensor<T> conv1d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& bias,
                 std::size_t stride) {
    if (x.rank() != 2) throw ShapeError("conv1d: x must be [N,Cin]");
    return conv1d_batched(x, 1, x.extent(0), w, bias, stride);
}

// Training mode zeroes each element with probability `rate` and rescales
// survivors by 1/(1-rate); eval mode passes x through untouched.
template <class T>
Tensor<T> dropout(const Tensor<T>& x, double rate, Rng& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) throw ShapeError("dropout: rate must be in [0,1)");
    if (!training || rate == 0.0) return x;
    const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
    std::vector<T> mask(x.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = rng.uniform() < rate ? T(0) : keep_scale;
    return mul(x, Tensor<T>(x.shape(), std::move(mask)));
}

template <class T>
Tensor<T> one_hot(const std::vector<std::int32_t>& seq, std::size_t vocab) {
    std::vector<T> v(seq.size() * vocab, T(0));
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] < 0 || static_cast<std::size_t>(seq[i]) >= vocab)
            throw ShapeError("one_hot: id out of range");
        v[i * vocab + static_cast<std::size_t>(seq[i])] = T(1);
    }
    return Tensor<T>(Shape{seq.size(), vocab}, std::move(v));
}

// rows · W. Rows must be distributions over the vocabulary (one-hot or
// softmax); for one-hot rows this is exactly a table lookup.
template <class T>
Tensor<T> embed(const Tensor<T>& rows, const Tensor<T>& table) {
    if (rows.rank() != 2 || table.rank() != 2 || rows.extent(1) != table.extent(0))
        throw ShapeError("embed: rows [N,V] and table [V,E] required");
    const T* p = rows.data();
    const std::size_t n = rows.extent(0), v = rows.extent(1);
    for (std::size_t r = 0; r < n; ++r) {
        T sum = T(0);
        for (std::size_t c = 0; c < v; ++c) {
            const T e = p[r * v + c];
            if (e < T(0)) throw ShapeError("embed: negative row entry");
            sum += e;
        }
        if (std::abs(static_cast<double>(sum) - 1.0) > 1e-5)
            throw ShapeError("embed: row does not sum to 1");
    }
    return matmul(rows, table);
}

// Fixed sin/cos positional signal for a [N, C] sequence (C even).
template <class T>
Tensor<T> sinusoidal_signal(std::size_t n, std::size_t c) {
    if (c % 2 != 0) throw ShapeError("sinusoidal timing requires an even channel count");
    std::vector<T> v(n * c);
    for (std::size_t pos = 0; pos < n; ++pos)
        for (std::size_t k = 0; 2 * k < c; ++k) {
            const double freq = std::pow(1e5, -(2.0 * static_cast<double>(k)) / static_cast<double>(c));
            v[pos * c + 2 * k] = static_cast<T>(std::sin(static_cast<double>(pos) * freq));
            v[pos * c + 2 * k + 1] = static_cast<T>(std::cos(static_cast<double>(pos) * freq));
        }
    return Tensor<T>(Shape{n, c}, std::move(v));
}

// Argmax over the last axis; ties resolve to the lowest index.
template <class T>
std::vector<std::int32_t> argmax_rows(const Tensor<T>& x) {
    const std::size_t cols = x.extent(x.rank() - 1);
    const std::size_t rows = x.size() / cols;
    std::vector<std::int32_t> out(rows);
    const T* p = x.data();
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < cols; ++c)
            if (p[r * cols + c] > p[r * cols + best]) best = c;
        out[r] = static_cast<std::int32_t>(best);
    }
    return out;
}

// (‖∂D(x̂)/∂x̂‖₂ − 1)² for a single sequence, differentiable w.r.t. the
// discriminator's parameters. Requires a higher-order tape so the inner
// backward pass is itself recorded.
template <class T, class D>
Tensor<T> gradient_penalty(D&& discriminator, const Tensor<T>& xhat) {
    if (!xhat.on_tape() || xhat.tape()->mode() != TapeMode::higher_order)
        throw ShapeError("gradient_penalty: higher-order tape required");
    Tape<T>* tape = xhat.tape();
    Tensor<T> score = discriminator(xhat);
    // A critic that ignores its input has an identically zero gradient.
    Tensor<T> g = score.on_tape() ? tape->gradients(sum_all(score), {xhat}, true)[0]
                                  : Tensor<T>::zeros(xhat.shape());
    Tensor<T> norm = l2_norm_all(g, T(1e-12));
    return square(add_const(norm, T(-1)));
}

} // namespace cipherlab
