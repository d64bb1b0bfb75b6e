#include "model.hpp"

#include <cmath>
#include <stdexcept>

namespace cipherlab {

std::string timing_mode_name(TimingMode mode) {
    switch (mode) {
    case TimingMode::none: return "none";
    case TimingMode::sinusoidal: return "sinusoidal";
    case TimingMode::concat: return "concat";
    }
    return "none";
}

TimingMode timing_mode_from(const std::string& name) {
    if (name == "none") return TimingMode::none;
    if (name == "sinusoidal") return TimingMode::sinusoidal;
    if (name == "concat") return TimingMode::concat;
    throw std::invalid_argument("unknown timing mode '" + name + "'");
}

void GanConfig::validate() const {
    if (vocab < 2) throw std::invalid_argument("config: vocab must be at least 2");
    if (batch == 0 || seq_len == 0) throw std::invalid_argument("config: empty batch or sequence");
    if (!(lambda_cyc > 0.0)) throw std::invalid_argument("config: lambda must be positive");
    if (!(alpha_gp > 0.0)) throw std::invalid_argument("config: alpha must be positive");
    if (timing == TimingMode::sinusoidal && emb_dim % 2 != 0)
        throw std::invalid_argument("config: sinusoidal timing needs an even embedding dim");
    if (seq_len < (std::size_t{1} << disc_layers))
        throw std::invalid_argument("config: seq_len below the critic's receptive-field minimum (2^" +
                                    std::to_string(disc_layers) + ")");
    if (loss == GanLoss::log_likelihood)
        throw std::invalid_argument("config: log-likelihood loss is a stub; use lsgan");
}

Param& ParamStore::add(const std::string& name, Shape shape, std::vector<float> value) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    if (shape_numel(shape) != value.size())
        throw std::invalid_argument("parameter value does not match shape: " + name);
    index_.emplace(name, params_.size());
    params_.push_back(Param{name, std::move(shape), std::move(value)});
    return params_.back();
}

Param& ParamStore::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
    return params_[it->second];
}

const Param& ParamStore::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
    return params_[it->second];
}

std::vector<Param*> ParamStore::group(const std::vector<std::string>& prefixes) {
    std::vector<Param*> out;
    for (auto& p : params_)
        for (const auto& prefix : prefixes)
            if (p.name.rfind(prefix, 0) == 0) {
                out.push_back(&p);
                break;
            }
    return out;
}

std::vector<std::string> ParamStore::group_names(const std::vector<std::string>& prefixes) const {
    std::vector<std::string> out;
    for (const auto& p : params_)
        for (const auto& prefix : prefixes)
            if (p.name.rfind(prefix, 0) == 0) {
                out.push_back(p.name);
                break;
            }
    return out;
}

namespace {

std::vector<float> uniform_fan_in(Rng& rng, std::size_t n, std::size_t fan_in, double scale) {
    const double bound = scale / std::sqrt(static_cast<double>(fan_in));
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
    return v;
}

void add_conv_layer(ParamStore& store, Rng& rng, const std::string& name, std::size_t fs,
                    std::size_t cin, std::size_t cout, double scale, bool with_norm) {
    store.add(name + "/w", Shape{fs, cin, cout}, uniform_fan_in(rng, fs * cin * cout, fs * cin, scale));
    store.add(name + "/b", Shape{cout}, std::vector<float>(cout, 0.0f));
    if (with_norm) {
        store.add(name + "/ln_g", Shape{cout}, std::vector<float>(cout, 1.0f));
        store.add(name + "/ln_b", Shape{cout}, std::vector<float>(cout, 0.0f));
    }
}

void add_generator(ParamStore& store, Rng& rng, const std::string& prefix, const GanConfig& cfg) {
    const std::size_t w = cfg.model_width();
    const std::size_t fc = cfg.gen_fc;
    add_conv_layer(store, rng, prefix + "/a0", 1, w, fc, cfg.init_scale, true);
    add_conv_layer(store, rng, prefix + "/a1", 1, fc, 2 * fc, cfg.init_scale, true);
    add_conv_layer(store, rng, prefix + "/a2", 1, 2 * fc, 4 * fc, cfg.init_scale, true);
    for (int r = 0; r < 5; ++r) {
        const std::string res = prefix + "/r" + std::to_string(r);
        add_conv_layer(store, rng, res + "/c0", 1, 4 * fc, 4 * fc, cfg.init_scale, false);
        add_conv_layer(store, rng, res + "/c1", 1, 4 * fc, 4 * fc, cfg.init_scale, false);
        store.add(res + "/ln_g", Shape{4 * fc}, std::vector<float>(4 * fc, 1.0f));
        store.add(res + "/ln_b", Shape{4 * fc}, std::vector<float>(4 * fc, 0.0f));
    }
    // Raw projection to vocabulary logits.
    add_conv_layer(store, rng, prefix + "/out", 1, 4 * fc, cfg.vocab, cfg.init_scale, false);
}

void add_discriminator(ParamStore& store, Rng& rng, const std::string& prefix,
                       const GanConfig& cfg) {
    std::size_t cin = cfg.model_width();
    for (std::size_t i = 0; i < cfg.disc_layers; ++i) {
        const std::size_t cout = cfg.disc_fc << i;
        add_conv_layer(store, rng, prefix + "/l" + std::to_string(i), 15, cin, cout,
                       cfg.init_scale, true);
        cin = cout;
    }
    // Raw linear head; no normalization or activation on the critic output.
    add_conv_layer(store, rng, prefix + "/head", 15, cin, 1, cfg.init_scale, false);
}

} // namespace

ParamStore init_model_params(const GanConfig& cfg, Rng rng) {
    cfg.validate();
    ParamStore store;
    const double emb_bound = cfg.init_scale * std::sqrt(3.0 / static_cast<double>(cfg.emb_dim));
    auto emb_init = [&](Rng r) {
        std::vector<float> v(cfg.vocab * cfg.emb_dim);
        for (auto& x : v) x = static_cast<float>((2.0 * r.uniform() - 1.0) * emb_bound);
        return v;
    };
    if (cfg.share_embeddings) {
        store.add("emb/shared", Shape{cfg.vocab, cfg.emb_dim}, emb_init(rng.fork(1)));
    } else {
        store.add("emb/x", Shape{cfg.vocab, cfg.emb_dim}, emb_init(rng.fork(1)));
        store.add("emb/y", Shape{cfg.vocab, cfg.emb_dim}, emb_init(rng.fork(2)));
    }
    if (cfg.timing == TimingMode::concat) {
        Rng tr = rng.fork(3);
        store.add("time/w", Shape{cfg.seq_len, cfg.timing_dim},
                  uniform_fan_in(tr, cfg.seq_len * cfg.timing_dim, cfg.timing_dim, cfg.init_scale));
    }
    Rng gr = rng.fork(4);
    add_generator(store, gr, "gen_f", cfg);
    add_generator(store, gr, "gen_g", cfg);
    Rng dr = rng.fork(5);
    add_discriminator(store, dr, "disc_x", cfg);
    add_discriminator(store, dr, "disc_y", cfg);
    return store;
}

BoundParams::BoundParams(Tape<float>& tape, ParamStore& store) {
    for (auto& p : store.all())
        bound_.emplace(p.name, tape.leaf(Tensor<float>(p.shape, p.value)));
}

const Tensor<float>& BoundParams::operator[](const std::string& name) const {
    auto it = bound_.find(name);
    if (it == bound_.end()) throw std::out_of_range("no bound parameter named " + name);
    return it->second;
}

Tensor<float> embed_and_time(const Tensor<float>& rows, const Tensor<float>& table,
                             const BoundParams& params, const GanConfig& cfg, std::size_t batch,
                             std::size_t n) {
    Tensor<float> x = embed(rows, table);
    switch (cfg.timing) {
    case TimingMode::none: return x;
    case TimingMode::sinusoidal: {
        Tensor<float> sig = sinusoidal_signal<float>(n, cfg.emb_dim);
        // Tile the per-position signal over the batch.
        std::vector<float> tiled(batch * n * cfg.emb_dim);
        for (std::size_t b = 0; b < batch; ++b)
            std::copy(sig.values().begin(), sig.values().end(),
                      tiled.begin() + static_cast<std::ptrdiff_t>(b * n * cfg.emb_dim));
        return add(x, Tensor<float>(Shape{batch * n, cfg.emb_dim}, std::move(tiled)));
    }
    case TimingMode::concat: {
        const Tensor<float>& table_t = params["time/w"];
        if (n > table_t.extent(0))
            throw ShapeError("timing: sequence length exceeds the concat table size");
        auto idx = std::make_shared<std::vector<std::size_t>>(batch * n);
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t i = 0; i < n; ++i) (*idx)[b * n + i] = i;
        return concat(x, gather_rows(table_t, idx), 1);
    }
    }
    return x;
}

namespace {

Tensor<float> conv_layer(const BoundParams& p, const std::string& name, const Tensor<float>& x,
                         std::size_t batch, std::size_t n, std::size_t stride) {
    Tensor<float> h = conv1d_batched(x, batch, n, p[name + "/w"], p[name + "/b"], stride);
    h = layer_norm(h, p[name + "/ln_g"], p[name + "/ln_b"]);
    return relu(h);
}

Tensor<float> res_block(const BoundParams& p, const std::string& name, const Tensor<float>& x,
                        std::size_t batch, std::size_t n) {
    Tensor<float> h = conv1d_batched(x, batch, n, p[name + "/c0/w"], p[name + "/c0/b"], 1);
    h = conv1d_batched(h, batch, n, p[name + "/c1/w"], p[name + "/c1/b"], 1);
    h = layer_norm(add(x, h), p[name + "/ln_g"], p[name + "/ln_b"]);
    return relu(h);
}

} // namespace

Tensor<float> generator_forward(const BoundParams& params, const std::string& prefix,
                                const Tensor<float>& t, const GanConfig& cfg) {
    (void)cfg;
    // Pointwise generator: positions never mix, so batch/len split is moot.
    const std::size_t rows = t.extent(0);
    Tensor<float> h = conv_layer(params, prefix + "/a0", t, 1, rows, 1);
    h = conv_layer(params, prefix + "/a1", h, 1, rows, 1);
    h = conv_layer(params, prefix + "/a2", h, 1, rows, 1);
    for (int r = 0; r < 5; ++r) h = res_block(params, prefix + "/r" + std::to_string(r), h, 1, rows);
    // Raw logits into the softmax; normalizing or clamping them here stalls
    // the mapping search.
    h = conv1d_batched(h, 1, rows, params[prefix + "/out/w"], params[prefix + "/out/b"], 1);
    return softmax(h);
}

Tensor<float> discriminator_forward(const BoundParams& params, const std::string& prefix,
                                    const Tensor<float>& t, std::size_t batch, std::size_t n,
                                    const GanConfig& cfg, Rng& rng, bool training) {
    if (n < (std::size_t{1} << cfg.disc_layers))
        throw ShapeError("discriminator: sequence shorter than the receptive-field minimum (2^" +
                         std::to_string(cfg.disc_layers) + ")");
    Tensor<float> h = dropout(t, cfg.dropout, rng, training);
    std::size_t len = n;
    for (std::size_t i = 0; i < cfg.disc_layers; ++i) {
        h = conv_layer(params, prefix + "/l" + std::to_string(i), h, batch, len, 2);
        len = (len + 1) / 2;
    }
    h = conv1d_batched(h, batch, len, params[prefix + "/head/w"], params[prefix + "/head/b"], 1);
    // Mean over remaining positions: one raw score per sequence.
    return mean_keepdim(reshape(h, Shape{batch, len}), 1);
}

GanLossTerms loss_lsgan(const BoundParams& params, const std::string& disc_prefix,
                        const Tensor<float>& real_in, const Tensor<float>& fake_in,
                        std::size_t batch, std::size_t n, const GanConfig& cfg, Rng& rng) {
    detail::require_same_shape("loss_lsgan", real_in, fake_in);
    Tensor<float> real_score =
        discriminator_forward(params, disc_prefix, real_in, batch, n, cfg, rng, true);
    Tensor<float> fake_score =
        discriminator_forward(params, disc_prefix, fake_in, batch, n, cfg, rng, true);

    GanLossTerms terms;
    Tensor<float> d_base = add(mean_all(square(add_const(real_score, -1.0f))),
                               mean_all(square(fake_score)));
    terms.g_loss = mean_all(square(add_const(fake_score, -1.0f)));

    // Interpolates: per-sample u on the segment between real and fake.
    const std::size_t width = real_in.extent(1);
    std::vector<float> u_rows(batch * n);
    for (std::size_t b = 0; b < batch; ++b) {
        const auto u = static_cast<float>(rng.uniform());
        for (std::size_t i = 0; i < n; ++i) u_rows[b * n + i] = u;
    }
    Tensor<float> u_col(Shape{batch * n, 1}, std::move(u_rows));
    Tensor<float> u_full = broadcast_to(u_col, Shape{batch * n, width});
    Tensor<float> one_minus_u = add_const(neg(u_full), 1.0f);
    Tensor<float> xhat = add(mul(u_full, real_in), mul(one_minus_u, fake_in));

    Tensor<float> xhat_score =
        discriminator_forward(params, disc_prefix, xhat, batch, n, cfg, rng, true);
    Tape<float>* tape = xhat.tape();
    if (!tape || tape->mode() != TapeMode::higher_order)
        throw ShapeError("loss_lsgan: gradient penalty requires a higher-order tape");
    Tensor<float> grad = tape->gradients(sum_all(xhat_score), {xhat}, true)[0];
    Tensor<float> per_pos = sum_keepdim(square(grad), 1);             // [B*n, 1]
    Tensor<float> per_seq = sum_keepdim(reshape(per_pos, Shape{batch, n}), 1); // [B,1]
    Tensor<float> norms = sqrt(add_const(per_seq, 1e-12f));
    terms.gp = mean_all(square(add_const(norms, -1.0f)));

    terms.d_loss = add(d_base, scale(terms.gp, static_cast<float>(cfg.alpha_gp)));
    return terms;
}

Tensor<float> loss_cycle(const Tensor<float>& recon_x, const Tensor<float>& x_rows,
                         const Tensor<float>& recon_y, const Tensor<float>& y_rows) {
    auto direction = [](const Tensor<float>& recon, const Tensor<float>& rows) {
        return mean_all(sum_keepdim(abs(sub(recon, rows)), 1));
    };
    return add(direction(recon_x, x_rows), direction(recon_y, y_rows));
}

} // namespace cipherlab
