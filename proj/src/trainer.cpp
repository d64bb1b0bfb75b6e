#include "trainer.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace cipherlab {

namespace {

// Substream purposes; fixed so checkpoints stay replayable.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamBanks = 2;
constexpr std::uint64_t kStreamTrain = 3;

std::vector<std::int32_t> flatten(const std::vector<TokenSeq>& bank) {
    std::vector<std::int32_t> out;
    out.reserve(bank.size() * (bank.empty() ? 0 : bank[0].size()));
    for (const auto& seq : bank) out.insert(out.end(), seq.begin(), seq.end());
    return out;
}

double fraction_equal(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++hits;
    return a.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(a.size());
}

} // namespace

StepGraph build_step_graph(const BoundParams& params, const Banks& banks, const GanConfig& cfg,
                           Rng& rng) {
    const std::size_t b = banks.x.size();
    const std::size_t n = banks.x.empty() ? 0 : banks.x[0].size();
    const Tensor<float>& emb_x = params[cfg.share_embeddings ? "emb/shared" : "emb/x"];
    const Tensor<float>& emb_y = params[cfg.share_embeddings ? "emb/shared" : "emb/y"];

    StepGraph g;
    Tensor<float> x_rows = one_hot<float>(flatten(banks.x), cfg.vocab);
    Tensor<float> y_rows = one_hot<float>(flatten(banks.y), cfg.vocab);
    Tensor<float> x_in = embed_and_time(x_rows, emb_x, params, cfg, b, n);
    Tensor<float> y_in = embed_and_time(y_rows, emb_y, params, cfg, b, n);

    g.fake_y_rows = generator_forward(params, "gen_f", x_in, cfg);
    g.fake_x_rows = generator_forward(params, "gen_g", y_in, cfg);
    Tensor<float> fake_y_in = embed_and_time(g.fake_y_rows, emb_y, params, cfg, b, n);
    Tensor<float> fake_x_in = embed_and_time(g.fake_x_rows, emb_x, params, cfg, b, n);

    GanLossTerms y_side = loss_lsgan(params, "disc_y", y_in, fake_y_in, b, n, cfg, rng);
    GanLossTerms x_side = loss_lsgan(params, "disc_x", x_in, fake_x_in, b, n, cfg, rng);
    g.d_y = y_side.d_loss;
    g.d_x = x_side.d_loss;
    g.g_f = y_side.g_loss;
    g.g_g = x_side.g_loss;
    g.gp_y = y_side.gp;
    g.gp_x = x_side.gp;

    Tensor<float> recon_x = generator_forward(params, "gen_g", fake_y_in, cfg);
    Tensor<float> recon_y = generator_forward(params, "gen_f", fake_x_in, cfg);
    g.cyc = loss_cycle(recon_x, x_rows, recon_y, y_rows);

    g.d_total = add(g.d_x, g.d_y);
    g.g_total = add(add(g.g_f, g.g_g), scale(g.cyc, static_cast<float>(cfg.lambda_cyc)));
    return g;
}

std::vector<std::string> Trainer::opt_g_names() const {
    return cfg_.emb_update == EmbeddingUpdate::critic
               ? params_.group_names({"gen_f", "gen_g", "time/"})
               : params_.group_names({"gen_f", "gen_g", "emb/", "time/"});
}

Trainer::Trainer(GanConfig cfg, TokenSeq stream, CipherSpec spec)
    : cfg_(cfg), stream_(std::move(stream)), spec_(std::move(spec)) {
    cfg_.validate();
    spec_.validate(cfg_.vocab);
    params_ = init_model_params(cfg_, Rng(cfg_.seed).fork(kStreamInit));
    auto init_state = [&](AdamState<float>& st, const std::vector<std::string>& names) {
        for (const auto& n : names) {
            const auto& p = params_.at(n);
            st.m.emplace_back(p.value.size(), 0.0f);
            st.v.emplace_back(p.value.size(), 0.0f);
        }
    };
    init_state(opt_d_, params_.group_names({"disc_x", "disc_y"}));
    init_state(opt_g_, opt_g_names());
    if (cfg_.emb_update == EmbeddingUpdate::critic)
        init_state(opt_e_, params_.group_names({"emb/"}));
}

MetricsRow Trainer::step(std::int64_t s) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng bank_rng = Rng(cfg_.seed).fork(kStreamBanks, static_cast<std::uint64_t>(s));
    const Banks banks = sample_banks(stream_, cfg_.batch, cfg_.seq_len, spec_, cfg_.vocab, bank_rng);

    Tape<float> tape(TapeMode::higher_order);
    BoundParams bound(tape, params_);
    Rng train_rng = Rng(cfg_.seed).fork(kStreamTrain, static_cast<std::uint64_t>(s));

    StepGraph graph;
    try {
        graph = build_step_graph(bound, banks, cfg_, train_rng);
    } catch (const NumericError& e) {
        throw NumericError("step " + std::to_string(s) + ": " + e.what());
    }

    const bool emb_with_critic = cfg_.emb_update == EmbeddingUpdate::critic;
    auto d_group = params_.group({"disc_x", "disc_y"});
    std::vector<Param*> g_group;
    for (const auto& name : opt_g_names()) g_group.push_back(&params_.at(name));
    auto e_group = params_.group({"emb/"});
    auto bound_of = [&](const std::vector<Param*>& group) {
        std::vector<Tensor<float>> out;
        out.reserve(group.size());
        for (const Param* p : group) out.push_back(bound[p->name]);
        return out;
    };

    const auto grads_d = tape.gradients(graph.d_total, bound_of(d_group), false);
    const auto grads_g = tape.gradients(graph.g_total, bound_of(g_group), false);
    std::vector<Tensor<float>> grads_e;
    if (emb_with_critic) {
        // Embeddings separate real from fake for the critics while staying
        // reconstructable: critic losses plus the weighted cycle term.
        Tensor<float> emb_objective =
            add(graph.d_total, scale(graph.cyc, static_cast<float>(cfg_.lambda_cyc)));
        grads_e = tape.gradients(emb_objective, bound_of(e_group), false);
    }

    const double lr = lr_schedule(s, cfg_.lr, cfg_.warmup_steps);
    if (lr > 0.0) {
        AdamHyper hyper{lr, cfg_.beta1, cfg_.beta2, cfg_.adam_eps};
        auto apply = [&](std::vector<Param*>& group, const std::vector<Tensor<float>>& grads,
                         AdamState<float>& state) {
            std::vector<std::vector<float>*> values;
            std::vector<const std::vector<float>*> gvalues;
            values.reserve(group.size());
            gvalues.reserve(group.size());
            for (std::size_t i = 0; i < group.size(); ++i) {
                values.push_back(&group[i]->value);
                gvalues.push_back(&grads[i].values());
            }
            adam_step<float>(values, gvalues, state, hyper);
        };
        apply(d_group, grads_d, opt_d_);
        apply(g_group, grads_g, opt_g_);
        if (emb_with_critic) apply(e_group, grads_e, opt_e_);
    }

    MetricsRow row;
    row.step = s;
    row.lr = lr;
    row.d_loss_x = graph.d_x.item();
    row.d_loss_y = graph.d_y.item();
    row.g_loss_f = graph.g_f.item();
    row.g_loss_g = graph.g_g.item();
    row.cyc_loss = graph.cyc.item();
    row.gp_x = graph.gp_x.item();
    row.gp_y = graph.gp_y.item();

    std::vector<std::int32_t> enc_targets, dec_targets;
    for (const auto& seq : banks.x) {
        const auto enc = encipher(seq, spec_, cfg_.vocab);
        enc_targets.insert(enc_targets.end(), enc.begin(), enc.end());
    }
    for (const auto& seq : banks.y) {
        const auto dec = decipher(seq, spec_, cfg_.vocab);
        dec_targets.insert(dec_targets.end(), dec.begin(), dec.end());
    }
    row.acc_f = fraction_equal(argmax_rows(graph.fake_y_rows), enc_targets);
    row.acc_g = fraction_equal(argmax_rows(graph.fake_x_rows), dec_targets);

    next_step_ = s + 1;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<NamedTensor> Trainer::snapshot() const {
    std::vector<NamedTensor> out;
    for (const auto& p : params_.all()) out.push_back({p.name, p.shape, p.value});
    auto pack_state = [&](const char* prefix, const AdamState<float>& st,
                          const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < st.m.size(); ++i) {
            out.push_back({std::string(prefix) + "/m/" + names[i],
                           Shape{st.m[i].size()}, st.m[i]});
            out.push_back({std::string(prefix) + "/v/" + names[i],
                           Shape{st.v[i].size()}, st.v[i]});
        }
        out.push_back({std::string(prefix) + "/t", Shape{1},
                       {static_cast<float>(st.step)}});
    };
    pack_state("opt_d", opt_d_, params_.group_names({"disc_x", "disc_y"}));
    pack_state("opt_g", opt_g_, opt_g_names());
    if (cfg_.emb_update == EmbeddingUpdate::critic)
        pack_state("opt_e", opt_e_, params_.group_names({"emb/"}));
    out.push_back({"trainer/step", Shape{1}, {static_cast<float>(next_step_)}});
    return out;
}

void Trainer::restore(const std::vector<NamedTensor>& tensors) {
    std::unordered_map<std::string, const NamedTensor*> by_name;
    for (const auto& t : tensors) by_name.emplace(t.name, &t);
    auto fetch = [&](const std::string& name) -> const NamedTensor& {
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw std::runtime_error("checkpoint mismatch: missing tensor '" + name + "'");
        return *it->second;
    };
    for (auto& p : params_.all()) {
        const auto& t = fetch(p.name);
        if (t.shape != p.shape)
            throw std::runtime_error("checkpoint mismatch: tensor '" + p.name +
                                     "' has a different shape");
        p.value = t.data;
    }
    auto unpack_state = [&](const char* prefix, AdamState<float>& st,
                            const std::vector<std::string>& names) {
        st.m.clear();
        st.v.clear();
        for (const auto& n : names) {
            st.m.push_back(fetch(std::string(prefix) + "/m/" + n).data);
            st.v.push_back(fetch(std::string(prefix) + "/v/" + n).data);
        }
        st.step = static_cast<std::int64_t>(fetch(std::string(prefix) + "/t").data.at(0));
    };
    unpack_state("opt_d", opt_d_, params_.group_names({"disc_x", "disc_y"}));
    unpack_state("opt_g", opt_g_, opt_g_names());
    if (cfg_.emb_update == EmbeddingUpdate::critic)
        unpack_state("opt_e", opt_e_, params_.group_names({"emb/"}));
    next_step_ = static_cast<std::int64_t>(fetch("trainer/step").data.at(0));
}

TrainResult Trainer::run(const TrainOptions& options) {
    namespace fs = std::filesystem;
    if (options.out_dir.empty()) throw std::invalid_argument("train: output directory required");
    fs::create_directories(options.out_dir);
    const std::string last_path = options.out_dir + "/ckpt_last.cgn";
    const std::string final_path = options.out_dir + "/ckpt_final.cgn";

    if (options.resume) {
        if (!fs::exists(last_path))
            throw std::runtime_error("resume requested but no checkpoint at " + last_path);
        restore(read_checkpoint(last_path));
    }

    MetricsWriter metrics(options.out_dir + "/metrics.csv");
    TrainResult result;
    MetricsRow row;
    for (std::int64_t s = next_step_; s < cfg_.steps; ++s) {
        row = step(s);
        metrics.append(row);
        result.steps_run += 1;
        result.final_acc_f = row.acc_f;
        result.final_acc_g = row.acc_g;
        if (!options.quiet && (s % options.log_every == 0 || s + 1 == cfg_.steps)) {
            std::fprintf(stderr,
                         "step %lld  lr %.2e  d %.4f/%.4f  g %.4f/%.4f  cyc %.4f  acc %.3f/%.3f\n",
                         static_cast<long long>(s), row.lr, row.d_loss_x, row.d_loss_y,
                         row.g_loss_f, row.g_loss_g, row.cyc_loss, row.acc_f, row.acc_g);
        }
        if (options.checkpoint_every > 0 && (s + 1) % options.checkpoint_every == 0)
            write_checkpoint(last_path, snapshot());
        if (options.target_acc > 0.0 && row.acc_g >= options.target_acc) {
            result.reached_target = true;
            break;
        }
    }
    write_checkpoint(last_path, snapshot());
    write_checkpoint(final_path, snapshot());
    result.checkpoint_path = final_path;
    return result;
}

} // namespace cipherlab
