#include "evalreport.hpp"

#include <fstream>
#include <stdexcept>

#include "metrics.hpp"
#include "svg.hpp"

namespace cipherlab {

std::size_t LearnedMapping::position_period() const {
    for (std::size_t p = 1; p < m.size(); ++p) {
        bool periodic = true;
        for (std::size_t i = 0; i + p < m.size() && periodic; ++i) periodic = m[i] == m[i + p];
        if (periodic) return p;
    }
    return m.empty() ? 0 : m.size();
}

LearnedMapping extract_mapping(ParamStore& params, const GanConfig& cfg, char direction) {
    if (direction != 'f' && direction != 'g')
        throw std::invalid_argument("extract_mapping: direction must be 'f' or 'g'");
    const std::string gen = direction == 'f' ? "gen_f" : "gen_g";
    const std::string table = cfg.share_embeddings ? "emb/shared"
                              : direction == 'f'   ? "emb/x"
                                                   : "emb/y";
    const std::size_t n = cfg.seq_len;

    LearnedMapping mapping;
    mapping.m.assign(n, std::vector<TokenId>(cfg.vocab, 0));

    Tape<float> tape(TapeMode::first_order);
    BoundParams bound(tape, params);
    for (std::size_t v = 0; v < cfg.vocab; ++v) {
        // A constant sequence of token v: position p's output is v's mapping
        // at p because the generator's convolutions are pointwise.
        const std::vector<std::int32_t> seq(n, static_cast<std::int32_t>(v));
        Tensor<float> rows = one_hot<float>(seq, cfg.vocab);
        Tensor<float> t = embed_and_time(rows, bound[table], bound, cfg, 1, n);
        const auto arg = argmax_rows(generator_forward(bound, gen, t, cfg));
        for (std::size_t p = 0; p < n; ++p) mapping.m[p][v] = arg[p];
    }
    return mapping;
}

AccuracyReport gan_accuracy(ParamStore& params, const GanConfig& cfg, const TokenSeq& stream,
                            const CipherSpec& spec, std::size_t n_eval, std::uint64_t eval_seed) {
    if (n_eval < 1) throw std::invalid_argument("gan_accuracy: need at least one batch");
    Tape<float> tape(TapeMode::first_order);
    BoundParams bound(tape, params);
    const Tensor<float>& emb_x = bound[cfg.share_embeddings ? "emb/shared" : "emb/x"];
    const Tensor<float>& emb_y = bound[cfg.share_embeddings ? "emb/shared" : "emb/y"];

    std::size_t hits_f = 0, hits_g = 0, total = 0;
    for (std::size_t batch = 0; batch < n_eval; ++batch) {
        Rng rng = Rng(eval_seed).fork(0xE7A1, batch);
        const Banks banks = sample_banks(stream, cfg.batch, cfg.seq_len, spec, cfg.vocab, rng);
        std::vector<std::int32_t> x_flat, y_flat, enc_flat, dec_flat;
        for (const auto& s : banks.x) {
            x_flat.insert(x_flat.end(), s.begin(), s.end());
            const auto e = encipher(s, spec, cfg.vocab);
            enc_flat.insert(enc_flat.end(), e.begin(), e.end());
        }
        for (const auto& s : banks.y) {
            y_flat.insert(y_flat.end(), s.begin(), s.end());
            const auto d = decipher(s, spec, cfg.vocab);
            dec_flat.insert(dec_flat.end(), d.begin(), d.end());
        }
        Tensor<float> x_in = embed_and_time(one_hot<float>(x_flat, cfg.vocab), emb_x, bound, cfg,
                                            cfg.batch, cfg.seq_len);
        Tensor<float> y_in = embed_and_time(one_hot<float>(y_flat, cfg.vocab), emb_y, bound, cfg,
                                            cfg.batch, cfg.seq_len);
        const auto f_out = argmax_rows(generator_forward(bound, "gen_f", x_in, cfg));
        const auto g_out = argmax_rows(generator_forward(bound, "gen_g", y_in, cfg));
        for (std::size_t i = 0; i < f_out.size(); ++i) {
            hits_f += f_out[i] == enc_flat[i];
            hits_g += g_out[i] == dec_flat[i];
            ++total;
        }
    }
    AccuracyReport report;
    report.acc_f = static_cast<double>(hits_f) / static_cast<double>(total);
    report.acc_g = static_cast<double>(hits_g) / static_cast<double>(total);
    return report;
}

void write_mapping_csv(const std::string& path, const LearnedMapping& mapping) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mapping dump: " + path);
    out << "position,token,mapped\n";
    for (std::size_t p = 0; p < mapping.m.size(); ++p)
        for (std::size_t v = 0; v < mapping.m[p].size(); ++v)
            out << p << "," << v << "," << mapping.m[p][v] << "\n";
    if (!out) throw std::runtime_error("short write on mapping dump: " + path);
}

void emit_accuracy_plot(const std::string& svg_path,
                        const std::vector<std::pair<std::string, std::string>>& labelled_logs) {
    std::vector<PlotSeries> series;
    for (const auto& [label, path] : labelled_logs) {
        PlotSeries s;
        s.label = label;
        for (const auto& row : read_metrics(path)) {
            s.x.push_back(static_cast<double>(row.step));
            s.y.push_back(row.acc_g);
        }
        series.push_back(std::move(s));
    }
    write_line_plot(svg_path, series, "decryption accuracy", "step", "accuracy");
}

} // namespace cipherlab
