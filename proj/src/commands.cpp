#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "analysis.hpp"
#include "checkpoint.hpp"
#include "evalreport.hpp"
#include "simplex.hpp"
#include "svg.hpp"
#include "trainer.hpp"

namespace cipherlab {

namespace {

namespace fs = std::filesystem;

VocabLevel level_from(const std::string& level) {
    if (level == "char") return VocabLevel::chars;
    if (level == "word") return VocabLevel::words;
    throw ConfigError("config: level must be 'char' or 'word'");
}

struct LoadedCorpus {
    Vocabulary vocab;
    TokenSeq stream;
    CipherSpec spec;
};

LoadedCorpus load_corpus(const RunConfig& cfg) {
    if (cfg.corpus.empty()) throw ConfigError("config: missing corpus path");
    const auto level = level_from(cfg.level);
    const auto tokens = ingest_file(cfg.corpus, level);
    LoadedCorpus out;
    out.vocab = Vocabulary::build(tokens, level,
                                  level == VocabLevel::words
                                      ? std::optional<std::size_t>(static_cast<std::size_t>(cfg.vocab_k))
                                      : std::nullopt);
    out.stream = out.vocab.encode(tokens);
    out.spec = parse_cipher(cfg.cipher).resolve(out.vocab.size());
    return out;
}

void write_run_config(const RunConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream out(dir + "/config.txt");
    if (!out) throw std::runtime_error("cannot write " + dir + "/config.txt");
    out << cfg.serialized();
}

std::string fmt_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", v * 100.0);
    return buf;
}

std::vector<std::pair<std::string, std::string>> split_labelled(const std::string& list) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos < list.size()) {
        std::size_t next = list.find(',', pos);
        if (next == std::string::npos) next = list.size();
        std::string item = list.substr(pos, next - pos);
        if (!item.empty()) {
            const auto eq = item.find('=');
            if (eq != std::string::npos)
                out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
            else
                out.emplace_back(fs::path(item).stem().string(), item);
        }
        pos = next + 1;
    }
    return out;
}

} // namespace

std::string cmd_gen(const RunConfig& cfg) {
    const auto corpus = load_corpus(cfg);
    Rng rng(static_cast<std::uint64_t>(cfg.seed), 0xBA11c5);
    const Banks banks = sample_banks(corpus.stream, static_cast<std::size_t>(cfg.batch),
                                     static_cast<std::size_t>(cfg.seq_len), corpus.spec,
                                     corpus.vocab.size(), rng);
    write_run_config(cfg, cfg.out_dir);
    write_bank(cfg.out_dir + "/x_bank.txt", banks.x, corpus.vocab.size(),
               static_cast<std::size_t>(cfg.seq_len));
    write_bank(cfg.out_dir + "/y_bank.txt", banks.y, corpus.vocab.size(),
               static_cast<std::size_t>(cfg.seq_len));
    std::ostringstream report;
    report << "wrote " << banks.x.size() << "+" << banks.y.size() << " sequences of length "
           << cfg.seq_len << " (V=" << corpus.vocab.size() << ") under " << cfg.out_dir << "\n";
    return report.str();
}

std::string cmd_baseline(const RunConfig& cfg) {
    const auto corpus = load_corpus(cfg);
    const std::size_t v = corpus.vocab.size();
    const auto& stream = corpus.stream;
    if (stream.size() < 4 * static_cast<std::size_t>(cfg.seq_len))
        throw std::runtime_error("baseline: corpus too small");

    // Contiguous fit/eval split; the metric is scored on held-out windows.
    const std::size_t cut = stream.size() * 4 / 5;
    const TokenSeq fit(stream.begin(), stream.begin() + static_cast<std::ptrdiff_t>(cut));
    const TokenSeq held(stream.begin() + static_cast<std::ptrdiff_t>(cut), stream.end());
    const auto n = static_cast<std::size_t>(cfg.seq_len);
    std::vector<TokenSeq> eval_bank;
    for (std::size_t i = 0; i + n <= held.size(); i += n)
        eval_bank.push_back(encipher(TokenSeq(held.begin() + static_cast<std::ptrdiff_t>(i),
                                              held.begin() + static_cast<std::ptrdiff_t>(i + n)),
                                     corpus.spec, v));

    const auto plain_table = unigram_frequencies({fit}, v);
    const double plain_ioc = index_of_coincidence(fit, v);
    const auto est = estimate_key_length(eval_bank, static_cast<std::size_t>(cfg.max_key_len),
                                         plain_ioc, v);

    const auto attack_at = [&](std::size_t len) {
        return mapping_accuracy(vigenere_frequency_attack(eval_bank, len, plain_table, v),
                                eval_bank, corpus.spec, v);
    };
    const double acc_est = attack_at(est.length);
    const double acc_mono = attack_at(1);
    const std::size_t true_len = corpus.spec.key_length();
    const double acc_known = attack_at(true_len);

    std::ostringstream report;
    report << "frequency-analysis baseline\n";
    report << "  corpus            " << cfg.corpus << " (" << cfg.level << " level)\n";
    report << "  cipher            " << corpus.spec.str() << "\n";
    report << "  vocab size        " << v << "\n";
    report << "  est. key length   " << est.length << (est.fallback ? " (fallback: argmax IoC)" : "")
           << "\n";
    report << "\n  cipher           vocab  acc(est len)  acc(len=1)  acc(known len)\n";
    char row[160];
    std::snprintf(row, sizeof(row), "  %-15s  %-5zu  %-12s  %-10s  %s\n", corpus.spec.str().c_str(),
                  v, fmt_pct(acc_est).c_str(), fmt_pct(acc_mono).c_str(),
                  fmt_pct(acc_known).c_str());
    report << row;
    return report.str();
}

std::string cmd_train(const RunConfig& cfg) {
    const auto corpus = load_corpus(cfg);
    GanConfig gan = cfg.gan(corpus.vocab.size());
    write_run_config(cfg, cfg.out_dir);

    Trainer trainer(gan, corpus.stream, corpus.spec);
    TrainOptions options;
    options.out_dir = cfg.out_dir;
    options.checkpoint_every = cfg.checkpoint_every;
    options.target_acc = cfg.target_acc;
    options.resume = cfg.resume;
    options.quiet = cfg.quiet;
    const TrainResult result = trainer.run(options);

    const auto report = gan_accuracy(trainer.params(), gan, corpus.stream, corpus.spec,
                                     static_cast<std::size_t>(cfg.eval_batches),
                                     static_cast<std::uint64_t>(cfg.eval_seed));
    std::ostringstream out;
    out << "trained " << result.steps_run << " step(s); checkpoint " << result.checkpoint_path
        << "\n";
    out << "  acc F (encrypt) " << fmt_pct(report.acc_f) << "\n";
    out << "  acc G (decrypt) " << fmt_pct(report.acc_g) << "\n";
    if (result.reached_target) out << "  stopped early at the target accuracy\n";
    return out.str();
}

std::string cmd_eval(const RunConfig& cfg) {
    // Mapping-table mode: score an explicit mapping against a bank pair.
    if (!cfg.mapping.empty()) {
        if (cfg.y_bank.empty()) throw ConfigError("eval: mapping mode needs y_bank");
        const auto bank = read_bank(cfg.y_bank);
        const auto spec = parse_cipher(cfg.cipher).resolve(bank.vocab);
        MappingTable table;
        if (cfg.mapping == "true-inverse") {
            table = true_inverse_mapping(spec, bank.vocab);
        } else {
            throw ConfigError("eval: unsupported mapping '" + cfg.mapping +
                              "' (use true-inverse)");
        }
        const double acc = mapping_accuracy(table, bank.sequences, spec, bank.vocab);
        std::ostringstream out;
        out << "mapping accuracy on " << cfg.y_bank << ": " << fmt_pct(acc) << "\n";
        return out.str();
    }

    if (cfg.run_dir.empty()) throw ConfigError("eval: need run_dir (or mapping + y_bank)");
    RunConfig run_cfg;
    run_cfg.load_file(cfg.run_dir + "/config.txt");
    const auto corpus = load_corpus(run_cfg);
    GanConfig gan = run_cfg.gan(corpus.vocab.size());

    const std::string ckpt =
        cfg.checkpoint.empty() ? cfg.run_dir + "/ckpt_final.cgn" : cfg.checkpoint;
    ParamStore params = init_model_params(gan, Rng(gan.seed).fork(1));
    {
        const auto tensors = read_checkpoint(ckpt);
        std::unordered_map<std::string, const NamedTensor*> by_name;
        for (const auto& t : tensors) by_name.emplace(t.name, &t);
        for (auto& p : params.all()) {
            auto it = by_name.find(p.name);
            if (it == by_name.end())
                throw std::runtime_error("checkpoint mismatch: missing tensor '" + p.name + "'");
            if (it->second->shape != p.shape)
                throw std::runtime_error("checkpoint mismatch: tensor '" + p.name +
                                         "' has a different shape");
            p.value = it->second->data;
        }
    }

    const auto report = gan_accuracy(params, gan, corpus.stream, corpus.spec,
                                     static_cast<std::size_t>(cfg.eval_batches),
                                     static_cast<std::uint64_t>(cfg.eval_seed));
    const auto map_f = extract_mapping(params, gan, 'f');
    const auto map_g = extract_mapping(params, gan, 'g');
    write_mapping_csv(cfg.run_dir + "/mapping_f.csv", map_f);
    write_mapping_csv(cfg.run_dir + "/mapping_g.csv", map_g);

    std::ostringstream out;
    out << "eval of " << ckpt << " (" << corpus.spec.str() << ", V=" << corpus.vocab.size()
        << ")\n";
    out << "  acc F (encrypt)    " << fmt_pct(report.acc_f) << "\n";
    out << "  acc G (decrypt)    " << fmt_pct(report.acc_g) << "\n";
    out << "  F position period  " << map_f.position_period() << "\n";
    out << "  G position period  " << map_g.position_period() << "\n";
    out << "  mapping dumps      " << cfg.run_dir << "/mapping_{f,g}.csv\n";
    return out.str();
}

std::string cmd_simplex(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    std::vector<Regime> regimes;
    if (cfg.regime == "all")
        regimes = {Regime::none, Regime::gradient_penalty, Regime::relaxed_sampling};
    else
        regimes = {regime_from(cfg.regime)};

    std::ostringstream out;
    out << "simplex lab (" << cfg.simplex_steps << " steps per regime)\n";
    for (Regime regime : regimes) {
        ToyOptions options;
        options.regime = regime;
        options.steps = cfg.simplex_steps;
        options.eps_max = cfg.eps_max;
        options.grid_res = static_cast<std::size_t>(cfg.grid_res);
        options.seed = static_cast<std::uint64_t>(cfg.seed);
        const ToyResult result = run_toy_experiment(options);
        const std::string path = cfg.out_dir + "/simplex_" + regime_name(regime) + ".csv";
        write_simplex_grid(path, result);
        char line[256];
        std::snprintf(line, sizeof(line),
                      "  %-8s barycenter |grad| %.5f  segment mean %.4f  grid max %.4f  -> %s\n",
                      regime_name(regime).c_str(), result.barycenter_gradnorm,
                      result.segment_mean_gradnorm, result.max_gradnorm, path.c_str());
        out << line;
    }
    return out.str();
}

std::string cmd_plot(const RunConfig& cfg) {
    if (cfg.plot_metrics.empty() && cfg.plot_simplex.empty())
        throw ConfigError("plot: nothing to plot (set plot_metrics and/or plot_simplex)");
    fs::create_directories(cfg.out_dir);
    std::ostringstream out;
    if (!cfg.plot_metrics.empty()) {
        const auto logs = split_labelled(cfg.plot_metrics);
        const std::string path = cfg.out_dir + "/accuracy.svg";
        emit_accuracy_plot(path, logs);
        out << "wrote " << path << " (" << logs.size() << " series)\n";
    }
    if (!cfg.plot_simplex.empty()) {
        for (const auto& [label, path] : split_labelled(cfg.plot_simplex)) {
            const auto grid = read_simplex_grid(path);
            const std::string svg = cfg.out_dir + "/" + label + ".svg";
            write_simplex_heatmap(svg, grid, "critic gradient field: " + label);
            out << "wrote " << svg << "\n";
        }
    }
    return out.str();
}

} // namespace cipherlab
