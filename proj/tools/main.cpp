// Command-line front end. Talks to the core exclusively through the C API in
// cipherlab.h; flags map one-to-one onto configuration keys.

#include "cipherlab.h"

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

struct ConfigDeleter {
    void operator()(clab_config* cfg) const { clab_config_free(cfg); }
};
using ConfigHandle = std::unique_ptr<clab_config, ConfigDeleter>;

struct PendingSettings {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> values;
    std::vector<std::string> raw; // --set key=value

    void bind_flag(CLI::App* app, const std::string& flag, const std::string& key,
                   const std::string& doc) {
        app->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, doc);
    }
};

int apply_and_run(const PendingSettings& pending,
                  clab_status (*run)(const clab_config*, char**)) {
    ConfigHandle cfg(clab_config_new());
    if (!cfg) {
        std::fprintf(stderr, "error: out of memory\n");
        return 1;
    }
    auto check = [&](clab_status status) {
        if (status != CLAB_OK) {
            std::fprintf(stderr, "error (%s): %s\n", clab_status_name(status), clab_last_error());
            return false;
        }
        return true;
    };
    if (!pending.config_file.empty() &&
        !check(clab_config_load(cfg.get(), pending.config_file.c_str())))
        return 1;
    for (const auto& [key, value] : pending.values)
        if (!check(clab_config_set(cfg.get(), key.c_str(), value.c_str()))) return 1;
    for (const auto& kv : pending.raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set wants key=value, got '%s'\n", kv.c_str());
            return 1;
        }
        if (!check(clab_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                   kv.substr(eq + 1).c_str())))
            return 1;
    }
    char* report = nullptr;
    if (!check(run(cfg.get(), &report))) return 1;
    if (report) {
        std::fputs(report, stdout);
        clab_string_free(report);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cipherlab — adversarial and classical cipher cracking"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        PendingSettings pending;
        clab_status (*run)(const clab_config*, char**);
    };
    std::vector<std::unique_ptr<Sub>> subs;

    auto add_sub = [&](const std::string& name, const std::string& doc,
                       clab_status (*run)(const clab_config*, char**)) -> Sub& {
        auto sub = std::make_unique<Sub>();
        sub->app = app.add_subcommand(name, doc);
        sub->run = run;
        sub->app->add_option("--config", sub->pending.config_file,
                             "config file of key=value lines (flags override)");
        sub->app->add_option("--set", sub->pending.raw, "set any config key directly (key=value)")
            ->take_all();
        subs.push_back(std::move(sub));
        return *subs.back();
    };

    auto& gen = add_sub("gen", "sample unpaired plain/cipher banks to files", clab_run_gen);
    gen.pending.bind_flag(gen.app, "--corpus", "corpus", "UTF-8 plaintext file");
    gen.pending.bind_flag(gen.app, "--cipher", "cipher", "shift:<k> | vigenere:<k1,k2,...> | perm:<seed>");
    gen.pending.bind_flag(gen.app, "--level", "level", "char | word");
    gen.pending.bind_flag(gen.app, "--seq-len", "seq_len", "window length");
    gen.pending.bind_flag(gen.app, "--batch", "batch", "sequences per bank");
    gen.pending.bind_flag(gen.app, "--seed", "seed", "sampling seed");
    gen.pending.bind_flag(gen.app, "--out", "out_dir", "output directory");

    auto& baseline = add_sub("baseline", "frequency-analysis baseline report", clab_run_baseline);
    baseline.pending.bind_flag(baseline.app, "--corpus", "corpus", "UTF-8 plaintext file");
    baseline.pending.bind_flag(baseline.app, "--cipher", "cipher", "cipher spec");
    baseline.pending.bind_flag(baseline.app, "--level", "level", "char | word");
    baseline.pending.bind_flag(baseline.app, "--vocab-k", "vocab_k", "word-level vocabulary cap");
    baseline.pending.bind_flag(baseline.app, "--max-key-len", "max_key_len",
                               "largest key length considered");

    auto& train = add_sub("train", "train the adversarial cipher cracker", clab_run_train);
    train.pending.bind_flag(train.app, "--corpus", "corpus", "UTF-8 plaintext file");
    train.pending.bind_flag(train.app, "--cipher", "cipher", "cipher spec");
    train.pending.bind_flag(train.app, "--level", "level", "char | word");
    train.pending.bind_flag(train.app, "--steps", "steps", "training steps");
    train.pending.bind_flag(train.app, "--seed", "seed", "run seed");
    train.pending.bind_flag(train.app, "--timing", "timing", "none | sinusoidal | concat");
    train.pending.bind_flag(train.app, "--out", "out_dir", "run directory");
    train.pending.bind_flag(train.app, "--resume", "resume", "resume from the run's last checkpoint");
    train.pending.bind_flag(train.app, "--quiet", "quiet", "suppress progress lines");

    auto& eval = add_sub("eval", "score a checkpoint or an explicit mapping", clab_run_eval);
    eval.pending.bind_flag(eval.app, "--run", "run_dir", "run directory to evaluate");
    eval.pending.bind_flag(eval.app, "--checkpoint", "checkpoint", "checkpoint file override");
    eval.pending.bind_flag(eval.app, "--eval-batches", "eval_batches", "fresh batches to score");
    eval.pending.bind_flag(eval.app, "--mapping", "mapping", "'true-inverse' mapping mode");
    eval.pending.bind_flag(eval.app, "--y-bank", "y_bank", "cipher bank file (mapping mode)");
    eval.pending.bind_flag(eval.app, "--cipher", "cipher", "cipher spec (mapping mode)");

    auto& simplex = add_sub("simplex", "discriminator regularization toy study", clab_run_simplex);
    simplex.pending.bind_flag(simplex.app, "--regime", "regime", "none | gp | relaxed | all");
    simplex.pending.bind_flag(simplex.app, "--steps", "simplex_steps", "training steps per regime");
    simplex.pending.bind_flag(simplex.app, "--seed", "seed", "seed");
    simplex.pending.bind_flag(simplex.app, "--out", "out_dir", "output directory");

    auto& plot = add_sub("plot", "render metrics and simplex grids as SVG", clab_run_plot);
    plot.pending.bind_flag(plot.app, "--metrics", "plot_metrics",
                           "comma-separated label=metrics.csv entries");
    plot.pending.bind_flag(plot.app, "--simplex", "plot_simplex",
                           "comma-separated label=grid.csv entries");
    plot.pending.bind_flag(plot.app, "--out", "out_dir", "output directory");

    CLI11_PARSE(app, argc, argv);

    for (const auto& sub : subs)
        if (sub->app->parsed()) return apply_and_run(sub->pending, sub->run);
    return 1;
}
