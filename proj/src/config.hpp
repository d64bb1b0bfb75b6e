#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

namespace cipherlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Every tunable of the lab as flat key=value pairs. Unknown keys are
// rejected; the full resolved set serializes into each run directory.
struct RunConfig {
    // data
    std::string corpus;
    std::string out_dir = "run";
    std::string cipher = "shift:3";
    std::string level = "char"; // char | word
    std::int64_t vocab_k = 200; // word-level vocabulary cap (incl. unknown)

    // model + training schedule
    std::int64_t seq_len = 64;
    std::int64_t batch = 64;
    std::int64_t steps = 10000;
    std::int64_t seed = 1;
    std::int64_t emb_dim = 256;
    std::string timing = "none"; // none | sinusoidal | concat
    std::int64_t timing_dim = 100;
    std::int64_t gen_fc = 32;
    std::int64_t disc_fc = 32;
    std::int64_t disc_layers = 5;
    double dropout = 0.5;
    double lambda_cyc = 1.0;
    double alpha_gp = 10.0;
    bool share_embeddings = false;
    double init_scale = 1.0;
    std::string gan_loss = "lsgan";     // lsgan | log (log is an untrained stub)
    std::string emb_update = "critic";  // critic | generator
    double lr = 2e-4;
    std::int64_t warmup_steps = 2500;
    double beta1 = 0.0;
    double beta2 = 0.9;
    double adam_eps = 1e-8;

    // trainer behavior
    std::int64_t checkpoint_every = 2000;
    double target_acc = 0.0;
    bool resume = false;
    bool quiet = false;

    // baseline + eval
    std::int64_t max_key_len = 10;
    std::int64_t eval_batches = 8;
    std::int64_t eval_seed = 9000;
    std::string run_dir;
    std::string checkpoint;
    std::string mapping; // "true-inverse" or a mapping csv path
    std::string x_bank;
    std::string y_bank;

    // simplex lab
    std::string regime = "all"; // none | gp | relaxed | all
    std::int64_t simplex_steps = 2000;
    double eps_max = 0.15;
    std::int64_t grid_res = 64;

    // plot inputs: comma-separated "label=path" (or bare paths)
    std::string plot_metrics;
    std::string plot_simplex;

    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    static std::vector<std::string> keys();

    // key=value lines; '#' starts a comment.
    void load_file(const std::string& path);
    void load_text(const std::string& text, const std::string& origin);
    std::string serialized() const;

    GanConfig gan(std::size_t vocab) const;
};

} // namespace cipherlab
