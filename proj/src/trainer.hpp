#pragma once

#include <cstdint>
#include <string>

#include "checkpoint.hpp"
#include "corpus.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "optim.hpp"

namespace cipherlab {

// Everything the two optimizer phases of one step need from the recorded
// forward pass.
struct StepGraph {
    Tensor<float> d_total, g_total;
    Tensor<float> d_x, d_y, g_f, g_g, cyc, gp_x, gp_y;
    Tensor<float> fake_y_rows, fake_x_rows; // generator softmax outputs
};

StepGraph build_step_graph(const BoundParams& params, const Banks& banks, const GanConfig& cfg,
                           Rng& rng);

struct TrainOptions {
    std::string out_dir;
    std::int64_t checkpoint_every = 2000;
    double target_acc = 0.0;     // stop once acc_g reaches this (0 disables)
    bool resume = false;
    bool quiet = true;
    std::int64_t log_every = 50; // progress lines on stderr when not quiet
};

struct TrainResult {
    std::int64_t steps_run = 0;
    double final_acc_f = 0.0;
    double final_acc_g = 0.0;
    bool reached_target = false;
    std::string checkpoint_path;
};

// Owns the model parameters and optimizer state for one training run. Every
// random draw is a pure function of (seed, step), so a resumed run replays
// the remaining steps bit-identically.
class Trainer {
public:
    Trainer(GanConfig cfg, TokenSeq stream, CipherSpec spec);

    MetricsRow step(std::int64_t step_index);
    TrainResult run(const TrainOptions& options);

    ParamStore& params() { return params_; }
    const GanConfig& config() const { return cfg_; }
    std::int64_t next_step() const { return next_step_; }

    std::vector<NamedTensor> snapshot() const;
    void restore(const std::vector<NamedTensor>& tensors);

private:
    std::vector<std::string> opt_g_names() const;

    GanConfig cfg_;
    TokenSeq stream_;
    CipherSpec spec_;
    ParamStore params_;
    AdamState<float> opt_d_, opt_g_, opt_e_;
    std::int64_t next_step_ = 0;
};

} // namespace cipherlab
