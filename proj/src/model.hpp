#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cipher.hpp"
#include "nn_ops.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace cipherlab {

enum class TimingMode { none, sinusoidal, concat };
enum class GanLoss { least_squares, log_likelihood };

// Which objective shapes the embedding tables. `critic` trains them with
// the discriminator losses plus the cycle term (separating real from fake
// in embedding space); `generator` trains them with the generator losses
// plus the cycle term.
enum class EmbeddingUpdate { critic, generator };

std::string timing_mode_name(TimingMode mode);
TimingMode timing_mode_from(const std::string& name);

// Every architecture and schedule knob for one run.
struct GanConfig {
    std::size_t vocab = 0;        // filled in from the data
    std::size_t seq_len = 64;     // N
    std::size_t batch = 64;
    std::size_t emb_dim = 256;    // E
    std::size_t timing_dim = 100; // T (concat mode)
    TimingMode timing = TimingMode::none;
    std::size_t gen_fc = 32;
    std::size_t disc_fc = 32;
    std::size_t disc_layers = 5;  // strided conv layers in the critic
    double dropout = 0.5;
    double lambda_cyc = 1.0;
    double alpha_gp = 10.0;
    bool share_embeddings = false;
    double init_scale = 1.0;
    GanLoss loss = GanLoss::least_squares;
    EmbeddingUpdate emb_update = EmbeddingUpdate::critic;

    std::int64_t steps = 10000;
    double lr = 2e-4;
    std::int64_t warmup_steps = 2500;
    double beta1 = 0.0;
    double beta2 = 0.9;
    double adam_eps = 1e-8;
    std::uint64_t seed = 1;

    // Channel width the critics and generators see after timing is applied.
    std::size_t model_width() const {
        return emb_dim + (timing == TimingMode::concat ? timing_dim : 0);
    }
    void validate() const;
};

struct Param {
    std::string name;
    Shape shape;
    std::vector<float> value;
};

// Named parameter buffers in a stable insertion order (update order and
// checkpoint layout depend on it).
class ParamStore {
public:
    Param& add(const std::string& name, Shape shape, std::vector<float> value);
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;
    bool has(const std::string& name) const { return index_.count(name) != 0; }
    std::vector<Param>& all() { return params_; }
    const std::vector<Param>& all() const { return params_; }

    // Parameters whose names start with any of the given prefixes.
    std::vector<Param*> group(const std::vector<std::string>& prefixes);
    std::vector<std::string> group_names(const std::vector<std::string>& prefixes) const;

private:
    std::vector<Param> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Builds all weights: embeddings, both generators, both critics, and the
// learned timing table when concat timing is on.
ParamStore init_model_params(const GanConfig& cfg, Rng rng);

// Tape-bound leaf views of every parameter for a single step.
class BoundParams {
public:
    BoundParams(Tape<float>& tape, ParamStore& store);
    const Tensor<float>& operator[](const std::string& name) const;

private:
    std::unordered_map<std::string, Tensor<float>> bound_;
};

// One-hot or softmax rows [B*N, V] -> embedded and timed rows [B*N, W].
Tensor<float> embed_and_time(const Tensor<float>& rows, const Tensor<float>& table,
                             const BoundParams& params, const GanConfig& cfg, std::size_t batch,
                             std::size_t n);

// Pointwise conv generator; returns softmax rows [B*N, V].
Tensor<float> generator_forward(const BoundParams& params, const std::string& prefix,
                                const Tensor<float>& t, const GanConfig& cfg);

// Strided conv critic; returns one raw score per sequence, shape [B, 1].
Tensor<float> discriminator_forward(const BoundParams& params, const std::string& prefix,
                                    const Tensor<float>& t, std::size_t batch, std::size_t n,
                                    const GanConfig& cfg, Rng& rng, bool training);

// Per-direction adversarial losses with the interpolate gradient penalty.
struct GanLossTerms {
    Tensor<float> d_loss;   // (D(real)-1)^2 + D(fake)^2 + alpha * gp
    Tensor<float> g_loss;   // (D(fake)-1)^2
    Tensor<float> gp;       // mean (|grad| - 1)^2, before alpha
};

GanLossTerms loss_lsgan(const BoundParams& params, const std::string& disc_prefix,
                        const Tensor<float>& real_in, const Tensor<float>& fake_in,
                        std::size_t batch, std::size_t n, const GanConfig& cfg, Rng& rng);

// Mean per-position L1 between reconstructions and the original one-hot
// rows, both directions.
Tensor<float> loss_cycle(const Tensor<float>& recon_x, const Tensor<float>& x_rows,
                         const Tensor<float>& recon_y, const Tensor<float>& y_rows);

} // namespace cipherlab
