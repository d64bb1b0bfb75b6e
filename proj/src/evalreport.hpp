#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corpus.hpp"
#include "model.hpp"

namespace cipherlab {

// Per-position argmax table of a trained generator: m[position][token].
// Pointwise generators make this exact: feeding a sequence of one token
// yields that token's mapping at every position in one forward pass.
struct LearnedMapping {
    std::vector<std::vector<TokenId>> m;
    std::size_t positions() const { return m.size(); }

    // Smallest p such that the table repeats with period p across positions.
    std::size_t position_period() const;
};

// direction "f": plain -> cipher generator (inputs embed with the X table);
// direction "g": cipher -> plain.
LearnedMapping extract_mapping(ParamStore& params, const GanConfig& cfg, char direction);

struct AccuracyReport {
    double acc_f = 0; // argmax F(x) vs encipher(x)
    double acc_g = 0; // argmax G(y) vs decipher(y)
};

// Fraction of positions mapped correctly over n_eval fresh unpaired batches.
// Deterministic for a fixed seed; dropout plays no part (generators only).
AccuracyReport gan_accuracy(ParamStore& params, const GanConfig& cfg, const TokenSeq& stream,
                            const CipherSpec& spec, std::size_t n_eval, std::uint64_t eval_seed);

// Per-token step at which the learned mapping first matched the truth;
// aligned with the frequency rank of each token. -1 when never correct.
struct ConvergenceDiagnostics {
    std::vector<TokenId> tokens_by_frequency;
    std::vector<std::int64_t> first_correct_step;
};

void write_mapping_csv(const std::string& path, const LearnedMapping& mapping);

// Plots: one accuracy-vs-step polyline per labelled metrics log.
void emit_accuracy_plot(const std::string& svg_path,
                        const std::vector<std::pair<std::string, std::string>>& labelled_logs);

} // namespace cipherlab
