#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cipher.hpp"
#include "rng.hpp"

namespace cipherlab {

enum class VocabLevel { chars, words };

// Token <-> id table. Char level indexes every observed character in
// codepoint order with no unknown token; word level keeps the k-1 most
// frequent words plus an unknown token at the last id.
class Vocabulary {
public:
    static Vocabulary build(const std::vector<std::string>& stream, VocabLevel level,
                            std::optional<std::size_t> k = std::nullopt);

    std::size_t size() const { return tokens_.size(); }
    VocabLevel level() const { return level_; }
    std::optional<TokenId> unknown() const { return unknown_; }

    TokenId id(const std::string& token) const;
    const std::string& token(TokenId id) const;
    TokenSeq encode(const std::vector<std::string>& stream) const;
    std::string decode(const TokenSeq& seq, const std::string& sep = "") const;

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> ids_;
    std::optional<TokenId> unknown_;
    VocabLevel level_ = VocabLevel::chars;
};

// UTF-8 text to token stream. Char level: one token per character, case
// preserved. Word level: whitespace-delimited, punctuation split into
// separate tokens, words lowercased.
std::vector<std::string> ingest_text(const std::string& bytes, VocabLevel level);
std::vector<std::string> ingest_file(const std::string& path, VocabLevel level);

// 2*batch_size windows of length seq_len sampled uniformly with replacement;
// the first half is returned as plaintext X, the second half enciphered as Y.
// X and Y are unpaired by construction.
struct Banks {
    std::vector<TokenSeq> x;
    std::vector<TokenSeq> y;
};
Banks sample_banks(const TokenSeq& stream, std::size_t batch_size, std::size_t seq_len,
                   const CipherSpec& spec, std::size_t vocab, Rng& rng);

// Bank file format: header "V=<int> N=<int>", then one sequence per line of
// space-separated ids.
void write_bank(const std::string& path, const std::vector<TokenSeq>& bank, std::size_t vocab,
                std::size_t seq_len);
struct BankFile {
    std::size_t vocab = 0;
    std::size_t seq_len = 0;
    std::vector<TokenSeq> sequences;
};
BankFile read_bank(const std::string& path);

} // namespace cipherlab
