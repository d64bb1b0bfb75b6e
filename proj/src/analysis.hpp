#pragma once

#include <cstddef>
#include <vector>

#include "cipher.hpp"

namespace cipherlab {

// Empirical token distribution; non-negative, sums to 1.
struct FrequencyTable {
    std::vector<double> p;
    std::size_t vocab() const { return p.size(); }
};

FrequencyTable unigram_frequencies(const std::vector<TokenSeq>& bank, std::size_t vocab);

// Rank alignment: the i-th most frequent cipher token maps to the i-th most
// frequent plain token. Ties break by token id. Result is m[cipher] = plain,
// always a bijection.
std::vector<TokenId> frequency_match(const FrequencyTable& plain, const FrequencyTable& cipher);

double index_of_coincidence(const TokenSeq& seq, std::size_t vocab);

struct KeyLengthEstimate {
    std::size_t length = 1;
    bool fallback = false;               // no candidate cleared the threshold
    double threshold = 0.0;
    std::vector<double> ioc_by_length;   // mean residue-stream IoC, index L-1
    std::vector<std::size_t> kasiski_spacings; // repeated-trigram spacings, diagnostic
};

// Smallest L in 1..max_len whose mean residue-stream index of coincidence
// exceeds the threshold (midpoint of 1/V and the plaintext bank's IoC);
// falls back to the argmax when nothing clears it. Sequences are treated as
// independently enciphered, i.e. the key phase restarts at each sequence.
KeyLengthEstimate estimate_key_length(const std::vector<TokenSeq>& cipher_bank, std::size_t max_len,
                                      double plain_ioc, std::size_t vocab);

// One mapping table per key index, from per-residue frequency matching.
struct MappingTable {
    std::vector<std::vector<TokenId>> per_index; // [key_index][cipher_id] = plain_id
    std::size_t key_length() const { return per_index.size(); }
};

MappingTable vigenere_frequency_attack(const std::vector<TokenSeq>& cipher_bank,
                                       std::size_t key_len, const FrequencyTable& plain,
                                       std::size_t vocab);

// Fraction of positions where the mapped ciphertext equals the true
// plaintext, averaged over sequences.
double mapping_accuracy(const MappingTable& mapping, const std::vector<TokenSeq>& cipher_bank,
                        const CipherSpec& truth, std::size_t vocab);

// The exact inverse mapping of a cipher, in MappingTable form.
MappingTable true_inverse_mapping(const CipherSpec& spec, std::size_t vocab);

} // namespace cipherlab
