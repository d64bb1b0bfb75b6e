#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"

namespace cipherlab {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

enum class CipherKind { shift, vigenere, permutation };

// Ground-truth mapping. Shift holds one amount, Vigenere a non-empty key of
// amounts tiled over the sequence, permutation an explicit bijection on
// 0..V-1.
struct CipherSpec {
    CipherKind kind = CipherKind::shift;
    std::vector<TokenId> key;

    static CipherSpec shift_by(TokenId amount);
    static CipherSpec vigenere(std::vector<TokenId> key);
    static CipherSpec permutation(std::vector<TokenId> table);
    static CipherSpec random_permutation(std::size_t vocab, Rng rng);

    std::size_t key_length() const { return kind == CipherKind::permutation ? 1 : key.size(); }
    void validate(std::size_t vocab) const;
    std::string str() const;
};

TokenSeq encipher(const TokenSeq& seq, const CipherSpec& spec, std::size_t vocab);
TokenSeq decipher(const TokenSeq& seq, const CipherSpec& spec, std::size_t vocab);

// Plain-id for a given cipher-id at a given position; the inverse mapping
// the lab's metrics compare against.
TokenId true_plain_token(TokenId cipher_token, std::size_t position, const CipherSpec& spec,
                         std::size_t vocab);

// Mini-grammar: "shift:<k>", "vigenere:<k1,k2,...>", "perm:<seed>". The
// permutation table depends on the vocabulary size, so parsing yields a
// descriptor resolved once V is known.
struct CipherDesc {
    CipherKind kind = CipherKind::shift;
    std::vector<TokenId> amounts;
    std::uint64_t perm_seed = 0;

    CipherSpec resolve(std::size_t vocab) const;
    std::string str() const;
};

CipherDesc parse_cipher(const std::string& text);

} // namespace cipherlab
