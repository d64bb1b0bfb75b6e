#include "cipher.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cipherlab {

CipherSpec CipherSpec::shift_by(TokenId amount) {
    return CipherSpec{CipherKind::shift, {amount}};
}

CipherSpec CipherSpec::vigenere(std::vector<TokenId> key) {
    return CipherSpec{CipherKind::vigenere, std::move(key)};
}

CipherSpec CipherSpec::permutation(std::vector<TokenId> table) {
    return CipherSpec{CipherKind::permutation, std::move(table)};
}

CipherSpec CipherSpec::random_permutation(std::size_t vocab, Rng rng) {
    std::vector<TokenId> table(vocab);
    std::iota(table.begin(), table.end(), 0);
    // Fisher-Yates driven by the portable generator.
    for (std::size_t i = vocab; i > 1; --i)
        std::swap(table[i - 1], table[rng.below(i)]);
    return permutation(std::move(table));
}

void CipherSpec::validate(std::size_t vocab) const {
    if (key.empty()) throw std::invalid_argument("cipher: empty key");
    switch (kind) {
    case CipherKind::shift:
        if (key.size() != 1) throw std::invalid_argument("shift cipher: exactly one amount");
        [[fallthrough]];
    case CipherKind::vigenere:
        for (TokenId s : key)
            if (s < 0 || static_cast<std::size_t>(s) >= vocab)
                throw std::invalid_argument("cipher: shift amount outside [0,V)");
        break;
    case CipherKind::permutation: {
        if (key.size() != vocab)
            throw std::invalid_argument("permutation cipher: table size != vocab size");
        std::vector<char> seen(vocab, 0);
        for (TokenId t : key) {
            if (t < 0 || static_cast<std::size_t>(t) >= vocab || seen[static_cast<std::size_t>(t)])
                throw std::invalid_argument("permutation cipher: not a bijection");
            seen[static_cast<std::size_t>(t)] = 1;
        }
        break;
    }
    }
}

std::string CipherSpec::str() const {
    std::string out;
    switch (kind) {
    case CipherKind::shift: return "shift:" + std::to_string(key[0]);
    case CipherKind::vigenere:
        out = "vigenere:";
        for (std::size_t i = 0; i < key.size(); ++i)
            out += (i ? "," : "") + std::to_string(key[i]);
        return out;
    case CipherKind::permutation: return "perm[" + std::to_string(key.size()) + "]";
    }
    return out;
}

namespace {

void check_ids(const TokenSeq& seq, std::size_t vocab) {
    for (TokenId t : seq)
        if (t < 0 || static_cast<std::size_t>(t) >= vocab)
            throw std::invalid_argument("cipher: token id outside vocabulary");
}

} // namespace

TokenSeq encipher(const TokenSeq& seq, const CipherSpec& spec, std::size_t vocab) {
    spec.validate(vocab);
    check_ids(seq, vocab);
    TokenSeq out(seq.size());
    const auto v = static_cast<TokenId>(vocab);
    switch (spec.kind) {
    case CipherKind::shift:
        for (std::size_t i = 0; i < seq.size(); ++i) out[i] = (seq[i] + spec.key[0]) % v;
        break;
    case CipherKind::vigenere:
        for (std::size_t i = 0; i < seq.size(); ++i)
            out[i] = (seq[i] + spec.key[i % spec.key.size()]) % v;
        break;
    case CipherKind::permutation:
        for (std::size_t i = 0; i < seq.size(); ++i)
            out[i] = spec.key[static_cast<std::size_t>(seq[i])];
        break;
    }
    return out;
}

TokenSeq decipher(const TokenSeq& seq, const CipherSpec& spec, std::size_t vocab) {
    spec.validate(vocab);
    check_ids(seq, vocab);
    TokenSeq out(seq.size());
    const auto v = static_cast<TokenId>(vocab);
    switch (spec.kind) {
    case CipherKind::shift:
        for (std::size_t i = 0; i < seq.size(); ++i) out[i] = (seq[i] - spec.key[0] + v) % v;
        break;
    case CipherKind::vigenere:
        for (std::size_t i = 0; i < seq.size(); ++i)
            out[i] = (seq[i] - spec.key[i % spec.key.size()] + v) % v;
        break;
    case CipherKind::permutation: {
        std::vector<TokenId> inverse(vocab);
        for (std::size_t t = 0; t < vocab; ++t)
            inverse[static_cast<std::size_t>(spec.key[t])] = static_cast<TokenId>(t);
        for (std::size_t i = 0; i < seq.size(); ++i)
            out[i] = inverse[static_cast<std::size_t>(seq[i])];
        break;
    }
    }
    return out;
}

TokenId true_plain_token(TokenId cipher_token, std::size_t position, const CipherSpec& spec,
                         std::size_t vocab) {
    const auto v = static_cast<TokenId>(vocab);
    switch (spec.kind) {
    case CipherKind::shift: return (cipher_token - spec.key[0] + v) % v;
    case CipherKind::vigenere:
        return (cipher_token - spec.key[position % spec.key.size()] + v) % v;
    case CipherKind::permutation:
        for (std::size_t t = 0; t < vocab; ++t)
            if (spec.key[t] == cipher_token) return static_cast<TokenId>(t);
        throw std::invalid_argument("cipher: token id outside vocabulary");
    }
    throw std::logic_error("unreachable");
}

CipherSpec CipherDesc::resolve(std::size_t vocab) const {
    CipherSpec spec;
    switch (kind) {
    case CipherKind::shift: spec = CipherSpec::shift_by(amounts.at(0)); break;
    case CipherKind::vigenere: spec = CipherSpec::vigenere(amounts); break;
    case CipherKind::permutation:
        spec = CipherSpec::random_permutation(vocab, Rng(perm_seed, 0x9e77));
        break;
    }
    spec.validate(vocab);
    return spec;
}

std::string CipherDesc::str() const {
    std::string out;
    switch (kind) {
    case CipherKind::shift: return "shift:" + std::to_string(amounts.at(0));
    case CipherKind::vigenere:
        out = "vigenere:";
        for (std::size_t i = 0; i < amounts.size(); ++i)
            out += (i ? "," : "") + std::to_string(amounts[i]);
        return out;
    case CipherKind::permutation: return "perm:" + std::to_string(perm_seed);
    }
    return out;
}

CipherDesc parse_cipher(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("cipher spec '" + text +
                                    "': expected shift:<k>, vigenere:<k1,k2,...> or perm:<seed>");
    const std::string head = text.substr(0, colon);
    const std::string body = text.substr(colon + 1);
    if (body.empty()) throw std::invalid_argument("cipher spec '" + text + "': missing argument");

    auto parse_ints = [&](const std::string& s) {
        std::vector<TokenId> out;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t next = s.find(',', pos);
            if (next == std::string::npos) next = s.size();
            const std::string item = s.substr(pos, next - pos);
            try {
                std::size_t used = 0;
                const int v = std::stoi(item, &used);
                if (used != item.size() || v < 0) throw std::invalid_argument(item);
                out.push_back(static_cast<TokenId>(v));
            } catch (const std::exception&) {
                throw std::invalid_argument("cipher spec '" + text + "': bad number '" + item + "'");
            }
            pos = next + 1;
        }
        if (out.empty()) throw std::invalid_argument("cipher spec '" + text + "': empty key");
        return out;
    };

    CipherDesc desc;
    if (head == "shift") {
        desc.kind = CipherKind::shift;
        desc.amounts = parse_ints(body);
        if (desc.amounts.size() != 1)
            throw std::invalid_argument("cipher spec '" + text + "': shift takes one amount");
    } else if (head == "vigenere") {
        desc.kind = CipherKind::vigenere;
        desc.amounts = parse_ints(body);
    } else if (head == "perm") {
        desc.kind = CipherKind::permutation;
        try {
            std::size_t used = 0;
            desc.perm_seed = std::stoull(body, &used);
            if (used != body.size()) throw std::invalid_argument(body);
        } catch (const std::exception&) {
            throw std::invalid_argument("cipher spec '" + text + "': bad seed '" + body + "'");
        }
    } else {
        throw std::invalid_argument("cipher spec '" + text + "': unknown kind '" + head + "'");
    }
    return desc;
}

} // namespace cipherlab
