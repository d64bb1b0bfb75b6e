#include "analysis.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cipherlab {

FrequencyTable unigram_frequencies(const std::vector<TokenSeq>& bank, std::size_t vocab) {
    std::vector<std::size_t> counts(vocab, 0);
    std::size_t total = 0;
    for (const auto& seq : bank)
        for (TokenId t : seq) {
            if (t < 0 || static_cast<std::size_t>(t) >= vocab)
                throw std::invalid_argument("frequencies: token id outside vocabulary");
            counts[static_cast<std::size_t>(t)]++;
            ++total;
        }
    if (total == 0) throw std::invalid_argument("frequencies: empty bank");
    FrequencyTable table;
    table.p.resize(vocab);
    for (std::size_t i = 0; i < vocab; ++i)
        table.p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return table;
}

std::vector<TokenId> frequency_match(const FrequencyTable& plain, const FrequencyTable& cipher) {
    if (plain.vocab() != cipher.vocab())
        throw std::invalid_argument("frequency_match: table length mismatch");
    const std::size_t v = plain.vocab();
    auto ranked = [](const FrequencyTable& t) {
        std::vector<TokenId> order(t.vocab());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](TokenId a, TokenId b) {
            const double pa = t.p[static_cast<std::size_t>(a)];
            const double pb = t.p[static_cast<std::size_t>(b)];
            if (pa != pb) return pa > pb;
            return a < b;
        });
        return order;
    };
    const auto plain_rank = ranked(plain);
    const auto cipher_rank = ranked(cipher);
    std::vector<TokenId> mapping(v);
    for (std::size_t i = 0; i < v; ++i)
        mapping[static_cast<std::size_t>(cipher_rank[i])] = plain_rank[i];
    return mapping;
}

double index_of_coincidence(const TokenSeq& seq, std::size_t vocab) {
    if (seq.size() < 2) throw std::invalid_argument("ioc: need at least two tokens");
    std::vector<std::size_t> counts(vocab, 0);
    for (TokenId t : seq) {
        if (t < 0 || static_cast<std::size_t>(t) >= vocab)
            throw std::invalid_argument("ioc: token id outside vocabulary");
        counts[static_cast<std::size_t>(t)]++;
    }
    const double n = static_cast<double>(seq.size());
    double acc = 0;
    for (std::size_t c : counts) acc += static_cast<double>(c) * static_cast<double>(c - (c ? 1 : 0));
    return acc / (n * (n - 1.0));
}

KeyLengthEstimate estimate_key_length(const std::vector<TokenSeq>& cipher_bank, std::size_t max_len,
                                      double plain_ioc, std::size_t vocab) {
    if (max_len < 1) throw std::invalid_argument("estimate_key_length: max_len must be >= 1");
    std::size_t total = 0;
    for (const auto& s : cipher_bank) total += s.size();
    if (total < 2 * max_len)
        throw std::invalid_argument("estimate_key_length: bank shorter than 2*max_len");

    KeyLengthEstimate est;
    est.threshold = 0.5 * (1.0 / static_cast<double>(vocab) + plain_ioc);
    est.ioc_by_length.resize(max_len, 0.0);

    for (std::size_t len = 1; len <= max_len; ++len) {
        double weighted = 0;
        double weight = 0;
        for (const auto& seq : cipher_bank) {
            for (std::size_t r = 0; r < len; ++r) {
                TokenSeq residue;
                for (std::size_t i = r; i < seq.size(); i += len) residue.push_back(seq[i]);
                if (residue.size() < 2) continue;
                const double w = static_cast<double>(residue.size());
                weighted += w * index_of_coincidence(residue, vocab);
                weight += w;
            }
        }
        est.ioc_by_length[len - 1] = weight > 0 ? weighted / weight : 0.0;
    }

    est.length = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        if (est.ioc_by_length[len - 1] > est.threshold) {
            est.length = len;
            break;
        }
    }
    if (est.length == 0) {
        est.fallback = true;
        est.length = 1 + static_cast<std::size_t>(std::distance(
                             est.ioc_by_length.begin(),
                             std::max_element(est.ioc_by_length.begin(), est.ioc_by_length.end())));
    }

    // Kasiski diagnostic: spacings between repeated trigrams inside each
    // sequence.
    for (const auto& seq : cipher_bank) {
        if (seq.size() < 6) continue;
        std::map<std::uint64_t, std::size_t> last_pos;
        for (std::size_t i = 0; i + 2 < seq.size(); ++i) {
            const std::uint64_t trigram = (static_cast<std::uint64_t>(seq[i]) << 42) |
                                          (static_cast<std::uint64_t>(seq[i + 1]) << 21) |
                                          static_cast<std::uint64_t>(seq[i + 2]);
            auto it = last_pos.find(trigram);
            if (it != last_pos.end()) {
                est.kasiski_spacings.push_back(i - it->second);
                it->second = i;
            } else {
                last_pos.emplace(trigram, i);
            }
        }
    }
    return est;
}

MappingTable vigenere_frequency_attack(const std::vector<TokenSeq>& cipher_bank,
                                       std::size_t key_len, const FrequencyTable& plain,
                                       std::size_t vocab) {
    if (key_len < 1) throw std::invalid_argument("vigenere attack: key_len must be >= 1");
    MappingTable out;
    out.per_index.reserve(key_len);
    for (std::size_t r = 0; r < key_len; ++r) {
        std::vector<TokenSeq> residue_bank;
        for (const auto& seq : cipher_bank) {
            TokenSeq residue;
            for (std::size_t i = r; i < seq.size(); i += key_len) residue.push_back(seq[i]);
            if (!residue.empty()) residue_bank.push_back(std::move(residue));
        }
        if (residue_bank.empty())
            throw std::invalid_argument("vigenere attack: stream too short for key index " +
                                        std::to_string(r));
        out.per_index.push_back(frequency_match(plain, unigram_frequencies(residue_bank, vocab)));
    }
    return out;
}

double mapping_accuracy(const MappingTable& mapping, const std::vector<TokenSeq>& cipher_bank,
                        const CipherSpec& truth, std::size_t vocab) {
    if (mapping.per_index.empty()) throw std::invalid_argument("mapping_accuracy: empty mapping");
    for (const auto& table : mapping.per_index) {
        if (table.size() != vocab) throw std::invalid_argument("mapping_accuracy: table size != V");
        std::vector<char> seen(vocab, 0);
        for (TokenId t : table) {
            if (t < 0 || static_cast<std::size_t>(t) >= vocab || seen[static_cast<std::size_t>(t)])
                throw std::invalid_argument("mapping_accuracy: table is not a bijection");
            seen[static_cast<std::size_t>(t)] = 1;
        }
    }
    double acc = 0;
    std::size_t counted = 0;
    for (const auto& seq : cipher_bank) {
        if (seq.empty()) continue;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const auto& table = mapping.per_index[i % mapping.per_index.size()];
            const TokenId mapped = table[static_cast<std::size_t>(seq[i])];
            if (mapped == true_plain_token(seq[i], i, truth, vocab)) ++hits;
        }
        acc += static_cast<double>(hits) / static_cast<double>(seq.size());
        ++counted;
    }
    if (counted == 0) throw std::invalid_argument("mapping_accuracy: empty bank");
    return acc / static_cast<double>(counted);
}

MappingTable true_inverse_mapping(const CipherSpec& spec, std::size_t vocab) {
    spec.validate(vocab);
    MappingTable out;
    const std::size_t key_len = spec.key_length();
    out.per_index.resize(key_len);
    for (std::size_t r = 0; r < key_len; ++r) {
        out.per_index[r].resize(vocab);
        for (std::size_t c = 0; c < vocab; ++c)
            out.per_index[r][c] = true_plain_token(static_cast<TokenId>(c), r, spec, vocab);
    }
    return out;
}

} // namespace cipherlab
