#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cipherlab {

namespace {

constexpr const char* kUnknownToken = "<unk>";

// Decodes one UTF-8 codepoint starting at `pos`, returns its byte length.
// Throws on malformed sequences.
std::size_t utf8_advance(const std::string& s, std::size_t pos) {
    const auto byte = static_cast<unsigned char>(s[pos]);
    std::size_t len = 0;
    if (byte < 0x80) len = 1;
    else if ((byte & 0xE0) == 0xC0) len = 2;
    else if ((byte & 0xF0) == 0xE0) len = 3;
    else if ((byte & 0xF8) == 0xF0) len = 4;
    else throw std::invalid_argument("ingest: invalid UTF-8 lead byte");
    if (pos + len > s.size()) throw std::invalid_argument("ingest: truncated UTF-8 sequence");
    for (std::size_t i = 1; i < len; ++i)
        if ((static_cast<unsigned char>(s[pos + i]) & 0xC0) != 0x80)
            throw std::invalid_argument("ingest: invalid UTF-8 continuation byte");
    return len;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '\''; }

} // namespace

std::vector<std::string> ingest_text(const std::string& bytes, VocabLevel level) {
    if (bytes.empty()) throw std::invalid_argument("ingest: empty source");
    std::vector<std::string> out;
    if (level == VocabLevel::chars) {
        for (std::size_t pos = 0; pos < bytes.size();) {
            const std::size_t len = utf8_advance(bytes, pos);
            out.emplace_back(bytes, pos, len);
            pos += len;
        }
        return out;
    }
    // Word level: runs of word characters become lowercased words; every
    // other non-space character stands alone as a token.
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t len = utf8_advance(bytes, pos);
        const auto c = static_cast<unsigned char>(bytes[pos]);
        if (len == 1 && std::isspace(c)) {
            ++pos;
            continue;
        }
        if (len == 1 && is_word_char(c)) {
            std::string word;
            while (pos < bytes.size()) {
                const auto wc = static_cast<unsigned char>(bytes[pos]);
                if (!(utf8_advance(bytes, pos) == 1 && is_word_char(wc))) break;
                word.push_back(static_cast<char>(std::tolower(wc)));
                ++pos;
            }
            out.push_back(std::move(word));
        } else {
            out.emplace_back(bytes, pos, len);
            pos += len;
        }
    }
    if (out.empty()) throw std::invalid_argument("ingest: source holds no tokens");
    return out;
}

std::vector<std::string> ingest_file(const std::string& path, VocabLevel level) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ingest_text(ss.str(), level);
}

Vocabulary Vocabulary::build(const std::vector<std::string>& stream, VocabLevel level,
                             std::optional<std::size_t> k) {
    if (stream.empty()) throw std::invalid_argument("vocab: empty token stream");
    Vocabulary vocab;
    vocab.level_ = level;

    // std::map keeps token order deterministic.
    std::map<std::string, std::size_t> counts;
    for (const auto& t : stream) counts[t]++;

    if (level == VocabLevel::chars || !k.has_value()) {
        for (const auto& [tok, n] : counts) {
            (void)n;
            vocab.ids_.emplace(tok, static_cast<TokenId>(vocab.tokens_.size()));
            vocab.tokens_.push_back(tok);
        }
        return vocab;
    }

    if (*k < 2) throw std::invalid_argument("vocab: k must be at least 2");
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const std::size_t keep = std::min(*k - 1, ranked.size());
    for (std::size_t i = 0; i < keep; ++i) {
        vocab.ids_.emplace(ranked[i].first, static_cast<TokenId>(vocab.tokens_.size()));
        vocab.tokens_.push_back(ranked[i].first);
    }
    vocab.unknown_ = static_cast<TokenId>(vocab.tokens_.size());
    vocab.ids_.emplace(kUnknownToken, *vocab.unknown_);
    vocab.tokens_.push_back(kUnknownToken);
    return vocab;
}

TokenId Vocabulary::id(const std::string& token) const {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    if (unknown_) return *unknown_;
    throw std::out_of_range("vocab: token '" + token + "' not present");
}

const std::string& Vocabulary::token(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
        throw std::out_of_range("vocab: id " + std::to_string(id) + " out of range");
    return tokens_[static_cast<std::size_t>(id)];
}

TokenSeq Vocabulary::encode(const std::vector<std::string>& stream) const {
    TokenSeq out;
    out.reserve(stream.size());
    for (const auto& t : stream) out.push_back(id(t));
    return out;
}

std::string Vocabulary::decode(const TokenSeq& seq, const std::string& sep) const {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i && !sep.empty()) out += sep;
        out += token(seq[i]);
    }
    return out;
}

Banks sample_banks(const TokenSeq& stream, std::size_t batch_size, std::size_t seq_len,
                   const CipherSpec& spec, std::size_t vocab, Rng& rng) {
    if (batch_size == 0 || seq_len == 0) throw std::invalid_argument("sample_banks: empty request");
    if (stream.size() < 2 * batch_size * seq_len)
        throw std::invalid_argument("sample_banks: stream too short for 2*batch_size windows");
    const std::size_t span = stream.size() - seq_len + 1;
    auto window = [&] {
        const std::size_t start = static_cast<std::size_t>(rng.below(span));
        return TokenSeq(stream.begin() + static_cast<std::ptrdiff_t>(start),
                        stream.begin() + static_cast<std::ptrdiff_t>(start + seq_len));
    };
    Banks banks;
    banks.x.reserve(batch_size);
    banks.y.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) banks.x.push_back(window());
    for (std::size_t i = 0; i < batch_size; ++i) banks.y.push_back(encipher(window(), spec, vocab));
    return banks;
}

void write_bank(const std::string& path, const std::vector<TokenSeq>& bank, std::size_t vocab,
                std::size_t seq_len) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write bank file: " + path);
    out << "V=" << vocab << " N=" << seq_len << "\n";
    for (const auto& seq : bank) {
        if (seq.size() != seq_len) throw std::invalid_argument("write_bank: ragged sequence");
        for (std::size_t i = 0; i < seq.size(); ++i) out << (i ? " " : "") << seq[i];
        out << "\n";
    }
    if (!out) throw std::runtime_error("short write on bank file: " + path);
}

BankFile read_bank(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bank file: " + path);
    BankFile bf;
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("bank file is empty: " + path);
    if (std::sscanf(header.c_str(), "V=%zu N=%zu", &bf.vocab, &bf.seq_len) != 2)
        throw std::runtime_error("bank file has a malformed header: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        TokenSeq seq;
        long v;
        while (ss >> v) {
            if (v < 0 || static_cast<std::size_t>(v) >= bf.vocab)
                throw std::runtime_error("bank file id out of range: " + path);
            seq.push_back(static_cast<TokenId>(v));
        }
        if (!ss.eof()) throw std::runtime_error("bank file has a malformed line: " + path);
        if (seq.size() != bf.seq_len)
            throw std::runtime_error("bank file sequence length mismatch: " + path);
        bf.sequences.push_back(std::move(seq));
    }
    return bf;
}

} // namespace cipherlab
