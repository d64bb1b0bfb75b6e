#include "textgen.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <vector>

namespace cipherlab {

namespace {

// Common English words, roughly frequency ranked; sampled with Zipf weights
// so the produced character statistics resemble running prose.
constexpr const char* kWords[] = {
    "the", "of", "and", "to", "a", "in", "that", "is", "was", "he",
    "for", "it", "with", "as", "his", "on", "be", "at", "by", "i",
    "this", "had", "not", "are", "but", "from", "or", "have", "an", "they",
    "which", "one", "you", "were", "her", "all", "she", "there", "would", "their",
    "we", "him", "been", "has", "when", "who", "will", "more", "no", "if",
    "out", "so", "said", "what", "up", "its", "about", "into", "than", "them",
    "can", "only", "other", "new", "some", "could", "time", "these", "two", "may",
    "then", "do", "first", "any", "my", "now", "such", "like", "our", "over",
    "man", "me", "even", "most", "made", "after", "also", "did", "many", "before",
    "must", "through", "back", "years", "where", "much", "your", "way", "well", "down",
    "should", "because", "each", "just", "those", "people", "mr", "how", "too", "little",
    "state", "good", "very", "make", "world", "still", "own", "see", "men", "work",
    "long", "get", "here", "between", "both", "life", "being", "under", "never", "day",
    "same", "another", "know", "while", "last", "might", "us", "great", "old", "year",
    "off", "come", "since", "against", "go", "came", "right", "used", "take", "three",
    "states", "himself", "few", "house", "use", "during", "without", "again", "place", "american",
    "around", "however", "home", "small", "found", "mrs", "thought", "went", "say", "part",
    "once", "general", "high", "upon", "school", "every", "dont", "does", "got", "united",
    "left", "number", "course", "war", "until", "always", "away", "something", "fact", "though",
    "water", "less", "public", "put", "think", "almost", "hand", "enough", "far", "took",
    "head", "yet", "government", "system", "better", "set", "told", "nothing", "night", "end",
    "why", "called", "didnt", "eyes", "find", "going", "look", "asked", "later", "knew",
    "point", "next", "program", "city", "business", "give", "group", "toward", "young", "days",
    "let", "room", "within", "change", "side", "present", "case", "among", "often", "important",
    "things", "looked", "early", "white", "john", "become", "large", "big", "need", "four",
    "felt", "along", "best", "ever", "least", "power", "development", "light", "thing", "seemed",
    "family", "interest", "want", "members", "others", "mind", "country", "area", "done", "turned",
    "although", "open", "service", "certain", "kind", "different", "began", "door", "problem", "means",
    "god", "several", "second", "national", "possible", "rather", "per", "face", "social", "form",
    "order", "law", "however", "shall", "really", "question", "today", "hands", "church", "history",
    "name", "result", "action", "came", "above", "sense", "feet", "show", "whole", "field",
    "together", "fire", "held", "themselves", "water", "period", "experience", "words", "death", "half",
    "already", "tell", "having", "word", "body", "either", "across", "woman", "plan", "quite",
    "keep", "children", "president", "making", "real", "seen", "play", "control", "moment", "major",
    "able", "others", "free", "saw", "matter", "voice", "human", "areas", "policy", "army",
    "close", "alone", "special", "level", "hours", "anything", "love", "position", "schools", "million",
    "sound", "son", "care", "information", "gave", "six", "age", "idea", "run", "thus",
    "table", "study", "given", "short", "class", "simple", "mother", "road", "war", "line",
    "true", "cost", "office", "brought", "whether", "leave", "usually", "money", "taken", "college",
    "minutes", "force", "help", "value", "stood", "street", "late", "strong", "turn", "necessary",
    "society", "further", "wife", "political", "five", "economic", "black", "cannot", "girl", "feel",
    "various", "air", "party", "committee", "available", "community", "problems", "job", "surface", "top",
    "living", "week", "effect", "full", "county", "student", "paper", "english", "music", "nature",
    "example", "kept", "space", "father", "required", "spirit", "union", "recent", "complete", "wanted",
    "hard", "cut", "clear", "outside", "figure", "sort", "hope", "town", "dark", "ground",
    "third", "federal", "type", "wont", "book", "happened", "amount", "member", "report", "itself",
    "low", "art", "common", "university", "miss", "therefore", "council", "increase", "front", "market",
    "trying", "basis", "situation", "deal", "nor", "knowledge", "process", "gone", "bring", "respect",
    "needed", "education", "especially", "following", "central", "personal", "coming", "research", "million", "peace",
    "evidence", "says", "attention", "purpose", "herself", "direction", "support", "single", "board", "costs",
    "picture", "ago", "sometimes", "met", "modern", "reason", "future", "west", "provide", "developed",
    "entire", "industry", "months", "questions", "food", "ready", "tax", "material", "total", "moved",
    "basic", "doubt", "actually", "effort", "cold", "press", "method", "stage", "instead", "lost",
    "medical", "wide", "values", "range", "red", "land", "court", "results", "north", "south",
    "secretary", "century", "friends", "hundred", "ten", "easy", "talk", "walked", "river", "beyond",
    "start", "soon", "particularly", "natural", "heart", "makes", "private", "behind", "final", "due",
    "higher", "letter", "religious", "christian", "square", "conditions", "remember", "account", "international", "moral",
    "equipment", "organization", "poor", "district", "size", "training", "hair", "subject", "wrote", "answer",
    "summer", "south", "pay", "difficult", "earlier", "decided", "added", "returned", "reached",
    "influence", "tried", "heard", "addition", "expected", "english", "section", "meeting", "shown", "professional",
    "followed", "strength", "fine", "piece", "plant", "parts", "groups", "floor", "pressure", "upon",
    "association", "treatment", "cent", "blue", "station", "seems", "series", "industrial", "particular",
    "read", "defense", "writing", "glass", "latter", "list", "rest", "fall", "meet", "c",
    "bed", "language", "prepared", "note", "seem", "generally", "move", "original", "normal", "merely",
    "paid", "date", "similar", "direct", "property", "temperature", "described", "county", "france", "act",
    "concerned", "determined", "marriage", "english", "ideas", "lines", "carried", "fear", "systems", "plane",
    "proper", "letters", "assistance", "weeks", "sat", "literature", "england", "trade", "science", "provided",
    "england", "apparently", "comes", "clearly", "recently", "increased", "approach", "stand", "became", "appeared",
    "sun", "meaning", "growth", "built", "trouble", "understand", "include", "obtained", "charge", "month",
    "morning", "performance", "nations", "image", "christ", "nearly", "beginning", "practice", "brown", "current",
    "elements", "opportunity", "issue", "efforts", "designed", "green", "feeling", "immediately", "administration", "greater",
    "anyone", "consider", "thinking", "output", "radio", "visit", "mass", "role", "storm", "bill",
};
constexpr std::size_t kWordCount = sizeof(kWords) / sizeof(kWords[0]);

std::size_t pick_word(Rng& rng, const std::vector<double>& cdf) {
    const double u = rng.uniform();
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cdf[mid] < u) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

const std::vector<double>& zipf_cdf() {
    static const std::vector<double> cdf = [] {
        std::vector<double> w(kWordCount);
        double total = 0;
        for (std::size_t r = 0; r < kWordCount; ++r) {
            w[r] = 1.0 / static_cast<double>(r + 3);
            total += w[r];
        }
        double acc = 0;
        for (auto& x : w) {
            acc += x / total;
            x = acc;
        }
        w.back() = 1.0;
        return w;
    }();
    return cdf;
}

} // namespace

std::string generate_text(Rng rng, std::size_t min_chars) {
    const auto& cdf = zipf_cdf();
    std::string out;
    out.reserve(min_chars + 128);
    std::size_t sentences_in_paragraph = 0;
    while (out.size() < min_chars) {
        const std::size_t words = 4 + rng.below(11);
        for (std::size_t i = 0; i < words; ++i) {
            std::string word = kWords[pick_word(rng, cdf)];
            if (i == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            out += word;
            if (i + 1 < words) {
                if (i >= 2 && rng.uniform() < 0.10) out += ',';
                out += ' ';
            }
        }
        const double u = rng.uniform();
        out += u < 0.85 ? '.' : (u < 0.93 ? '?' : '!');
        if (++sentences_in_paragraph >= 5 + rng.below(4)) {
            out += '\n';
            sentences_in_paragraph = 0;
        } else {
            out += ' ';
        }
    }
    return out;
}

std::string generate_letters_only(Rng rng, std::size_t min_chars) {
    std::string out;
    out.reserve(min_chars + 128);
    while (out.size() < min_chars) {
        const std::string chunk = generate_text(rng.fork(out.size()), 4096);
        for (char c : chunk) {
            const auto u = static_cast<unsigned char>(c);
            if (std::isalpha(u)) out += static_cast<char>(std::tolower(u));
        }
    }
    out.resize(min_chars);
    return out;
}

} // namespace cipherlab
