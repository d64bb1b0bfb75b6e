// Writes a synthetic English-like corpus so the lab runs without any text
// collection on disk. For paper-faithful numbers, point the lab at a real
// corpus (e.g. a Brown corpus dump) instead.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "rng.hpp"
#include "textgen.hpp"

int main(int argc, char** argv) {
    std::string out_path;
    std::size_t chars = 1000000;
    std::uint64_t seed = 1;
    bool letters_only = false;

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto value = [&](const char* flag) -> const char* {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "error: %s needs a value\n", flag);
                std::exit(1);
            }
            return argv[++i];
        };
        if (arg == "--out") out_path = value("--out");
        else if (arg == "--chars") chars = std::strtoull(value("--chars"), nullptr, 10);
        else if (arg == "--seed") seed = std::strtoull(value("--seed"), nullptr, 10);
        else if (arg == "--letters-only") letters_only = true;
        else if (arg == "--help" || arg == "-h") {
            std::printf("usage: make_corpus --out FILE [--chars N] [--seed S] [--letters-only]\n"
                        "  --letters-only  lowercase a-z only (char vocab <= 26)\n");
            return 0;
        } else {
            std::fprintf(stderr, "error: unknown flag '%s'\n", arg.c_str());
            return 1;
        }
    }
    if (out_path.empty()) {
        std::fprintf(stderr, "error: --out is required\n");
        return 1;
    }

    const std::string text = letters_only
                                 ? cipherlab::generate_letters_only(cipherlab::Rng(seed), chars)
                                 : cipherlab::generate_text(cipherlab::Rng(seed), chars);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "error: cannot write %s\n", out_path.c_str());
        return 1;
    }
    out << text;
    std::printf("wrote %zu characters to %s\n", text.size(), out_path.c_str());
    return 0;
}
