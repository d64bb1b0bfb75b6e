#pragma once

#include <cstddef>
#include <string>

#include "rng.hpp"

namespace cipherlab {

// Synthetic English prose sampled from an embedded frequency-ranked word
// list (Zipf weighted), with sentence casing and punctuation. Useful when no
// text collection is on disk; letter frequencies track natural English.
std::string generate_text(Rng rng, std::size_t min_chars);

// Same stream reduced to lowercase a-z only (no spaces or punctuation);
// yields a vocabulary of at most 26 symbols at char level.
std::string generate_letters_only(Rng rng, std::size_t min_chars);

} // namespace cipherlab
