#pragma once

#include <string>

#include "config.hpp"

namespace cipherlab {

// One function per CLI subcommand; all throw on failure. String returns are
// the human-readable reports the CLI prints.
std::string cmd_gen(const RunConfig& cfg);
std::string cmd_baseline(const RunConfig& cfg);
std::string cmd_train(const RunConfig& cfg);
std::string cmd_eval(const RunConfig& cfg);
std::string cmd_simplex(const RunConfig& cfg);
std::string cmd_plot(const RunConfig& cfg);

} // namespace cipherlab
