#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "codeattn/extraction_run.hpp"
#include "codeattn/rng.hpp"

namespace synth {

/// A random, syntactically valid Python program of roughly `statements`
/// top-level-or-nested statements (assignments, loops, branches, calls, defs).
std::string random_program(codeattn::Rng& rng, int statements);

/// `count` programs with ids "p000", "p001", ...
std::vector<std::pair<std::string, std::string>> random_corpus(std::uint64_t seed, std::size_t count, int statements);

struct RunShape {
    int layers = 2;
    int heads = 2;
    int hidden_dim = 8;
    std::uint64_t seed = 1;
};

/// Tokenizes each program the way a BPE model might (long identifiers split in
/// two, a start and an end special token) and fills softmax attention rows and
/// Gaussian hidden states.
codeattn::ExtractionRun synthetic_run(const std::vector<std::pair<std::string, std::string>>& programs,
                                      const RunShape& shape, const std::string& model_id = "synthetic");

/// A unique empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace synth
