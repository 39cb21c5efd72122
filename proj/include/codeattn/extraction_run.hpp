#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/token_align.hpp"
#include "codeattn/types.hpp"

namespace codeattn {

using RowMatrixXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMapXf = Eigen::Map<const RowMatrixXf>;

struct RunSample {
    std::string id;
    std::optional<std::string> code;
    std::size_t n_sub = 0;
    std::size_t n_code = 0;
    Alignment alignment;
    std::vector<CodeToken> code_tokens;
    std::vector<float> attention;  // [L, H, n_sub, n_sub] row-major
    std::vector<float> hidden;     // [L+1, n_sub, d] row-major
};

/// One model's exported attention and hidden states over a corpus
/// (Extraction Interchange Format v1).
struct ExtractionRun {
    static constexpr int kFormatVersion = 1;

    std::string model_id;
    int num_layers = 0;
    int num_heads = 0;
    int hidden_dim = 0;
    std::vector<RunSample> samples;

    ConstRowMapXf attention(std::size_t sample, int layer, int head) const;
    /// layer 0 is the embedding output.
    ConstRowMapXf hidden(std::size_t sample, int layer) const;
};

/// Reads manifest.json and the per-sample tensors; validates shapes, alignment
/// and finiteness. Errors name the offending sample.
ExtractionRun load_run(const std::filesystem::path& dir);

/// Writes `run` in the interchange format (used by tests and synthetic runs).
void write_run(const ExtractionRun& run, const std::filesystem::path& dir);

/// Non-fatal findings on a loaded run (currently: raw attention rows that are
/// not stochastic within `tol`).
std::vector<std::string> run_diagnostics(const ExtractionRun& run, double tol = 1e-3);

}  // namespace codeattn
