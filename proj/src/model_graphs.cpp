#include "codeattn/model_graphs.hpp"

namespace codeattn {

Symmetrize parse_symmetrize(std::string_view s) {
    if (s == "max") return Symmetrize::Max;
    if (s == "mean") return Symmetrize::Mean;
    if (s == "directed") return Symmetrize::Directed;
    throw Error("unknown symmetrization '" + std::string(s) + "' (expected max, mean or directed)");
}

void HistogramBins::add(double v) {
    if (v < kZero) {
        ++counts[0];
    } else if (v <= kLow) {
        ++counts[1];
    } else if (v <= kMid) {
        ++counts[2];
    } else {
        ++counts[3];
    }
}

std::array<double, 4> HistogramBins::percentages() const {
    std::array<double, 4> p{};
    const auto t = total();
    if (t == 0) return p;
    for (std::size_t k = 0; k < 4; ++k) p[k] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(t);
    return p;
}

HistogramBins& HistogramBins::operator+=(const HistogramBins& o) {
    for (std::size_t k = 0; k < 4; ++k) counts[k] += o.counts[k];
    return *this;
}

RunHistogram histogram(const ExtractionRun& run) {
    RunHistogram h;
    h.per_layer.resize(static_cast<std::size_t>(run.num_layers));
    for (std::size_t s = 0; s < run.samples.size(); ++s) {
        for (int l = 0; l < run.num_layers; ++l) {
            for (int hd = 0; hd < run.num_heads; ++hd)
                h.per_layer[static_cast<std::size_t>(l)] += histogram_of(run.attention(s, l, hd));
        }
    }
    for (const auto& b : h.per_layer) h.model += b;
    return h;
}

std::vector<MergedAttention<float>> merged_heads(const ExtractionRun& run, std::size_t sample) {
    std::vector<MergedAttention<float>> out;
    out.reserve(static_cast<std::size_t>(run.num_layers * run.num_heads));
    const auto& a = run.samples.at(sample).alignment;
    for (int l = 0; l < run.num_layers; ++l) {
        for (int h = 0; h < run.num_heads; ++h) out.push_back(merge_attention(run.attention(sample, l, h), a, l, h));
    }
    return out;
}

}  // namespace codeattn
