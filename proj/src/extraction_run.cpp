#include "codeattn/extraction_run.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "codeattn/f32_io.hpp"

namespace codeattn {

namespace fs = std::filesystem;
using nlohmann::json;

ConstRowMapXf ExtractionRun::attention(std::size_t sample, int layer, int head) const {
    const auto& s = samples.at(sample);
    if (layer < 0 || layer >= num_layers || head < 0 || head >= num_heads) throw Error("attention index out of range");
    const std::size_t n = s.n_sub;
    const std::size_t off = (static_cast<std::size_t>(layer) * num_heads + static_cast<std::size_t>(head)) * n * n;
    return ConstRowMapXf(s.attention.data() + off, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

ConstRowMapXf ExtractionRun::hidden(std::size_t sample, int layer) const {
    const auto& s = samples.at(sample);
    if (layer < 0 || layer > num_layers) throw Error("hidden layer index out of range");
    const std::size_t off = static_cast<std::size_t>(layer) * s.n_sub * static_cast<std::size_t>(hidden_dim);
    return ConstRowMapXf(s.hidden.data() + off, static_cast<Eigen::Index>(s.n_sub), hidden_dim);
}

namespace {

void check_id(const std::string& id) {
    if (id.empty() || id.find_first_of("/\\") != std::string::npos || id == "." || id == "..")
        throw Error("invalid sample id '" + id + "'");
}

std::vector<float> read_sample_f32(const fs::path& p, std::size_t expected, const std::string& sample) {
    auto v = read_f32(p, expected, "sample '" + sample + "'");
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k]))
            throw Error("sample '" + sample + "': non-finite value in " + p.filename().string() + " at element " +
                        std::to_string(k));
    }
    return v;
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw Error(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(where + ": bad field '" + key + "': " + e.what());
    }
}

}  // namespace

ExtractionRun load_run(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw Error("missing manifest.json in " + dir.string());
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw Error(std::string("manifest.json: ") + e.what());
    }
    const std::string where = "manifest.json";
    if (field<int>(m, "format_version", where) != ExtractionRun::kFormatVersion)
        throw Error("manifest.json: unsupported format_version");
    if (field<std::string>(m, "dtype", where) != "f32le") throw Error("manifest.json: dtype must be f32le");

    ExtractionRun run;
    run.model_id = field<std::string>(m, "model_id", where);
    run.num_layers = field<int>(m, "num_layers", where);
    run.num_heads = field<int>(m, "num_heads", where);
    run.hidden_dim = field<int>(m, "hidden_dim", where);
    if (run.num_layers <= 0 || run.num_heads <= 0 || run.hidden_dim <= 0)
        throw Error("manifest.json: layer/head/hidden counts must be positive");

    const auto L = static_cast<std::size_t>(run.num_layers);
    const auto H = static_cast<std::size_t>(run.num_heads);
    const auto d = static_cast<std::size_t>(run.hidden_dim);
    for (const auto& js : field<json>(m, "samples", where)) {
        RunSample s;
        s.id = field<std::string>(js, "id", "manifest sample");
        check_id(s.id);
        const std::string w = "sample '" + s.id + "'";
        s.n_sub = field<std::size_t>(js, "n_sub", w);
        s.n_code = field<std::size_t>(js, "n_code", w);
        if (js.contains("code")) s.code = js.at("code").get<std::string>();
        s.alignment.entries = field<std::vector<int>>(js, "alignment", w);
        if (s.alignment.entries.size() != s.n_sub)
            throw Error(w + ": alignment length " + std::to_string(s.alignment.entries.size()) + " != n_sub " +
                        std::to_string(s.n_sub));
        try {
            s.alignment.validate();
        } catch (const Error& e) {
            throw Error(w + ": " + e.what());
        }
        if (s.alignment.num_code() != s.n_code) throw Error(w + ": alignment covers a different number of code tokens than n_code");
        for (const auto& jt : field<json>(js, "code_tokens", w)) {
            CodeToken t;
            t.text = field<std::string>(jt, "text", w);
            t.span = {field<std::size_t>(jt, "start_byte", w), field<std::size_t>(jt, "end_byte", w)};
            t.category = parse_category(field<std::string>(jt, "category", w));
            t.index = s.code_tokens.size();
            s.code_tokens.push_back(std::move(t));
        }
        if (s.code_tokens.size() != s.n_code)
            throw Error(w + ": code_tokens has " + std::to_string(s.code_tokens.size()) + " entries, n_code is " +
                        std::to_string(s.n_code));
        s.attention = read_sample_f32(dir / ("attn_" + s.id + ".bin"), L * H * s.n_sub * s.n_sub, s.id);
        s.hidden = read_sample_f32(dir / ("hidden_" + s.id + ".bin"), (L + 1) * s.n_sub * d, s.id);
        run.samples.push_back(std::move(s));
    }
    return run;
}

void write_run(const ExtractionRun& run, const fs::path& dir) {
    fs::create_directories(dir);
    json m;
    m["format_version"] = ExtractionRun::kFormatVersion;
    m["model_id"] = run.model_id;
    m["num_layers"] = run.num_layers;
    m["num_heads"] = run.num_heads;
    m["hidden_dim"] = run.hidden_dim;
    m["dtype"] = "f32le";
    json samples = json::array();
    for (const auto& s : run.samples) {
        check_id(s.id);
        json js;
        js["id"] = s.id;
        if (s.code) js["code"] = *s.code;
        js["n_sub"] = s.n_sub;
        js["n_code"] = s.n_code;
        js["alignment"] = s.alignment.entries;
        json toks = json::array();
        for (const auto& t : s.code_tokens) {
            toks.push_back({{"text", t.text},
                            {"start_byte", t.span.begin},
                            {"end_byte", t.span.end},
                            {"category", std::string(to_string(t.category))}});
        }
        js["code_tokens"] = std::move(toks);
        samples.push_back(std::move(js));
        write_f32(dir / ("attn_" + s.id + ".bin"), s.attention.data(), s.attention.size());
        write_f32(dir / ("hidden_" + s.id + ".bin"), s.hidden.data(), s.hidden.size());
    }
    m["samples"] = std::move(samples);
    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw Error("cannot write manifest in " + dir.string());
    out << m.dump(2) << '\n';
}

std::vector<std::string> run_diagnostics(const ExtractionRun& run, double tol) {
    std::vector<std::string> out;
    for (std::size_t s = 0; s < run.samples.size(); ++s) {
        for (int l = 0; l < run.num_layers; ++l) {
            for (int h = 0; h < run.num_heads; ++h) {
                const auto bad = non_stochastic_rows(run.attention(s, l, h), tol);
                if (!bad.empty())
                    out.push_back("sample '" + run.samples[s].id + "' layer " + std::to_string(l) + " head " +
                                  std::to_string(h) + ": " + std::to_string(bad.size()) +
                                  " attention rows do not sum to 1");
            }
        }
    }
    return out;
}

}  // namespace codeattn
