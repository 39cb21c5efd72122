#include "codeattn/probe_datasets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "codeattn/f32_io.hpp"
#include "codeattn/rng.hpp"

namespace codeattn {

namespace fs = std::filesystem;
using json = nlohmann::json;

ProbeTask parse_probe_task(std::string_view s) {
    if (s == "distance") return ProbeTask::Distance;
    if (s == "siblings") return ProbeTask::Siblings;
    if (s == "dfg") return ProbeTask::DataFlow;
    throw Error("unknown probe task '" + std::string(s) + "' (expected distance, siblings or dfg)");
}

Pairing parse_pairing(std::string_view s) {
    if (s == "keyword-all") return Pairing::KeywordAll;
    if (s == "keyword-identifier") return Pairing::KeywordIdentifier;
    if (s == "identifier-identifier") return Pairing::IdentifierIdentifier;
    throw Error("unknown pairing '" + std::string(s) +
                "' (expected keyword-all, keyword-identifier or identifier-identifier)");
}

std::string_view to_string(ProbeTask t) {
    switch (t) {
        case ProbeTask::Distance: return "distance";
        case ProbeTask::Siblings: return "siblings";
        case ProbeTask::DataFlow: return "dfg";
    }
    return "distance";
}

std::string_view to_string(Pairing p) {
    switch (p) {
        case Pairing::KeywordAll: return "keyword-all";
        case Pairing::KeywordIdentifier: return "keyword-identifier";
        case Pairing::IdentifierIdentifier: return "identifier-identifier";
    }
    return "keyword-all";
}

std::vector<std::string> task_labels(ProbeTask t) {
    switch (t) {
        case ProbeTask::Distance: return {"2", "3", "4", "5", "6"};
        case ProbeTask::Siblings: return {"sibling", "not_sibling"};
        case ProbeTask::DataFlow: return {"NoEdge", "ComesFrom", "ComputedFrom"};
    }
    return {};
}

namespace {

constexpr std::array<std::string_view, 22> kProbeKeywords = {
    "def", "for", "if", "none", "else", "false", "true", "or", "and", "return", "not",
    "elif", "with", "try", "raise", "except", "break", "while", "assert", "print", "continue", "class"};

}  // namespace

std::span<const std::string_view> probe_keywords() { return kProbeKeywords; }

bool is_probe_keyword(const Ast& ast, std::size_t token) {
    if (categorize_token(ast, token) != TokenCategory::Keyword) return false;
    std::string lower = ast.tokens[token].text;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return std::find(kProbeKeywords.begin(), kProbeKeywords.end(), lower) != kProbeKeywords.end();
}

DatasetQuota default_quota(ProbeTask t, Pairing p) {
    const bool kw_all = p == Pairing::KeywordAll;
    switch (t) {
        case ProbeTask::Distance: return {1300, kw_all ? 160u : 450u};
        case ProbeTask::Siblings: return {1500, kw_all ? 100u : 300u};
        case ProbeTask::DataFlow: return {1500, 130};
    }
    return {};
}

ProbeCorpus corpus_from_sources(std::vector<std::pair<std::string, std::string>> id_and_code) {
    std::sort(id_and_code.begin(), id_and_code.end());
    ProbeCorpus c;
    for (auto& [id, code] : id_and_code) {
        if (!c.codes.empty() && c.codes.back().id == id) throw Error("duplicate sample id '" + id + "'");
        ProbeCode pc;
        pc.id = id;
        try {
            pc.ast = parse_ast(code);
        } catch (const Error& e) {
            throw Error("sample '" + id + "': " + e.what());
        }
        pc.dfg = data_flow_graph(pc.ast);
        c.codes.push_back(std::move(pc));
    }
    return c;
}

ProbeCorpus corpus_from_run(const ExtractionRun& run) {
    std::vector<std::pair<std::string, std::string>> src;
    for (const auto& s : run.samples) {
        if (!s.code) throw Error("sample '" + s.id + "': manifest carries no source code");
        src.emplace_back(s.id, *s.code);
    }
    ProbeCorpus c = corpus_from_sources(std::move(src));
    for (const auto& s : run.samples) {
        const auto it = std::lower_bound(c.codes.begin(), c.codes.end(), s.id,
                                         [](const ProbeCode& pc, const std::string& id) { return pc.id < id; });
        if (it->ast.tokens.size() != s.code_tokens.size())
            throw Error("sample '" + s.id + "': parser found " + std::to_string(it->ast.tokens.size()) +
                        " code tokens, manifest lists " + std::to_string(s.code_tokens.size()));
    }
    return c;
}

namespace {

using Pools = std::vector<std::vector<PairRef>>;  // candidates per label id

bool partner_ok(const Ast& ast, std::size_t j, Pairing p) {
    if (p == Pairing::KeywordAll) return true;
    return categorize_token(ast, j) == TokenCategory::Identifier;
}

// Both endpoints being anchors would list the pair twice.
bool keep_ordered(const Ast& ast, std::size_t i, std::size_t j) { return i < j || !is_probe_keyword(ast, j); }

void distance_candidates(const ProbeCode& c, Pairing p, Pools& pools) {
    const Ast& ast = c.ast;
    for (std::size_t i = 0; i < ast.num_tokens(); ++i) {
        if (!is_probe_keyword(ast, i)) continue;
        for (std::size_t j = 0; j < ast.num_tokens(); ++j) {
            if (j == i || !partner_ok(ast, j, p) || !keep_ordered(ast, i, j)) continue;
            const std::size_t d = tree_distance(ast, i, j);
            if (d >= 2 && d <= 6) pools[d - 2].push_back({c.id, i, j, static_cast<int>(d - 2)});
        }
    }
}

void siblings_candidates(const ProbeCode& c, Pairing p, Rng& rng, Pools& pools) {
    const Ast& ast = c.ast;
    for (std::size_t i = 0; i < ast.num_tokens(); ++i) {
        if (!is_probe_keyword(ast, i)) continue;
        std::vector<std::size_t> sib;
        std::vector<std::size_t> non;
        for (std::size_t j = 0; j < ast.num_tokens(); ++j) {
            if (j == i || !partner_ok(ast, j, p) || !keep_ordered(ast, i, j)) continue;
            (are_siblings(ast, i, j) ? sib : non).push_back(j);
        }
        const std::size_t m = std::min(sib.size(), non.size());
        for (const auto k : rng.sample_indices(sib.size(), m)) pools[0].push_back({c.id, i, sib[k], 0});
        for (const auto k : rng.sample_indices(non.size(), m)) pools[1].push_back({c.id, i, non[k], 1});
    }
}

void dfg_candidates(const ProbeCode& c, Rng& rng, Pools& pools) {
    const Ast& ast = c.ast;
    std::set<std::pair<std::size_t, std::size_t>> linked;  // unordered
    std::map<std::pair<std::size_t, std::size_t>, std::set<DfgLabel>> labels;  // (dst, src)
    for (const auto& e : c.dfg.edges) {
        linked.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
        labels[{e.dst, e.src}].insert(e.label);
    }
    for (std::size_t i = 0; i < ast.num_tokens(); ++i) {
        if (categorize_token(ast, i) != TokenCategory::Identifier) continue;
        std::size_t comes = 0;
        std::size_t computed = 0;
        for (auto it = labels.lower_bound({i, 0}); it != labels.end() && it->first.first == i; ++it) {
            if (it->second.size() != 1) continue;  // both relations between the same tokens: ambiguous
            const DfgLabel l = *it->second.begin();
            const int id = l == DfgLabel::ComesFrom ? 1 : 2;
            pools[static_cast<std::size_t>(id)].push_back({c.id, i, it->first.second, id});
            (l == DfgLabel::ComesFrom ? comes : computed) += 1;
        }
        const std::size_t want = (std::max(comes, computed) + 1) / 2;
        if (want == 0) continue;
        std::vector<std::size_t> free;
        for (std::size_t j = 0; j < ast.num_tokens(); ++j) {
            if (j == i || categorize_token(ast, j) != TokenCategory::Identifier) continue;
            if (!linked.count({std::min(i, j), std::max(i, j)})) free.push_back(j);
        }
        for (const auto k : rng.sample_indices(free.size(), want)) pools[0].push_back({c.id, i, free[k], 0});
    }
}

}  // namespace

PairSelection select_pairs(const ProbeCorpus& corpus, ProbeTask task, Pairing pairing, std::uint64_t seed) {
    return select_pairs(corpus, task, pairing, seed, default_quota(task, pairing));
}

PairSelection select_pairs(const ProbeCorpus& corpus, ProbeTask task, Pairing pairing, std::uint64_t seed,
                           const DatasetQuota& quota) {
    if (task == ProbeTask::DataFlow) {
        if (pairing == Pairing::KeywordAll || pairing == Pairing::KeywordIdentifier) pairing = Pairing::IdentifierIdentifier;
    } else if (pairing == Pairing::IdentifierIdentifier) {
        throw Error(std::string(to_string(task)) + " task needs keyword-all or keyword-identifier pairing");
    }
    if (corpus.codes.empty()) throw Error("probe corpus is empty");

    PairSelection sel;
    sel.task = task;
    sel.pairing = pairing;
    sel.seed = seed;
    sel.quota = quota;

    Rng rng(seed);
    auto picked = rng.sample_indices(corpus.codes.size(), quota.codes);
    std::sort(picked.begin(), picked.end());

    const auto names = task_labels(task);
    Pools pools(names.size());
    for (const auto k : picked) {
        const ProbeCode& c = corpus.codes[k];
        sel.codes_used.push_back(c.id);
        switch (task) {
            case ProbeTask::Distance: distance_candidates(c, pairing, pools); break;
            case ProbeTask::Siblings: siblings_candidates(c, pairing, rng, pools); break;
            case ProbeTask::DataFlow: dfg_candidates(c, rng, pools); break;
        }
    }

    std::string shortfall;
    for (std::size_t l = 0; l < pools.size(); ++l) {
        if (pools[l].size() < quota.per_label)
            shortfall += (shortfall.empty() ? "" : ", ") + names[l] + " has " + std::to_string(pools[l].size()) +
                         " of " + std::to_string(quota.per_label);
    }
    if (!shortfall.empty())
        throw Error("corpus too small for the " + std::string(to_string(task)) + " quota (" +
                    std::to_string(sel.codes_used.size()) + " codes): " + shortfall);

    const std::size_t n_train = quota.per_label * 8 / 10;
    for (std::size_t l = 0; l < pools.size(); ++l) {
        const auto chosen = rng.sample_indices(pools[l].size(), quota.per_label);
        for (std::size_t k = 0; k < chosen.size(); ++k) (k < n_train ? sel.train : sel.test).push_back(pools[l][chosen[k]]);
    }
    return sel;
}

std::vector<int> ProbeDataset::train_labels() const {
    std::vector<int> out;
    for (const auto& p : selection.train) out.push_back(p.label);
    return out;
}

std::vector<int> ProbeDataset::test_labels() const {
    std::vector<int> out;
    for (const auto& p : selection.test) out.push_back(p.label);
    return out;
}

namespace {

Eigen::MatrixXf build_vectors(const std::vector<PairRef>& pairs, ProbeTask task,
                              const std::map<std::string, Eigen::MatrixXf>& hidden, int d) {
    const bool diff = task == ProbeTask::Distance;
    Eigen::MatrixXf out(static_cast<Eigen::Index>(pairs.size()), diff ? d : 2 * d);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& p = pairs[k];
        const Eigen::MatrixXf& h = hidden.at(p.sample_id);
        const Eigen::VectorXd hi = h.row(static_cast<Eigen::Index>(p.i)).transpose().cast<double>();
        const Eigen::VectorXd hj = h.row(static_cast<Eigen::Index>(p.j)).transpose().cast<double>();
        const auto r = static_cast<Eigen::Index>(k);
        if (diff) {
            out.row(r) = (hi - hj).transpose().cast<float>();
        } else {
            out.row(r).head(d) = hi.transpose().cast<float>();
            out.row(r).tail(d) = hj.transpose().cast<float>();
        }
    }
    return out;
}

}  // namespace

ProbeDataset materialize(const PairSelection& sel, const ExtractionRun& run, int layer) {
    if (layer < 0 || layer > run.num_layers)
        throw Error("layer " + std::to_string(layer) + " outside 0.." + std::to_string(run.num_layers));
    std::map<std::string, Eigen::MatrixXf> hidden;
    std::set<std::string> needed;
    for (const auto* list : {&sel.train, &sel.test}) {
        for (const auto& p : *list) needed.insert(p.sample_id);
    }
    for (std::size_t s = 0; s < run.samples.size(); ++s) {
        const auto& sample = run.samples[s];
        if (!needed.count(sample.id)) continue;
        auto merged = merge_hidden(run.hidden(s, layer), sample.alignment, layer);
        hidden.emplace(sample.id, std::move(merged.vectors));
    }
    for (const auto& id : needed) {
        if (!hidden.count(id)) throw Error("sample '" + id + "' selected for probing is missing from the run");
    }
    for (const auto* list : {&sel.train, &sel.test}) {
        for (const auto& p : *list) {
            const auto n = static_cast<std::size_t>(hidden.at(p.sample_id).rows());
            if (p.i >= n || p.j >= n)
                throw Error("sample '" + p.sample_id + "': pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) +
                            ") outside its " + std::to_string(n) + " code tokens");
        }
    }
    ProbeDataset ds;
    ds.selection = sel;
    ds.model_id = run.model_id;
    ds.layer = layer;
    ds.train = build_vectors(sel.train, sel.task, hidden, run.hidden_dim);
    ds.test = build_vectors(sel.test, sel.task, hidden, run.hidden_dim);
    return ds;
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
    if (!out) throw Error("failed writing " + p.string());
}

std::string labels_text(const std::vector<PairRef>& pairs, const std::vector<std::string>& names) {
    std::string out;
    for (const auto& p : pairs) {
        out += names.at(static_cast<std::size_t>(p.label)) + '\t' + p.sample_id + '\t' + std::to_string(p.i) + '\t' +
               std::to_string(p.j) + '\n';
    }
    return out;
}

std::vector<PairRef> parse_labels(const fs::path& p, const std::vector<std::string>& names) {
    std::ifstream in(p);
    if (!in) throw Error("missing file " + p.string());
    std::vector<PairRef> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string label, id, i, j;
        if (!std::getline(ss, label, '\t') || !std::getline(ss, id, '\t') || !std::getline(ss, i, '\t') ||
            !std::getline(ss, j, '\t'))
            throw Error(p.filename().string() + " line " + std::to_string(lineno) + ": expected 4 tab-separated fields");
        const auto it = std::find(names.begin(), names.end(), label);
        if (it == names.end()) throw Error(p.filename().string() + " line " + std::to_string(lineno) + ": unknown label '" + label + "'");
        out.push_back({id, std::stoul(i), std::stoul(j), static_cast<int>(it - names.begin())});
    }
    return out;
}

void write_matrix(const fs::path& p, const Eigen::MatrixXf& m) {
    const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
    write_f32(p, rm.data(), static_cast<std::size_t>(rm.size()));
}

Eigen::MatrixXf read_matrix(const fs::path& p, std::size_t rows, std::size_t cols) {
    const auto v = read_f32(p, rows * cols, "dataset");
    Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    return m;
}

}  // namespace

void write_dataset(const ProbeDataset& ds, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    const auto names = task_labels(ds.selection.task);
    json h;
    h["task"] = to_string(ds.selection.task);
    h["pairing"] = to_string(ds.selection.pairing);
    h["model_id"] = ds.model_id;
    h["layer"] = ds.layer;
    h["seed"] = ds.selection.seed;
    h["dim"] = ds.train.cols();
    h["labels"] = names;
    h["quotas"] = {{"per_label", ds.selection.quota.per_label}, {"codes", ds.selection.quota.codes}};
    h["codes_used"] = ds.selection.codes_used;
    h["n_train"] = ds.selection.train.size();
    h["n_test"] = ds.selection.test.size();
    write_text(dir / "header.json", h.dump(2) + '\n');
    write_matrix(dir / "train.f32", ds.train);
    write_matrix(dir / "test.f32", ds.test);
    write_text(dir / "train.labels", labels_text(ds.selection.train, names));
    write_text(dir / "test.labels", labels_text(ds.selection.test, names));
}

ProbeDataset read_dataset(const fs::path& dir) {
    std::ifstream in(dir / "header.json");
    if (!in) throw Error("missing " + (dir / "header.json").string());
    json h;
    try {
        h = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("dataset header: " + std::string(e.what()));
    }
    ProbeDataset ds;
    try {
        ds.selection.task = parse_probe_task(h.at("task").get<std::string>());
        ds.selection.pairing = parse_pairing(h.at("pairing").get<std::string>());
        ds.selection.seed = h.at("seed").get<std::uint64_t>();
        ds.selection.quota.per_label = h.at("quotas").at("per_label").get<std::size_t>();
        ds.selection.quota.codes = h.at("quotas").at("codes").get<std::size_t>();
        ds.selection.codes_used = h.at("codes_used").get<std::vector<std::string>>();
        ds.model_id = h.at("model_id").get<std::string>();
        ds.layer = h.at("layer").get<int>();
    } catch (const json::exception& e) {
        throw Error("dataset header: " + std::string(e.what()));
    }
    const auto names = task_labels(ds.selection.task);
    ds.selection.train = parse_labels(dir / "train.labels", names);
    ds.selection.test = parse_labels(dir / "test.labels", names);
    const auto dim = h.at("dim").get<std::size_t>();
    ds.train = read_matrix(dir / "train.f32", ds.selection.train.size(), dim);
    ds.test = read_matrix(dir / "test.f32", ds.selection.test.size(), dim);
    return ds;
}

}  // namespace codeattn
