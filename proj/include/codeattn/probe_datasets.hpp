#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "codeattn/ast.hpp"
#include "codeattn/code_graphs.hpp"
#include "codeattn/extraction_run.hpp"

namespace codeattn {

enum class ProbeTask { Distance, Siblings, DataFlow };
enum class Pairing { KeywordAll, KeywordIdentifier, IdentifierIdentifier };

ProbeTask parse_probe_task(std::string_view s);  // distance | siblings | dfg
Pairing parse_pairing(std::string_view s);       // keyword-all | keyword-identifier | identifier-identifier
std::string_view to_string(ProbeTask t);
std::string_view to_string(Pairing p);

/// Label names of a task, indexed by label id.
std::vector<std::string> task_labels(ProbeTask t);

/// The keyword anchors of the siblings and distance tasks.
std::span<const std::string_view> probe_keywords();

/// True for keyword-category tokens whose lower-cased text is a probe keyword.
bool is_probe_keyword(const Ast& ast, std::size_t token);

struct DatasetQuota {
    std::size_t per_label = 0;
    std::size_t codes = 0;
};

DatasetQuota default_quota(ProbeTask t, Pairing p);

/// One parsed program of the probing corpus.
struct ProbeCode {
    std::string id;
    Ast ast;
    DfgGraph dfg;
};

/// Parsed programs sorted by id, so that pair selection does not depend on
/// which model produced the run.
struct ProbeCorpus {
    std::vector<ProbeCode> codes;
};

ProbeCorpus corpus_from_run(const ExtractionRun& run);
ProbeCorpus corpus_from_sources(std::vector<std::pair<std::string, std::string>> id_and_code);

struct PairRef {
    std::string sample_id;
    std::size_t i = 0;  // anchor token
    std::size_t j = 0;  // partner token
    int label = 0;

    friend bool operator==(const PairRef&, const PairRef&) = default;
};

/// Token pairs chosen for one task; independent of layer and model.
struct PairSelection {
    ProbeTask task = ProbeTask::Distance;
    Pairing pairing = Pairing::KeywordAll;
    std::uint64_t seed = 0;
    DatasetQuota quota;
    std::vector<std::string> codes_used;
    std::vector<PairRef> train;
    std::vector<PairRef> test;
};

/// Throws with the per-label shortfall when the corpus cannot fill the quota.
PairSelection select_pairs(const ProbeCorpus& corpus, ProbeTask task, Pairing pairing, std::uint64_t seed,
                           const DatasetQuota& quota);
PairSelection select_pairs(const ProbeCorpus& corpus, ProbeTask task, Pairing pairing, std::uint64_t seed);

struct ProbeDataset {
    PairSelection selection;
    std::string model_id;
    int layer = 0;
    Eigen::MatrixXf train;  // one vector per row
    Eigen::MatrixXf test;

    std::vector<int> train_labels() const;
    std::vector<int> test_labels() const;
};

/// Fills in h_i - h_j (distance) or [h_i, h_j] (siblings, data flow) from
/// the run's merged hidden states at `layer` (0 = embedding output).
ProbeDataset materialize(const PairSelection& sel, const ExtractionRun& run, int layer);

/// header.json, {train,test}.f32 (little-endian rows) and
/// {train,test}.labels (label, sample id, i, j; tab separated).
void write_dataset(const ProbeDataset& ds, const std::filesystem::path& dir);
ProbeDataset read_dataset(const std::filesystem::path& dir);

}  // namespace codeattn
